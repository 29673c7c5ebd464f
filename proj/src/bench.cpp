#include "hocbp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <locale>
#include <sstream>

#include "hocbp/splitting2d.hpp"

namespace hocbp {

namespace {

void prepare_stream(std::ostream& os) {
    os.imbue(std::locale::classic());
    os << std::setprecision(17);
}

// warns when the observed range of a scalar 1D flux needs a larger |f'| bound
std::optional<std::string> flux_bound_warning(const ProblemSpec& p, const Field& u) {
    if (p.dim != 1 || p.components != 1 || !p.flux.f || p.f_prime_bound <= 0.0) return std::nullopt;
    auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
    const double a = *lo, b = *hi;
    if (!(b > a)) return std::nullopt;
    double worst = 0.0;
    const int n = 200;
    for (int k = 0; k < n; ++k) {
        const double x0 = a + (b - a) * k / n, x1 = a + (b - a) * (k + 1) / n;
        worst = std::max(worst, std::abs(p.flux.f(x1) - p.flux.f(x0)) / (x1 - x0));
    }
    if (worst > 1.01 * p.f_prime_bound) {
        std::ostringstream os;
        os << "observed max|f'| " << worst << " over [" << a << ", " << b << "] exceeds the supplied bound "
           << p.f_prime_bound;
        return os.str();
    }
    return std::nullopt;
}

}  // namespace

double resolve_tau(const ProblemSpec& p, const RunConfig& cfg, double h) {
    if (cfg.tau) return *cfg.tau;
    if (cfg.cfl) {
        const double fmax = std::max(p.f_prime_bound, p.g_prime_bound);
        if (!(fmax > 0.0)) throw std::invalid_argument("--cfl needs a problem with a convection speed bound");
        return *cfg.cfl * h / fmax;
    }
    if (cfg.tau_h2) return h * h;
    return p.default_tau(h);
}

namespace {

RunSummary run_problem(const ProblemSpec& p, const RunConfig& cfg, bool want_errors) {
    RunSummary s;
    s.problem = p.name;
    s.N = cfg.N.value_or(p.default_N);
    s.grid = p.grid(s.N);
    s.nu = cfg.nu.value_or(p.nu);
    s.T = cfg.T.value_or(p.T);
    s.limiter = cfg.limiter;
    const double h = s.grid.spacing(0);
    const double tau = resolve_tau(p, cfg, h);
    auto b = p.limiter_bounds(s.grid);
    s.m = b[0];
    s.M = b[1];
    LimiterSettings lim;
    lim.mode = cfg.limiter;
    lim.m = s.m;
    lim.M = s.M;
    lim.tvb_M = cfg.tvb_M;
    lim.check_precondition = cfg.check_precondition.value_or(p.check_precondition);
    StepPlan plan = make_plan(s.nu, p.t0, s.T, tau, lim);
    s.tau = plan.tau;
    s.nt = plan.nt;
    s.conditions = p.dim == 1 ? check_conditions(s.nu, plan.tau, s.grid, p.f_prime_bound)
                              : check_conditions_2d(s.nu, plan.tau, s.grid, p.f_prime_bound, p.g_prime_bound);
    plan.conditions = s.conditions;
    s.warnings = s.conditions.warnings;
    if (cfg.strict && !s.conditions.all_ok()) {
        std::string msg = "step-size conditions not met:";
        for (const auto& w : s.conditions.warnings) msg += " " + w + ";";
        throw ConditionAbort(msg, s.conditions);
    }
    s.result = p.dim == 1 ? integrate(p.problem1d(s.grid), plan) : integrate_2d(p.problem2d(s.grid), plan);
    const Field& u = s.result.fields[0];
    s.bounds = bounds_report(u, s.m, s.M);
    if (!s.result.metrics.empty()) {
        s.mass_err = s.result.metrics.back().mass_err;
        for (const auto& m : s.result.metrics) s.max_abs_mass_err = std::max(s.max_abs_mass_err, std::abs(m.mass_err));
    }
    if (auto w = flux_bound_warning(p, u)) s.warnings.push_back(*w);
    if (want_errors) {
        if (p.has_exact()) {
            s.errors = error_norms(u, p.exact_field(s.grid, plan.t_end()));
        } else if (p.reference_by_fine_run) {
            s.errors = error_norms(u, reference_solution(p, cfg, s.grid));
        }
    }
    return s;
}

}  // namespace

// the fine reference run is costly, so a plain run only does it on request
RunSummary run_single(const RunConfig& cfg) {
    const ProblemSpec& p = find_problem(cfg.problem);
    return run_problem(p, cfg, p.has_exact() || cfg.reference_N.has_value());
}

Field reference_solution(const ProblemSpec& p, const RunConfig& cfg, const GridSpec& coarse) {
    const std::size_t nc = coarse.cells[0];
    std::size_t nf = cfg.reference_N.value_or(p.reference_N);
    if (nf == 0 || nf % nc != 0) {
        std::ostringstream os;
        os << "reference grid N=" << nf << " must be a positive multiple of N=" << nc;
        throw std::invalid_argument(os.str());
    }
    RunConfig fine = cfg;
    fine.problem = p.name;
    fine.N = nf;
    fine.tau.reset();
    fine.cfl.reset();
    fine.tau_h2 = false;
    fine.limiter = LimiterMode::BP;
    fine.strict = false;
    RunSummary r = run_problem(p, fine, false);
    const Field& uf = r.result.fields[0];
    const std::size_t ratio = nf / nc;
    Field out(coarse);
    if (coarse.dim == 1) {
        for (std::size_t i = 0; i < coarse.nodes(0); ++i) out[i] = uf[i * ratio];
    } else {
        for (std::size_t j = 0; j < coarse.nodes(1); ++j)
            for (std::size_t i = 0; i < coarse.nodes(0); ++i) out.at(i, j) = uf.at(i * ratio, j * ratio);
    }
    return out;
}

double observed_order(double e_coarse, double e_fine, double N_coarse, double N_fine) {
    return std::log(e_coarse / e_fine) / std::log(N_fine / N_coarse);
}

std::vector<ConvergenceRow> run_convergence(const RunConfig& cfg, const std::vector<std::size_t>& N_list) {
    const ProblemSpec& p = find_problem(cfg.problem);
    if (!p.has_exact() && !p.reference_by_fine_run)
        throw std::invalid_argument("problem " + p.name + " has no exact or reference solution");
    std::vector<std::future<RunSummary>> jobs;
    for (std::size_t N : N_list) {
        RunConfig c = cfg;
        c.N = N;
        jobs.push_back(std::async(std::launch::async, [&p, c] { return run_problem(p, c, true); }));
    }
    std::vector<ConvergenceRow> rows;
    for (auto& j : jobs) {
        RunSummary s = j.get();
        ConvergenceRow r;
        r.N = s.N;
        r.linf_error = s.errors->linf;
        r.l2_error = s.errors->l2;
        r.m_err = s.bounds.m_err;
        r.M_err = s.bounds.M_err;
        r.mass_err = s.mass_err;
        r.wall_time_s = s.result.wall_time_s;
        if (!rows.empty()) {
            const auto& prev = rows.back();
            r.linf_order = observed_order(prev.linf_error, r.linf_error, double(prev.N), double(r.N));
            r.l2_order = observed_order(prev.l2_error, r.l2_error, double(prev.N), double(r.N));
        }
        rows.push_back(r);
    }
    return rows;
}

std::vector<RunSummary> compare_limiter_modes(const RunConfig& cfg, const std::vector<LimiterMode>& modes) {
    std::vector<RunSummary> out;
    for (LimiterMode m : modes) {
        RunConfig c = cfg;
        c.limiter = m;
        out.push_back(run_single(c));
    }
    return out;
}

void write_field_csv(std::ostream& os, const std::vector<Field>& fields) {
    if (fields.empty()) return;
    prepare_stream(os);
    const GridSpec& g = fields[0].grid;
    static const char* names[] = {"u", "v"};
    os << (g.dim == 1 ? "x" : "x,y");
    for (std::size_t k = 0; k < fields.size() && k < 2; ++k) os << ',' << names[k];
    os << '\n';
    for (std::size_t n = 0; n < g.size(); ++n) {
        const std::size_t i = n % g.nodes(0), j = n / g.nodes(0);
        os << g.coord(0, i);
        if (g.dim == 2) os << ',' << g.coord(1, j);
        for (const auto& f : fields) os << ',' << f[n];
        os << '\n';
    }
}

void write_metrics_csv(std::ostream& os, const MetricsSeries& metrics) {
    prepare_stream(os);
    os << "step,time,mass_err,min_u,max_u,clamped_points\n";
    for (const auto& m : metrics)
        os << m.step << ',' << m.time << ',' << m.mass_err << ',' << m.min_u << ',' << m.max_u << ','
           << m.clamped_points << '\n';
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    prepare_stream(os);
    os << "N,linf_error,linf_order,l2_error,l2_order,m_err,M_err,mass_err,wall_time_s\n";
    for (const auto& r : rows) {
        os << r.N << ',' << r.linf_error << ',';
        if (r.linf_order) os << *r.linf_order;
        os << ',' << r.l2_error << ',';
        if (r.l2_order) os << *r.l2_order;
        os << ',' << r.m_err << ',' << r.M_err << ',' << r.mass_err << ',' << r.wall_time_s << '\n';
    }
}

void write_comparison_csv(std::ostream& os, const std::vector<RunSummary>& runs) {
    prepare_stream(os);
    os << "step,time";
    for (const auto& r : runs) {
        const std::string m = to_string(r.limiter);
        os << ',' << m << "_min," << m << "_max," << m << "_mass_err";
    }
    os << '\n';
    if (runs.empty()) return;
    const std::size_t steps = runs[0].result.metrics.size();
    for (std::size_t k = 0; k < steps; ++k) {
        os << runs[0].result.metrics[k].step << ',' << runs[0].result.metrics[k].time;
        for (const auto& r : runs) {
            const auto& m = r.result.metrics[k];
            os << ',' << m.min_u << ',' << m.max_u << ',' << m.mass_err;
        }
        os << '\n';
    }
}

std::string summary_line(const RunSummary& s) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(6);
    os << s.problem << " N=" << s.N << " tau=" << s.tau << " steps=" << s.nt << " nu=" << s.nu << " T=" << s.T
       << " limiter=" << to_string(s.limiter) << " min=" << s.bounds.min_val << " max=" << s.bounds.max_val
       << " m_err=" << s.bounds.m_err << " M_err=" << s.bounds.M_err << " mass_err=" << s.mass_err;
    if (s.errors) os << " linf=" << s.errors->linf << " l2=" << s.errors->l2;
    os << " time=" << s.result.wall_time_s << "s";
    return os.str();
}

}  // namespace hocbp
