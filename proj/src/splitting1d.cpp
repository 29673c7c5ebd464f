#include "hocbp/splitting1d.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hocbp {

LimiterMode parse_limiter_mode(const std::string& s) {
    if (s == "none") return LimiterMode::None;
    if (s == "bp") return LimiterMode::BP;
    if (s == "tvb") return LimiterMode::TVB;
    if (s == "both") return LimiterMode::Both;
    throw std::invalid_argument("unknown limiter mode '" + s + "' (expected none|bp|tvb|both)");
}

std::string to_string(LimiterMode mode) {
    switch (mode) {
        case LimiterMode::None: return "none";
        case LimiterMode::BP: return "bp";
        case LimiterMode::TVB: return "tvb";
        case LimiterMode::Both: return "both";
    }
    return "none";
}

namespace {

constexpr double kCondTol = 1e-12;

const Stencil3 kB{1.0 / 6, 4.0 / 6, 1.0 / 6};

}  // namespace

ConditionReport check_conditions(double nu, double tau, const GridSpec& grid, double f_prime_bound) {
    if (grid.dim != 1) throw DimensionError("check_conditions expects a 1D grid");
    ConditionReport r;
    const double h = grid.spacing(0);
    const double nm = nu * tau / (h * h);
    r.nu_mu = {nm};
    r.cfl = tau / h * f_prime_bound;
    r.diffusion_ok = nm <= 5.0 / 3.0 + kCondTol;
    r.convection_ok = r.cfl <= 1.0 / 3.0 + kCondTol;
    r.m_matrix_regime = !diffusion_limiter_weight(nm).has_value();
    r.diffusion_limiter_needed = nu > 0.0 && !r.m_matrix_regime;
    std::ostringstream os;
    if (f_prime_bound > 0.0 && nu > 0.0 && h < nu / (5.0 * f_prime_bound)) {
        const double lim = nu / (15.0 * f_prime_bound);
        os << "diffusion-dominated (h < nu/(5 max|f'|)); tau < " << lim << " suffices";
        if (!(tau < lim)) r.warnings.push_back("tau exceeds nu/(15 max|f'|) for the diffusion-dominated regime");
    } else if (f_prime_bound > 0.0) {
        os << "convection-dominated; tau <= " << h / (3.0 * f_prime_bound) << " suffices";
    } else {
        os << "pure diffusion";
    }
    r.regime = os.str();
    if (!r.diffusion_ok) r.warnings.push_back("nu*tau/h^2 = " + std::to_string(nm) + " exceeds 5/3");
    if (!r.convection_ok) r.warnings.push_back("CFL number " + std::to_string(r.cfl) + " exceeds 1/3");
    return r;
}

StepPlan make_plan(double nu, double t0, double T, double tau_target, const LimiterSettings& limiter) {
    if (!(tau_target > 0.0)) throw std::invalid_argument("time step must be positive");
    if (T < t0) throw std::invalid_argument("final time precedes the start time");
    StepPlan p;
    p.nu = nu;
    p.t0 = t0;
    p.limiter = limiter;
    const double span = T - t0;
    if (span == 0.0) {
        p.nt = 0;
        p.tau = tau_target;
        return p;
    }
    p.nt = std::max<std::size_t>(1, std::size_t(std::llround(span / tau_target)));
    p.tau = span / double(p.nt);
    return p;
}

namespace {

void pin(double* x, std::size_t n, const std::optional<std::array<double, 2>>& b) {
    if (!b) return;
    x[0] = (*b)[0];
    x[n - 1] = (*b)[1];
}

// out = H2 u, pinned, solved with H1, limited when H1 is not an M-matrix
void diffusion_stage(const AxisOperators& ax, const double* u, double* out, std::size_t n,
                     const std::optional<std::array<double, 2>>& bnd, const LimiterSettings& lim, BoundLimiter& bp,
                     LimiterStats* stats) {
    ax.H2.multiply(u, 1, out, 1);
    pin(out, n, bnd);
    ax.H1.solve_inplace(out, 1);
    if (lim.bp() && ax.limiter_c_diffusion)
        bp.apply_strided(out, n, 1, lim.m, lim.M, *ax.limiter_c_diffusion, ax.H1.topology(),
                         lim.check_precondition, stats);
}

// out[i] -= scale * (f[i+1] - f[i-1]) / (2h); Plain end points untouched
void subtract_centered(const double* f, std::size_t n, Topology topo, double h, double scale, double* out) {
    const double r = scale * 0.5 / h;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] -= r * (f[i + 1] - f[i - 1]);
    if (topo == Topology::Cyclic) {
        out[0] -= r * (f[1] - f[n - 1]);
        out[n - 1] -= r * (f[0] - f[n - 2]);
    }
}

// out = B(u1 + tau*s) - tau*D f
void stage1_rhs(const AxisOperators& ax, Topology topo, std::size_t n, const double* u1, const double* f1,
                const double* s, double tau, double* tmp, double* out) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u1[i] + tau * s[i];
    apply_line(tmp, n, 1, kB, topo, 1.0, out, 1);
    subtract_centered(f1, n, topo, ax.h, tau, out);
}

// out = 1/2 B u1 + 1/2 (B(u2 + tau*snp1) - tau*D f2), with u2 the limited first stage
void stage2_rhs(const AxisOperators& ax, Topology topo, std::size_t n, const double* u1, const double* u2,
                const double* f2, const double* snp1, double tau, double* tmp, double* out) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = 0.5 * (u1[i] + u2[i] + tau * snp1[i]);
    apply_line(tmp, n, 1, kB, topo, 1.0, out, 1);
    subtract_centered(f2, n, topo, ax.h, 0.5 * tau, out);
}

void convection_solve(const AxisOperators& ax, double* x, std::size_t n,
                      const std::optional<std::array<double, 2>>& bnd, const LimiterSettings& lim, BoundLimiter& bp,
                      TvbLimiter& tvb, LimiterStats* stats) {
    pin(x, n, bnd);
    ax.B.solve_inplace(x, 1);
    if (lim.bp()) bp.apply_strided(x, n, 1, lim.m, lim.M, 4.0, ax.B.topology(), lim.check_precondition, stats);
    if (lim.tvb()) tvb.apply_strided(x, n, 1, lim.tvb_M, ax.h, ax.B.topology());
}

std::vector<double> eval_flux(const FluxSpec& flux, const std::vector<double>& u) {
    std::vector<double> f(u.size(), 0.0);
    if (flux.f)
        for (std::size_t i = 0; i < u.size(); ++i) f[i] = flux.f(u[i]);
    return f;
}

std::vector<double> eval_source(const Source1D& s, const GridSpec& g, double t) {
    std::vector<double> out(g.nodes(0), 0.0);
    if (s)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = s(g.coord(0, i), t);
    return out;
}

void require_1d(const Field& u, const OperatorBundle& ops) {
    if (u.grid.dim != 1 || ops.axes.size() != 1 || ops.axes[0].B.size() != u.size())
        throw DimensionError("1D stage: field and operator bundle do not match");
}

}  // namespace

std::vector<double> diffusion_rhs(const Field& u, const OperatorBundle& ops) {
    require_1d(u, ops);
    return ops.axes[0].H2.multiply(u.values);
}

std::vector<double> convection_stage1_rhs(const Field& u1, const std::vector<double>& f1,
                                          const std::vector<double>& s_n, const OperatorBundle& ops) {
    require_1d(u1, ops);
    const std::size_t n = u1.size();
    std::vector<double> tmp(n), out(n);
    stage1_rhs(ops.axes[0], ops.topology, n, u1.values.data(), f1.data(), s_n.data(), ops.tau, tmp.data(),
               out.data());
    return out;
}

std::vector<double> convection_stage2_rhs(const Field& u1, const Field& u2, const std::vector<double>& f2,
                                          const std::vector<double>& s_np1, const OperatorBundle& ops) {
    require_1d(u1, ops);
    require_1d(u2, ops);
    const std::size_t n = u1.size();
    std::vector<double> tmp(n), out(n);
    stage2_rhs(ops.axes[0], ops.topology, n, u1.values.data(), u2.values.data(), f2.data(), s_np1.data(), ops.tau,
               tmp.data(), out.data());
    return out;
}

Field diffusion_half_step(const Field& u, const OperatorBundle& ops, const StageOptions& opt) {
    require_1d(u, ops);
    Field out(u.grid);
    BoundLimiter bp;
    diffusion_stage(ops.axes[0], u.values.data(), out.values.data(), u.size(), opt.boundary, opt.limiter, bp,
                    opt.stats);
    return out;
}

Field convection_stage1(const Field& u1, const FluxSpec& flux, double t_n, const OperatorBundle& ops,
                        const StageOptions& opt) {
    auto f1 = eval_flux(flux, u1.values);
    auto sn = eval_source(flux.source, u1.grid, t_n);
    Field out(u1.grid, convection_stage1_rhs(u1, f1, sn, ops));
    BoundLimiter bp;
    TvbLimiter tvb;
    convection_solve(ops.axes[0], out.values.data(), out.size(), opt.boundary, opt.limiter, bp, tvb, opt.stats);
    return out;
}

Field convection_stage2(const Field& u1, const Field& u2, const FluxSpec& flux, double t_n, double t_np1,
                        const OperatorBundle& ops, const StageOptions& opt) {
    (void)t_n;
    auto f2 = eval_flux(flux, u2.values);
    auto snp1 = eval_source(flux.source, u1.grid, t_np1);
    Field out(u1.grid, convection_stage2_rhs(u1, u2, f2, snp1, ops));
    BoundLimiter bp;
    TvbLimiter tvb;
    convection_solve(ops.axes[0], out.values.data(), out.size(), opt.boundary, opt.limiter, bp, tvb, opt.stats);
    return out;
}

Stepper1D::Stepper1D(const GridSpec& grid, double nu, double tau, LimiterSettings limiter)
    : grid_(grid), ops_(build_operator_bundle(nu, tau, grid)), lim_(limiter) {
    if (grid.dim != 1) throw DimensionError("Stepper1D needs a 1D grid");
}

void Stepper1D::step(Field& u, const FluxSpec& flux, double t_n, const BoundaryData& bc) {
    std::vector<std::vector<double>> comps{std::move(u.values)};
    FluxEval fe = [&](const std::vector<std::vector<double>>& in, std::vector<std::vector<double>>& out) {
        const auto& a = in[0];
        auto& o = out[0];
        if (!flux.f) {
            std::fill(o.begin(), o.end(), 0.0);
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i) o[i] = flux.f(a[i]);
    };
    std::vector<Source1D> src{flux.source};
    std::vector<const BoundaryData*> bcs{bc ? &bc : nullptr};
    step_impl(comps, fe, src, t_n, bcs);
    u.values = std::move(comps[0]);
}

void Stepper1D::step(Field& u, Field& v, const CoupledFluxSpec& flux, double t_n, const BoundaryData& bc_u,
                     const BoundaryData& bc_v) {
    std::vector<std::vector<double>> comps{std::move(u.values), std::move(v.values)};
    FluxEval fe = [&](const std::vector<std::vector<double>>& in, std::vector<std::vector<double>>& out) {
        for (std::size_t i = 0; i < in[0].size(); ++i) {
            out[0][i] = flux.fu(in[0][i], in[1][i]);
            out[1][i] = flux.fv(in[0][i], in[1][i]);
        }
    };
    std::vector<Source1D> src{flux.source_u, flux.source_v};
    std::vector<const BoundaryData*> bcs{bc_u ? &bc_u : nullptr, bc_v ? &bc_v : nullptr};
    step_impl(comps, fe, src, t_n, bcs);
    u.values = std::move(comps[0]);
    v.values = std::move(comps[1]);
}

void Stepper1D::step_impl(std::vector<std::vector<double>>& comps, const FluxEval& flux,
                          const std::vector<Source1D>& sources, double t_n,
                          const std::vector<const BoundaryData*>& bcs) {
    const std::size_t K = comps.size();
    const std::size_t n = grid_.nodes(0);
    const AxisOperators& ax = ops_.axes[0];
    const double tau = ops_.tau;
    const double t_half = t_n + 0.5 * tau, t_np1 = t_n + tau;
    const bool dirichlet = !grid_.periodic();
    auto bnd = [&](std::size_t k, double t) -> std::optional<std::array<double, 2>> {
        if (!dirichlet || !bcs[k]) return std::nullopt;
        return (*bcs[k])(t);
    };
    for (auto* buf : {&u1_, &u2_, &f1_, &f2_, &sn_, &snp1_, &tmp_}) {
        buf->resize(K);
        for (auto& b : *buf) b.resize(n);
    }
    x_.resize(n);
    source_mass_.assign(K, 0.0);
    stats_ = {};

    for (std::size_t k = 0; k < K; ++k)
        diffusion_stage(ax, comps[k].data(), u1_[k].data(), n, bnd(k, t_half), lim_, bp_, &stats_);
    flux(u1_, f1_);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid_.coord(0, i);
            sn_[k][i] = sources[k] ? sources[k](x, t_n) : 0.0;
            snp1_[k][i] = sources[k] ? sources[k](x, t_np1) : 0.0;
        }
        stage1_rhs(ax, ops_.topology, n, u1_[k].data(), f1_[k].data(), sn_[k].data(), tau, tmp_[k].data(),
                   u2_[k].data());
        convection_solve(ax, u2_[k].data(), n, bnd(k, t_np1), lim_, bp_, tvb_, &stats_);
    }
    flux(u2_, f2_);
    for (std::size_t k = 0; k < K; ++k) {
        stage2_rhs(ax, ops_.topology, n, u1_[k].data(), u2_[k].data(), f2_[k].data(), snp1_[k].data(), tau,
                   tmp_[k].data(), x_.data());
        convection_solve(ax, x_.data(), n, bnd(k, t_np1), lim_, bp_, tvb_, &stats_);
        diffusion_stage(ax, x_.data(), comps[k].data(), n, bnd(k, t_np1), lim_, bp_, &stats_);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += sn_[k][i] + snp1_[k][i];
        source_mass_[k] = 0.5 * tau * ax.h * s;
    }
}

RunResult integrate(const Problem1D& problem, const StepPlan& plan) {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec& g = problem.grid;
    const std::size_t K = problem.components;
    if (K != 1 && K != 2) throw std::invalid_argument("integrate: 1 or 2 components supported");
    RunResult res;
    for (std::size_t k = 0; k < K; ++k) {
        if (!problem.initial[k]) throw std::invalid_argument("integrate: missing initial condition");
        res.fields.push_back(sample(g, problem.initial[k]));
    }
    const double mass0 = mass(res.fields[0]);
    double source_mass = 0.0;
    Stepper1D stepper(g, plan.nu, plan.tau, plan.limiter);
    for (std::size_t n = 0; n < plan.nt; ++n) {
        const double t_n = plan.t0 + plan.tau * double(n);
        if (K == 1)
            stepper.step(res.fields[0], problem.flux, t_n, problem.boundary[0]);
        else
            stepper.step(res.fields[0], res.fields[1], problem.coupled, t_n, problem.boundary[0],
                         problem.boundary[1]);
        for (const auto& f : res.fields)
            if (!f.all_finite())
                throw NonFiniteError("non-finite value after step " + std::to_string(n + 1), n + 1);
        source_mass += stepper.last_source_mass()[0];
        StepMetrics m;
        m.step = n + 1;
        m.time = plan.t0 + plan.tau * double(n + 1);
        m.mass_err = mass(res.fields[0]) - mass0 - source_mass;
        auto br = bounds_report(res.fields[0], plan.limiter.m, plan.limiter.M);
        m.min_u = br.min_val;
        m.max_u = br.max_val;
        m.clamped_points = stepper.last_stats().clamped;
        res.metrics.push_back(m);
    }
    res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace hocbp
