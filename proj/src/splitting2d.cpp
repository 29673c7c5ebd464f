#include "hocbp/splitting2d.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace hocbp {

namespace {

constexpr double kCondTol = 1e-12;

const Stencil3 kA{1.0 / 12, 10.0 / 12, 1.0 / 12};
const Stencil3 kB{1.0 / 6, 4.0 / 6, 1.0 / 6};

// out = stencil applied along `axis` of an nx-by-ny row-major array
void sweep(const double* in, double* out, std::size_t nx, std::size_t ny, int axis, const Stencil3& s,
           Topology topo, double boundary_scale) {
    if (axis == 0) {
        for (std::size_t j = 0; j < ny; ++j) apply_line(in + j * nx, nx, 1, s, topo, boundary_scale, out + j * nx, 1);
    } else {
        for (std::size_t i = 0; i < nx; ++i) apply_line(in + i, ny, nx, s, topo, boundary_scale, out + i, nx);
    }
}

Stencil3 second_difference(double h) { return {1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)}; }
Stencil3 centered(double h) { return {-0.5 / h, 0.0, 0.5 / h}; }

}  // namespace

ConditionReport check_conditions_2d(double nu, double tau, const GridSpec& grid, double f_prime_bound,
                                    double g_prime_bound) {
    if (grid.dim != 2) throw DimensionError("check_conditions_2d expects a 2D grid");
    ConditionReport r;
    const double hx = grid.spacing(0), hy = grid.spacing(1);
    const double nx = nu * tau / (hx * hx), ny = nu * tau / (hy * hy);
    r.nu_mu = {nx, ny};
    r.cfl = tau / hx * f_prime_bound + tau / hy * g_prime_bound;
    r.diffusion_ok = std::max(nx, ny) <= 5.0 / 3.0 + kCondTol;
    r.convection_ok = r.cfl <= 1.0 / 3.0 + kCondTol;
    r.m_matrix_regime = !diffusion_limiter_weight(nx) && !diffusion_limiter_weight(ny);
    r.diffusion_limiter_needed = nu > 0.0 && (diffusion_limiter_weight(nx) || diffusion_limiter_weight(ny));
    r.equal_mesh_ratios = std::abs(nx - ny) <= kCondTol * std::max({nx, ny, 1.0});
    const double fmax = std::max(f_prime_bound, g_prime_bound);
    const double h = std::max(hx, hy);
    std::ostringstream os;
    if (fmax > 0.0 && nu > 0.0 && h < nu / (10.0 * fmax)) {
        const double lim = nu / (60.0 * fmax);
        os << "diffusion-dominated (h < nu/(10 max|f'|)); tau < " << lim << " suffices";
        if (!(tau < lim)) r.warnings.push_back("tau exceeds nu/(60 max|f'|) for the diffusion-dominated regime");
    } else if (fmax > 0.0) {
        os << "convection-dominated; tau < " << h / (6.0 * fmax) << " suffices";
    } else {
        os << "pure diffusion";
    }
    r.regime = os.str();
    if (!r.diffusion_ok) r.warnings.push_back("nu*tau/h^2 exceeds 5/3 on at least one axis");
    if (!r.convection_ok) r.warnings.push_back("combined CFL number " + std::to_string(r.cfl) + " exceeds 1/3");
    if (!r.equal_mesh_ratios)
        r.warnings.push_back("unequal mesh ratios per axis; bound preservation is not covered by the analysis");
    return r;
}

AdiStepper::AdiStepper(const GridSpec& grid, double nu, double tau, LimiterSettings limiter)
    : grid_(grid), ops_(build_operator_bundle(nu, tau, grid)), lim_(limiter) {
    if (grid.dim != 2) throw DimensionError("AdiStepper needs a 2D grid");
    prepare();
}

void AdiStepper::prepare() {
    const std::size_t n = grid_.size();
    for (Field* f : {&ws_.u2, &ws_.u3, &ws_.u4})
        if (f->size() != n) *f = Field(grid_);
    for (auto* v : {&ws_.rhs, &ws_.tmp, &ws_.fx, &ws_.gy, &ws_.edge, &ws_.s_n, &ws_.s_np1}) v->resize(n);
    ws_.line.resize(std::max(grid_.nodes(0), grid_.nodes(1)));
}

void AdiStepper::pin_boundary(Field& f, const BoundaryData2D& bc, double t) const {
    if (grid_.periodic() || !bc) return;
    const std::size_t nx = grid_.nodes(0), ny = grid_.nodes(1);
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = grid_.coord(0, i);
        f.at(i, 0) = bc(x, grid_.coord(1, 0), t);
        f.at(i, ny - 1) = bc(x, grid_.coord(1, ny - 1), t);
    }
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        const double y = grid_.coord(1, j);
        f.at(0, j) = bc(grid_.coord(0, 0), y, t);
        f.at(nx - 1, j) = bc(grid_.coord(0, nx - 1), y, t);
    }
}

void AdiStepper::solve_xy(const TridiagonalSystem& opx, const TridiagonalSystem& opy, std::optional<double> cx,
                          std::optional<double> cy, Field& out, const BoundaryData2D& bc, double t_bc,
                          const std::function<void(Field&)>& between, bool tvb) {
    const std::size_t nx = grid_.nodes(0), ny = grid_.nodes(1);
    const bool dirichlet = !grid_.periodic() && bc;
    const Topology tx = opx.topology(), ty = opy.topology();
    std::copy(ws_.rhs.begin(), ws_.rhs.end(), out.values.begin());
    std::size_t j0 = 0, j1 = ny, i0 = 0, i1 = nx;
    if (dirichlet) {
        j0 = 1, j1 = ny - 1, i0 = 1, i1 = nx - 1;
        // edge entries of the row unknown: opy applied to the boundary data
        std::vector<double>& g = ws_.line;
        for (std::size_t i : {std::size_t(0), nx - 1}) {
            const double x = grid_.coord(0, i);
            for (std::size_t j = 0; j < ny; ++j) g[j] = bc(x, grid_.coord(1, j), t_bc);
            opy.multiply(g.data(), 1, out.values.data() + i, nx);
            for (std::size_t j = 0; j < ny; ++j) out.at(i, j) += ws_.edge[j * nx + i];
        }
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = grid_.coord(0, i);
            out.at(i, 0) = bc(x, grid_.coord(1, 0), t_bc);
            out.at(i, ny - 1) = bc(x, grid_.coord(1, ny - 1), t_bc);
        }
    }
    for (std::size_t j = j0; j < j1; ++j) opx.solve_inplace(out.values.data() + j * nx, 1);
    if (between) between(out);
    if (lim_.bp() && cx)
        for (std::size_t j = j0; j < j1; ++j)
            bp_.apply_strided(out.values.data() + j * nx, nx, 1, lim_.m, lim_.M, *cx, tx, lim_.check_precondition,
                              &stats_);
    for (std::size_t i = i0; i < i1; ++i) opy.solve_inplace(out.values.data() + i, nx);
    if (lim_.bp() && cy)
        for (std::size_t i = i0; i < i1; ++i)
            bp_.apply_strided(out.values.data() + i, ny, nx, lim_.m, lim_.M, *cy, ty, lim_.check_precondition,
                              &stats_);
    if (dirichlet) pin_boundary(out, bc, t_bc);
    if (tvb && lim_.tvb()) {
        for (std::size_t j = j0; j < j1; ++j)
            tvb_.apply_strided(out.values.data() + j * nx, nx, 1, lim_.tvb_M, grid_.spacing(0), tx);
        for (std::size_t i = i0; i < i1; ++i)
            tvb_.apply_strided(out.values.data() + i, ny, nx, lim_.tvb_M, grid_.spacing(1), ty);
    }
}

void AdiStepper::diffusion_half_step(const Field& u, Field& out, const BoundaryData2D& bc, double t_bc) {
    if (!(u.grid == grid_)) throw DimensionError("diffusion_half_step: grid mismatch");
    const std::size_t nx = grid_.nodes(0), ny = grid_.nodes(1);
    const Topology topo = ops_.topology;
    const AxisOperators& ax = ops_.axes[0];
    const AxisOperators& ay = ops_.axes[1];
    const double a = 0.25 * ops_.nu * ops_.tau;
    if (out.size() != u.size()) out = Field(grid_);
    // rhs = H2x Ay u + 2a Ax dyy u
    sweep(u.values.data(), ws_.tmp.data(), nx, ny, 1, kA, topo, 1.0);
    sweep(ws_.tmp.data(), ws_.rhs.data(), nx, ny, 0, ax.H2.stencil(), topo, 1.0);
    // edge = a dyy u, kept for the correction between sweeps
    sweep(u.values.data(), ws_.edge.data(), nx, ny, 1, second_difference(ay.h), topo, 0.0);
    for (auto& e : ws_.edge) e *= a;
    sweep(ws_.edge.data(), ws_.tmp.data(), nx, ny, 0, kA, topo, 1.0);
    for (std::size_t k = 0; k < ws_.rhs.size(); ++k) ws_.rhs[k] += 2.0 * ws_.tmp[k];
    auto correct = [&](Field& w) {
        for (std::size_t k = 0; k < w.size(); ++k) w[k] -= ws_.edge[k];
    };
    solve_xy(ax.H1, ay.H1, ax.limiter_c_diffusion, ay.limiter_c_diffusion, out, bc, t_bc, correct, false);
}

void AdiStepper::source_values(const FluxSpec2D& flux, double t, std::vector<double>& out) {
    const std::size_t nx = grid_.nodes(0), ny = grid_.nodes(1);
    if (!flux.source) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            out[j * nx + i] = flux.source(grid_.coord(0, i), grid_.coord(1, j), t);
}

// nodal f(u) and g(u) into fx, gy
void AdiStepper::evaluate_fluxes(const Field& u, const FluxSpec2D& flux) {
    const std::size_t nx = grid_.nodes(0), ny = grid_.nodes(1);
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = grid_.coord(1, j);
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = grid_.coord(0, i);
            const std::size_t k = j * nx + i;
            const double fv = flux.f ? flux.f(x, y, u[k]) : 0.0;
            const double gv = flux.g ? flux.g(x, y, u[k]) : 0.0;
            ws_.fx[k] = fv;
            ws_.gy[k] = gv;
        }
    }
}

namespace {

void subtract_divergence(std::vector<double>& rhs, const std::vector<double>& fx, const std::vector<double>& gy,
                         std::vector<double>& tmp, std::vector<double>& tmp2, std::size_t nx, std::size_t ny,
                         double hx, double hy, Topology topo, double scale) {
    sweep(fx.data(), tmp.data(), nx, ny, 0, centered(hx), topo, 0.0);
    sweep(tmp.data(), tmp2.data(), nx, ny, 1, kB, topo, 1.0);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] -= scale * tmp2[k];
    sweep(gy.data(), tmp.data(), nx, ny, 1, centered(hy), topo, 0.0);
    sweep(tmp.data(), tmp2.data(), nx, ny, 0, kB, topo, 1.0);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] -= scale * tmp2[k];
}

}  // namespace

void AdiStepper::convection_stage1(const Field& u2, Field& out, const FluxSpec2D& flux, double t_n,
                                   const BoundaryData2D& bc) {
    const std::size_t nx = grid_.nodes(0), ny = grid_.nodes(1);
    const Topology topo = ops_.topology;
    const double tau = ops_.tau;
    if (out.size() != u2.size()) out = Field(grid_);
    source_values(flux, t_n, ws_.s_n);
    // rhs = BxBy(u2 + tau S^n) - tau (By Dx f + Bx Dy g)
    for (std::size_t k = 0; k < ws_.tmp.size(); ++k) ws_.s_np1[k] = u2[k] + tau * ws_.s_n[k];
    sweep(ws_.s_np1.data(), ws_.tmp.data(), nx, ny, 1, kB, topo, 1.0);
    sweep(ws_.tmp.data(), ws_.rhs.data(), nx, ny, 0, kB, topo, 1.0);
    evaluate_fluxes(u2, flux);
    subtract_divergence(ws_.rhs, ws_.fx, ws_.gy, ws_.tmp, ws_.s_np1, nx, ny, grid_.spacing(0), grid_.spacing(1),
                        topo, tau);
    std::fill(ws_.edge.begin(), ws_.edge.end(), 0.0);
    solve_xy(ops_.axes[0].B, ops_.axes[1].B, 4.0, 4.0, out, bc, t_n + tau, {}, true);
}

void AdiStepper::convection_stage2(const Field& u2, const Field& u3, Field& out, const FluxSpec2D& flux,
                                   double t_n, const BoundaryData2D& bc) {
    const std::size_t nx = grid_.nodes(0), ny = grid_.nodes(1);
    const Topology topo = ops_.topology;
    const double tau = ops_.tau;
    if (out.size() != u2.size()) out = Field(grid_);
    source_values(flux, t_n + tau, ws_.s_np1);
    // rhs = 1/2 BxBy u2 + 1/2 (BxBy(u3 + tau S^{n+1}) - tau (By Dx f3 + Bx Dy g3))
    for (std::size_t k = 0; k < ws_.tmp.size(); ++k) ws_.s_np1[k] = 0.5 * (u2[k] + u3[k] + tau * ws_.s_np1[k]);
    sweep(ws_.s_np1.data(), ws_.tmp.data(), nx, ny, 1, kB, topo, 1.0);
    sweep(ws_.tmp.data(), ws_.rhs.data(), nx, ny, 0, kB, topo, 1.0);
    evaluate_fluxes(u3, flux);
    subtract_divergence(ws_.rhs, ws_.fx, ws_.gy, ws_.tmp, ws_.s_np1, nx, ny, grid_.spacing(0), grid_.spacing(1),
                        topo, 0.5 * tau);
    std::fill(ws_.edge.begin(), ws_.edge.end(), 0.0);
    solve_xy(ops_.axes[0].B, ops_.axes[1].B, 4.0, 4.0, out, bc, t_n + tau, {}, true);
}

void AdiStepper::step(Field& u, const FluxSpec2D& flux, double t_n, const BoundaryData2D& bc) {
    const double tau = ops_.tau;
    stats_ = {};
    diffusion_half_step(u, ws_.u2, bc, t_n + 0.5 * tau);
    convection_stage1(ws_.u2, ws_.u3, flux, t_n, bc);
    convection_stage2(ws_.u2, ws_.u3, ws_.u4, flux, t_n, bc);
    diffusion_half_step(ws_.u4, u, bc, t_n + tau);
    source_mass_ = 0.0;
    if (flux.source) {
        const std::size_t nx = grid_.nodes(0), ny = grid_.nodes(1);
        double s = 0.0;
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                const double x = grid_.coord(0, i), y = grid_.coord(1, j);
                s += flux.source(x, y, t_n) + flux.source(x, y, t_n + tau);
            }
        source_mass_ = 0.5 * tau * grid_.cell_volume() * s;
    }
}

Field adi_diffusion_half_step(const Field& u, const OperatorBundle& ops, const LimiterSettings& lim) {
    AdiStepper st(u.grid, ops.nu, ops.tau, lim);
    Field out(u.grid);
    st.diffusion_half_step(u, out);
    return out;
}

Field convection_stage1_2d(const Field& u2, const FluxSpec2D& flux, double t_n, const OperatorBundle& ops,
                           const LimiterSettings& lim) {
    AdiStepper st(u2.grid, ops.nu, ops.tau, lim);
    Field out(u2.grid);
    st.convection_stage1(u2, out, flux, t_n);
    return out;
}

Field convection_stage2_2d(const Field& u2, const Field& u3, const FluxSpec2D& flux, double t_n,
                           const OperatorBundle& ops, const LimiterSettings& lim) {
    AdiStepper st(u2.grid, ops.nu, ops.tau, lim);
    Field out(u2.grid);
    st.convection_stage2(u2, u3, out, flux, t_n);
    return out;
}

Field strang_adi_step(const Field& u, const StepPlan& plan, const FluxSpec2D& flux, double t_n,
                      const BoundaryData2D& bc) {
    AdiStepper st(u.grid, plan.nu, plan.tau, plan.limiter);
    Field out = u;
    st.step(out, flux, t_n, bc);
    return out;
}

RunResult integrate_2d(const Problem2D& problem, const StepPlan& plan) {
    const auto start = std::chrono::steady_clock::now();
    if (!problem.initial) throw std::invalid_argument("integrate_2d: missing initial condition");
    RunResult res;
    res.fields.push_back(sample(problem.grid, problem.initial));
    Field& u = res.fields[0];
    const double mass0 = mass(u);
    double source_mass = 0.0;
    AdiStepper stepper(problem.grid, plan.nu, plan.tau, plan.limiter);
    for (std::size_t n = 0; n < plan.nt; ++n) {
        const double t_n = plan.t0 + plan.tau * double(n);
        stepper.step(u, problem.flux, t_n, problem.boundary);
        if (!u.all_finite()) throw NonFiniteError("non-finite value after step " + std::to_string(n + 1), n + 1);
        source_mass += stepper.last_source_mass();
        StepMetrics m;
        m.step = n + 1;
        m.time = plan.t0 + plan.tau * double(n + 1);
        m.mass_err = mass(u) - mass0 - source_mass;
        auto br = bounds_report(u, plan.limiter.m, plan.limiter.M);
        m.min_u = br.min_val;
        m.max_u = br.max_val;
        m.clamped_points = stepper.last_stats().clamped;
        res.metrics.push_back(m);
    }
    res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace hocbp
