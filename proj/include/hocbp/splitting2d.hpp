#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hocbp/compact_ops.hpp"
#include "hocbp/field.hpp"
#include "hocbp/limiters.hpp"
#include "hocbp/splitting1d.hpp"

namespace hocbp {

using Flux2D = std::function<double(double x, double y, double u)>;
using Source2D = std::function<double(double x, double y, double t)>;

// u_t + f(x,y,u)_x + g(x,y,u)_y = nu (u_xx + u_yy) + S
struct FluxSpec2D {
    Flux2D f;
    Flux2D g;
    double f_prime_bound = 0.0;
    double g_prime_bound = 0.0;
    Source2D source;
};

// Prescribed values on a Dirichlet boundary (evaluated at boundary nodes only)
using BoundaryData2D = std::function<double(double x, double y, double t)>;

ConditionReport check_conditions_2d(double nu, double tau, const GridSpec& grid, double f_prime_bound,
                                    double g_prime_bound);

// Stage buffers reused across steps.
struct AdiWorkspace {
    Field u2, u3, u4;
    std::vector<double> rhs, tmp, fx, gy, edge, s_n, s_np1;
    std::vector<double> line;
};

class AdiStepper {
public:
    AdiStepper(const GridSpec& grid, double nu, double tau, LimiterSettings limiter);

    const OperatorBundle& operators() const { return ops_; }

    // two diffusion sweeps over half a step; boundary values
    // (Dirichlet only) are taken at `t_bc`
    void diffusion_half_step(const Field& u, Field& out, const BoundaryData2D& bc = {}, double t_bc = 0.0);
    void convection_stage1(const Field& u2, Field& out, const FluxSpec2D& flux, double t_n,
                           const BoundaryData2D& bc = {});
    void convection_stage2(const Field& u2, const Field& u3, Field& out, const FluxSpec2D& flux, double t_n,
                           const BoundaryData2D& bc = {});
    void step(Field& u, const FluxSpec2D& flux, double t_n, const BoundaryData2D& bc = {});

    double last_source_mass() const { return source_mass_; }
    const LimiterStats& last_stats() const { return stats_; }

private:
    void prepare();
    void evaluate_fluxes(const Field& u, const FluxSpec2D& flux);
    void source_values(const FluxSpec2D& flux, double t, std::vector<double>& out);
    // x-row solve of rhs_ into out with the given edge values, then y-column
    // solve; `between` runs after the rows are solved
    void solve_xy(const TridiagonalSystem& opx, const TridiagonalSystem& opy, std::optional<double> cx,
                  std::optional<double> cy, Field& out, const BoundaryData2D& bc, double t_bc,
                  const std::function<void(Field&)>& between, bool tvb);
    void pin_boundary(Field& f, const BoundaryData2D& bc, double t) const;

    GridSpec grid_;
    OperatorBundle ops_;
    LimiterSettings lim_;
    AdiWorkspace ws_;
    BoundLimiter bp_;
    TvbLimiter tvb_;
    LimiterStats stats_;
    double source_mass_ = 0.0;
};

Field adi_diffusion_half_step(const Field& u, const OperatorBundle& ops, const LimiterSettings& lim = {});
Field convection_stage1_2d(const Field& u2, const FluxSpec2D& flux, double t_n, const OperatorBundle& ops,
                           const LimiterSettings& lim = {});
Field convection_stage2_2d(const Field& u2, const Field& u3, const FluxSpec2D& flux, double t_n,
                           const OperatorBundle& ops, const LimiterSettings& lim = {});
Field strang_adi_step(const Field& u, const StepPlan& plan, const FluxSpec2D& flux, double t_n,
                      const BoundaryData2D& bc = {});

struct Problem2D {
    GridSpec grid;
    double t0 = 0.0;
    FluxSpec2D flux;
    std::function<double(double, double)> initial;
    BoundaryData2D boundary;
};

RunResult integrate_2d(const Problem2D& problem, const StepPlan& plan);

}  // namespace hocbp
