#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hocbp/compact_ops.hpp"
#include "hocbp/field.hpp"
#include "hocbp/limiters.hpp"

namespace hocbp {

enum class LimiterMode { None, BP, TVB, Both };

LimiterMode parse_limiter_mode(const std::string& s);
std::string to_string(LimiterMode mode);

struct LimiterSettings {
    LimiterMode mode = LimiterMode::None;
    double m = 0.0;
    double M = 1.0;
    double tvb_M = 1.0;
    bool check_precondition = true;
    bool bp() const { return mode == LimiterMode::BP || mode == LimiterMode::Both; }
    bool tvb() const { return mode == LimiterMode::TVB || mode == LimiterMode::Both; }
};

using Source1D = std::function<double(double x, double t)>;

struct FluxSpec {
    std::function<double(double)> f;
    double f_prime_bound = 0.0;
    Source1D source;  // empty means zero
};

// Two fields advected together: u_t + fu(u,v)_x = ..., v_t + fv(u,v)_x = ...
struct CoupledFluxSpec {
    std::function<double(double, double)> fu;
    std::function<double(double, double)> fv;
    double f_prime_bound = 0.0;
    Source1D source_u;
    Source1D source_v;
};

struct ConditionReport {
    std::vector<double> nu_mu;  // per axis
    double cfl = 0.0;           // lambda max|f'| (summed over axes in 2D)
    bool diffusion_ok = true;   // nu_mu <= 5/3
    bool convection_ok = true;  // cfl <= 1/3
    bool m_matrix_regime = false;
    bool diffusion_limiter_needed = false;
    bool equal_mesh_ratios = true;
    std::string regime;
    std::vector<std::string> warnings;
    bool all_ok() const { return diffusion_ok && convection_ok; }
};

ConditionReport check_conditions(double nu, double tau, const GridSpec& grid, double f_prime_bound);

struct StepPlan {
    double nu = 0.0;
    double tau = 0.0;
    std::size_t nt = 0;
    double t0 = 0.0;
    LimiterSettings limiter;
    ConditionReport conditions;
    double t_end() const { return t0 + tau * double(nt); }
};

// nt = round((T - t0) / tau_target); tau is then adjusted so nt * tau = T - t0.
StepPlan make_plan(double nu, double t0, double T, double tau_target, const LimiterSettings& limiter);

// Boundary values at both ends of a Dirichlet line; ignored on periodic grids.
using BoundaryData = std::function<std::array<double, 2>(double t)>;

// Stage right-hand sides before the implicit solves.
std::vector<double> diffusion_rhs(const Field& u, const OperatorBundle& ops);
std::vector<double> convection_stage1_rhs(const Field& u1, const std::vector<double>& f1,
                                          const std::vector<double>& s_n, const OperatorBundle& ops);
// second stage in convex form: 1/2 B u1 + 1/2 (B(u2 + tau S^{n+1}) - tau D f(u2))
std::vector<double> convection_stage2_rhs(const Field& u1, const Field& u2, const std::vector<double>& f2,
                                          const std::vector<double>& s_np1, const OperatorBundle& ops);

struct StageOptions {
    LimiterSettings limiter;
    std::optional<std::array<double, 2>> boundary;  // Dirichlet values for this stage
    LimiterStats* stats = nullptr;
};

Field diffusion_half_step(const Field& u, const OperatorBundle& ops, const StageOptions& opt = {});
Field convection_stage1(const Field& u1, const FluxSpec& flux, double t_n, const OperatorBundle& ops,
                        const StageOptions& opt = {});
Field convection_stage2(const Field& u1, const Field& u2, const FluxSpec& flux, double t_n, double t_np1,
                        const OperatorBundle& ops, const StageOptions& opt = {});

// Sequential stepper for one or two coupled fields with reusable buffers.
class Stepper1D {
public:
    Stepper1D(const GridSpec& grid, double nu, double tau, LimiterSettings limiter);

    const OperatorBundle& operators() const { return ops_; }
    const GridSpec& grid() const { return grid_; }

    void step(Field& u, const FluxSpec& flux, double t_n, const BoundaryData& bc = {});
    void step(Field& u, Field& v, const CoupledFluxSpec& flux, double t_n, const BoundaryData& bc_u = {},
              const BoundaryData& bc_v = {});

    // h * sum over nodes of (S^n + S^{n+1}) * tau / 2 for the last step
    const std::vector<double>& last_source_mass() const { return source_mass_; }
    const LimiterStats& last_stats() const { return stats_; }

private:
    using FluxEval = std::function<void(const std::vector<std::vector<double>>&, std::vector<std::vector<double>>&)>;
    void step_impl(std::vector<std::vector<double>>& comps, const FluxEval& flux,
                   const std::vector<Source1D>& sources, double t_n, const std::vector<const BoundaryData*>& bcs);
    void diffuse(std::vector<double>& u, const BoundaryData* bc, double t_bc);
    void limit_convection(std::vector<double>& u);
    void pin(std::vector<double>& u, const BoundaryData* bc, double t);

    GridSpec grid_;
    OperatorBundle ops_;
    LimiterSettings lim_;
    BoundLimiter bp_;
    TvbLimiter tvb_;
    LimiterStats stats_;
    std::vector<double> source_mass_;
    std::vector<double> x_;
    // per component stage buffers
    std::vector<std::vector<double>> u1_, u2_, f1_, f2_, sn_, snp1_, tmp_;
};

struct StepMetrics {
    std::size_t step = 0;
    double time = 0.0;
    double mass_err = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    std::size_t clamped_points = 0;
};

using MetricsSeries = std::vector<StepMetrics>;

struct Problem1D {
    GridSpec grid;
    double t0 = 0.0;
    std::size_t components = 1;
    FluxSpec flux;
    CoupledFluxSpec coupled;
    std::array<std::function<double(double)>, 2> initial;
    std::array<BoundaryData, 2> boundary;
};

struct RunResult {
    std::vector<Field> fields;
    MetricsSeries metrics;
    double wall_time_s = 0.0;
};

class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& what, std::size_t step) : std::runtime_error(what), step(step) {}
    std::size_t step;
};

RunResult integrate(const Problem1D& problem, const StepPlan& plan);

}  // namespace hocbp
