#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hocbp/field.hpp"
#include "hocbp/problems.hpp"
#include "hocbp/splitting1d.hpp"

namespace hocbp {

struct RunConfig {
    std::string problem;
    std::optional<std::size_t> N;
    std::optional<double> tau;
    std::optional<double> cfl;  // tau = cfl * h / max(|f'|, |g'|)
    std::optional<double> nu;
    std::optional<double> T;
    LimiterMode limiter = LimiterMode::None;
    double tvb_M = 1.0;
    bool strict = false;
    std::optional<bool> check_precondition;
    std::optional<std::size_t> reference_N;
    bool tau_h2 = false;  // tau = h^2 unless --tau is given
};

class ConditionAbort : public std::runtime_error {
public:
    ConditionAbort(const std::string& what, ConditionReport report)
        : std::runtime_error(what), report(std::move(report)) {}
    ConditionReport report;
};

struct RunSummary {
    std::string problem;
    GridSpec grid;
    std::size_t N = 0;
    double tau = 0.0;
    std::size_t nt = 0;
    double nu = 0.0;
    double T = 0.0;
    LimiterMode limiter = LimiterMode::None;
    double m = 0.0;
    double M = 1.0;
    ConditionReport conditions;
    RunResult result;
    std::optional<ErrorNorms> errors;
    BoundsReport bounds;
    double mass_err = 0.0;
    double max_abs_mass_err = 0.0;
    std::vector<std::string> warnings;
};

// Resolved step size following --tau, then --cfl, then the problem default.
double resolve_tau(const ProblemSpec& p, const RunConfig& cfg, double h);

RunSummary run_single(const RunConfig& cfg);

// Fine self-run restricted to the nodes of `coarse`.
Field reference_solution(const ProblemSpec& p, const RunConfig& cfg, const GridSpec& coarse);

struct ConvergenceRow {
    std::size_t N = 0;
    double linf_error = 0.0;
    std::optional<double> linf_order;
    double l2_error = 0.0;
    std::optional<double> l2_order;
    double m_err = 0.0;
    double M_err = 0.0;
    double mass_err = 0.0;
    double wall_time_s = 0.0;
};

// Runs every N concurrently; orders between consecutive rows.
std::vector<ConvergenceRow> run_convergence(const RunConfig& cfg, const std::vector<std::size_t>& N_list);

double observed_order(double e_coarse, double e_fine, double N_coarse, double N_fine);

std::vector<RunSummary> compare_limiter_modes(const RunConfig& cfg, const std::vector<LimiterMode>& modes);

void write_field_csv(std::ostream& os, const std::vector<Field>& fields);
void write_metrics_csv(std::ostream& os, const MetricsSeries& metrics);
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
void write_comparison_csv(std::ostream& os, const std::vector<RunSummary>& runs);
std::string summary_line(const RunSummary& s);

}  // namespace hocbp
