#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hocbp/field.hpp"
#include "hocbp/splitting1d.hpp"
#include "hocbp/splitting2d.hpp"

namespace hocbp {

class UnknownProblemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ProblemSpec {
    std::string name;
    std::string description;
    int dim = 1;
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{1.0, 1.0};
    Boundary bc = Boundary::Periodic;
    std::size_t default_N = 100;
    double t0 = 0.0;
    double T = 1.0;
    double nu = 0.0;
    double f_prime_bound = 0.0;
    double g_prime_bound = 0.0;
    // default step as a function of the spacing
    std::function<double(double h)> default_tau;
    // bounds for the limiter; empty means extrema of the initial data
    std::optional<std::array<double, 2>> bounds;
    // false where the default step exceeds the sufficient conditions
    bool check_precondition = true;
    std::size_t components = 1;

    FluxSpec flux;
    CoupledFluxSpec coupled;
    std::function<double(double x)> initial1;
    std::function<double(double x, double t)> exact1;

    FluxSpec2D flux2;
    std::function<double(double x, double y)> initial2;
    std::function<double(double x, double y, double t)> exact2;
    BoundaryData2D boundary2;

    bool reference_by_fine_run = false;
    std::size_t reference_N = 0;

    GridSpec grid(std::size_t N) const;
    bool has_exact() const { return dim == 1 ? bool(exact1) : bool(exact2); }
    Field initial_field(const GridSpec& g, std::size_t component = 0) const;
    Field exact_field(const GridSpec& g, double t) const;
    std::array<double, 2> limiter_bounds(const GridSpec& g) const;
    Problem1D problem1d(const GridSpec& g) const;
    Problem2D problem2d(const GridSpec& g) const;
};

const std::vector<ProblemSpec>& problem_registry();
const ProblemSpec& find_problem(const std::string& name);
std::vector<std::string> problem_names();

}  // namespace hocbp
