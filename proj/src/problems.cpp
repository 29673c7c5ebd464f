#include "hocbp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hocbp {

namespace {

using std::numbers::pi;

ProblemSpec example1() {
    ProblemSpec p;
    p.name = "example1";
    p.description = "linear convection-diffusion u_t + u_x = nu u_xx, Gaussian exact solution, Dirichlet";
    p.lower = {0.0, 0.0};
    p.upper = {5.0, 1.0};
    p.bc = Boundary::Dirichlet;
    p.default_N = 500;
    p.T = 2.0;
    p.nu = 5e-4;
    p.f_prime_bound = 1.0;
    p.default_tau = [](double h) { return h / 3.0; };
    p.bounds = std::array<double, 2>{0.0, 1.0};
    const double nu = p.nu;
    p.flux.f = [](double u) { return u; };
    p.flux.f_prime_bound = 1.0;
    p.exact1 = [nu](double x, double t) {
        const double s = 1.0 + t;
        return std::exp(-(x - s) * (x - s) / (4.0 * nu * s)) / std::sqrt(s);
    };
    return p;
}

ProblemSpec burgers_1d(const std::string& name) {
    ProblemSpec p;
    p.name = name;
    p.flux.f = [](double u) { return 0.5 * u * u; };
    p.nu = 5e-4;
    return p;
}

ProblemSpec example2_case1() {
    ProblemSpec p = burgers_1d("example2-case1");
    p.description = "viscous Burgers, decaying front x/t profile on [0,3], t in [1,4], Dirichlet";
    p.lower = {0.0, 0.0};
    p.upper = {3.0, 1.0};
    p.bc = Boundary::Dirichlet;
    p.default_N = 200;
    p.t0 = 1.0;
    p.T = 4.0;
    p.f_prime_bound = 0.25;
    p.default_tau = [](double h) { return h / (3.0 * 0.25); };
    const double nu = p.nu;
    p.exact1 = [nu](double x, double t) {
        const double e = std::exp((x * x - 0.25 * t) / (4.0 * nu * t));
        return (x / t) / (1.0 + std::sqrt(t) * e);
    };
    return p;
}

ProblemSpec example2_case2() {
    ProblemSpec p = burgers_1d("example2-case2");
    p.description = "viscous Burgers, travelling tanh front between 1 and 2 on [-1,3], Dirichlet";
    p.lower = {-1.0, 0.0};
    p.upper = {3.0, 1.0};
    p.bc = Boundary::Dirichlet;
    p.default_N = 600;
    p.T = 0.5;
    p.f_prime_bound = 2.0;
    p.default_tau = [](double h) { return h / 6.0; };
    p.bounds = std::array<double, 2>{1.0, 2.0};
    const double nu = p.nu;
    p.exact1 = [nu](double x, double t) { return 1.5 - 0.5 * std::tanh(0.5 * (x - 1.5 * t) / (2.0 * nu)); };
    return p;
}

ProblemSpec example2_case3() {
    ProblemSpec p = burgers_1d("example2-case3");
    p.description = "viscous Burgers from sin(2 pi x), periodic, shock formation";
    p.lower = {0.0, 0.0};
    p.upper = {1.0, 1.0};
    p.bc = Boundary::Periodic;
    p.default_N = 500;
    p.T = 2.0;
    p.nu = 1e-3;
    p.f_prime_bound = 1.0;
    p.default_tau = [](double h) { return h / 2.0; };
    p.bounds = std::array<double, 2>{-1.0, 1.0};
    p.check_precondition = false;
    p.initial1 = [](double x) { return std::sin(2.0 * pi * x); };
    return p;
}

ProblemSpec example3() {
    ProblemSpec p;
    p.name = "example3";
    p.description = "coupled viscous Burgers system, exact exp(-t) sin x for both fields, Dirichlet";
    p.lower = {-pi, 0.0};
    p.upper = {pi, 1.0};
    p.bc = Boundary::Dirichlet;
    p.default_N = 100;
    p.T = 1.0;
    p.nu = 1.0;
    p.f_prime_bound = 3.0;
    p.default_tau = [](double h) { return h * h; };
    p.bounds = std::array<double, 2>{-1.0, 1.0};
    p.components = 2;
    p.coupled.fu = [](double u, double v) { return -u * u + u * v; };
    p.coupled.fv = [](double u, double v) { return -v * v + u * v; };
    p.coupled.f_prime_bound = 3.0;
    p.exact1 = [](double x, double t) { return std::exp(-t) * std::sin(x); };
    return p;
}

ProblemSpec example4() {
    ProblemSpec p;
    p.name = "example4";
    p.description = "2D Burgers with manufactured source, exact 2 exp(-t) sin(pi x) sin(pi y), periodic";
    p.dim = 2;
    p.lower = {0.0, 0.0};
    p.upper = {2.0, 2.0};
    p.bc = Boundary::Periodic;
    p.default_N = 100;
    p.T = 2.0;
    p.nu = 5e-5;
    p.f_prime_bound = 2.0;
    p.g_prime_bound = 2.0;
    p.default_tau = [](double h) { return h / 12.0; };
    p.bounds = std::array<double, 2>{-2.0, 2.0};
    const double nu = p.nu;
    p.flux2.f = [](double, double, double u) { return 0.5 * u * u; };
    p.flux2.g = [](double, double, double u) { return 0.5 * u * u; };
    p.flux2.f_prime_bound = 2.0;
    p.flux2.g_prime_bound = 2.0;
    p.exact2 = [](double x, double y, double t) { return 2.0 * std::exp(-t) * std::sin(pi * x) * std::sin(pi * y); };
    p.flux2.source = [nu](double x, double y, double t) {
        const double e = 2.0 * std::exp(-t);
        const double u = e * std::sin(pi * x) * std::sin(pi * y);
        const double ux = e * pi * std::cos(pi * x) * std::sin(pi * y);
        const double uy = e * pi * std::sin(pi * x) * std::cos(pi * y);
        return -u + u * (ux + uy) + 2.0 * nu * pi * pi * u;
    };
    return p;
}

ProblemSpec example6_case1() {
    ProblemSpec p;
    p.name = "example6-case1";
    p.description = "rotating Gaussian pulse in velocity (-4y, 4x) on [-0.5,0.5]^2, exact Dirichlet data";
    p.dim = 2;
    p.lower = {-0.5, -0.5};
    p.upper = {0.5, 0.5};
    p.bc = Boundary::Dirichlet;
    p.default_N = 100;
    p.T = 0.25;
    p.nu = 5e-3;
    p.f_prime_bound = 4.0;
    p.g_prime_bound = 4.0;
    p.default_tau = [](double h) { return h / 24.0; };
    p.bounds = std::array<double, 2>{0.0, 1.0};
    p.flux2.f = [](double, double y, double u) { return -4.0 * y * u; };
    p.flux2.g = [](double x, double, double u) { return 4.0 * x * u; };
    p.flux2.f_prime_bound = 4.0;
    p.flux2.g_prime_bound = 4.0;
    const double nu = p.nu;
    p.exact2 = [nu](double x, double y, double t) {
        const double s2 = 5e-4, x0 = -0.35, y0 = 0.0;
        const double xb = x * std::cos(4.0 * t) + y * std::sin(4.0 * t);
        const double yb = -x * std::sin(4.0 * t) + y * std::cos(4.0 * t);
        const double r2 = (xb - x0) * (xb - x0) + (yb - y0) * (yb - y0);
        return s2 / (s2 + 2.0 * nu * t) * std::exp(-r2 / (2.0 * s2 + 4.0 * nu * t));
    };
    p.boundary2 = p.exact2;
    return p;
}

// max over the unit square of |d/dy (exp(sin pi x) exp(sin pi y)) / 2|
double vortex_speed_bound() {
    const double s = (std::sqrt(5.0) - 1.0) / 2.0;  // sin theta at the maximiser of cos e^sin
    return 0.5 * pi * std::exp(1.0) * std::sqrt(1.0 - s * s) * std::exp(s);
}

ProblemSpec example6_case2() {
    ProblemSpec p;
    p.name = "example6-case2";
    p.description = "Gaussian hump in a divergence-free vortex field on [0,1]^2, zero Dirichlet";
    p.dim = 2;
    p.lower = {0.0, 0.0};
    p.upper = {1.0, 1.0};
    p.bc = Boundary::Dirichlet;
    p.default_N = 200;
    p.T = 1.0;
    p.nu = 5e-4;
    const double vmax = vortex_speed_bound();
    p.f_prime_bound = vmax;
    p.g_prime_bound = vmax;
    p.default_tau = [vmax](double h) { return h / (6.0 * vmax); };
    p.bounds = std::array<double, 2>{0.0, 1.0};
    auto psi = [](double x, double y) { return 0.5 * std::exp(std::sin(pi * x)) * std::exp(std::sin(pi * y)); };
    // (c1, c2) = (psi_y, -psi_x)
    p.flux2.f = [psi](double x, double y, double u) { return psi(x, y) * pi * std::cos(pi * y) * u; };
    p.flux2.g = [psi](double x, double y, double u) { return -psi(x, y) * pi * std::cos(pi * x) * u; };
    p.flux2.f_prime_bound = vmax;
    p.flux2.g_prime_bound = vmax;
    p.initial2 = [](double x, double y) {
        const double s2 = 1.6e-3;
        return std::exp(-((x - 0.75) * (x - 0.75) + (y - 0.5) * (y - 0.5)) / (2.0 * s2));
    };
    p.boundary2 = [](double, double, double) { return 0.0; };
    p.reference_by_fine_run = true;
    p.reference_N = 1000;
    return p;
}

ProblemSpec example6_case3() {
    ProblemSpec p;
    p.name = "example6-case3";
    p.description = "square wave in velocity (sin pi y, sin pi x), periodic unit square";
    p.dim = 2;
    p.lower = {0.0, 0.0};
    p.upper = {1.0, 1.0};
    p.bc = Boundary::Periodic;
    p.default_N = 200;
    p.T = 0.5;
    p.nu = 1e-3;
    p.f_prime_bound = 1.0;
    p.g_prime_bound = 1.0;
    p.default_tau = [](double h) { return h / 2.0; };
    p.bounds = std::array<double, 2>{0.0, 1.0};
    p.check_precondition = false;
    p.flux2.f = [](double, double y, double u) { return std::sin(pi * y) * u; };
    p.flux2.g = [](double x, double, double u) { return std::sin(pi * x) * u; };
    p.flux2.f_prime_bound = 1.0;
    p.flux2.g_prime_bound = 1.0;
    p.initial2 = [](double x, double y) { return (x >= 0.1 && x <= 0.3 && y >= 0.1 && y <= 0.3) ? 1.0 : 0.0; };
    return p;
}

ProblemSpec example7() {
    ProblemSpec p;
    p.name = "example7";
    p.description = "cubic flux in x, quadratic in y, disc initial data on [-2,5]^2, zero Dirichlet";
    p.dim = 2;
    p.lower = {-2.0, -2.0};
    p.upper = {5.0, 5.0};
    p.bc = Boundary::Dirichlet;
    p.default_N = 600;
    p.T = 1.0;
    p.nu = 5e-3;
    p.f_prime_bound = 2.6875;
    p.g_prime_bound = 3.0;
    p.default_tau = [](double h) { return h / (6.0 * 2.6875); };
    p.bounds = std::array<double, 2>{0.0, 1.0};
    p.check_precondition = false;
    p.flux2.f = [](double, double, double u) {
        const double d = u - 0.25;
        return u + d * d * d;
    };
    p.flux2.g = [](double, double, double u) { return -(u + u * u); };
    p.flux2.f_prime_bound = 2.6875;
    p.flux2.g_prime_bound = 3.0;
    p.initial2 = [](double x, double y) {
        return (x - 0.25) * (x - 0.25) + (y - 2.25) * (y - 2.25) < 0.5 ? 1.0 : 0.0;
    };
    p.boundary2 = [](double, double, double) { return 0.0; };
    return p;
}

ProblemSpec example8() {
    ProblemSpec p;
    p.name = "example8";
    p.description = "two-phase S-shaped fluxes with gravity in x, disc initial data on [-3,3]^2, zero Dirichlet";
    p.dim = 2;
    p.lower = {-3.0, -3.0};
    p.upper = {3.0, 3.0};
    p.bc = Boundary::Dirichlet;
    p.default_N = 600;
    p.T = 0.5;
    p.nu = 4e-3;
    // sampled maxima of |f'| and |g'| over [0, 1]
    p.f_prime_bound = 3.3105;
    p.g_prime_bound = 2.0;
    p.default_tau = [](double h) { return h / (6.0 * 3.13); };
    p.bounds = std::array<double, 2>{0.0, 1.0};
    auto g = [](double u) { return u * u / (u * u + (1.0 - u) * (1.0 - u)); };
    p.flux2.g = [g](double, double, double u) { return g(u); };
    p.flux2.f = [g](double, double, double u) { return g(u) * (1.0 - 5.0 * (1.0 - u) * (1.0 - u)); };
    p.flux2.f_prime_bound = p.f_prime_bound;
    p.flux2.g_prime_bound = p.g_prime_bound;
    p.initial2 = [](double x, double y) { return x * x + y * y < 0.5 ? 1.0 : 0.0; };
    p.boundary2 = [](double, double, double) { return 0.0; };
    return p;
}

std::vector<ProblemSpec> build_registry() {
    std::vector<ProblemSpec> r{example1(),       example2_case1(), example2_case2(), example2_case3(),
                               example3(),       example4(),       example6_case1(), example6_case2(),
                               example6_case3(), example7(),       example8()};
    for (auto& p : r) {
        // exact solutions double as initial and boundary data
        if (p.dim == 1 && p.exact1 && !p.initial1) {
            auto ex = p.exact1;
            double t0 = p.t0;
            p.initial1 = [ex, t0](double x) { return ex(x, t0); };
        }
        if (p.dim == 2 && p.exact2 && !p.initial2) {
            auto ex = p.exact2;
            double t0 = p.t0;
            p.initial2 = [ex, t0](double x, double y) { return ex(x, y, t0); };
        }
        if (p.dim == 1) p.flux.f_prime_bound = p.f_prime_bound;
    }
    return r;
}

}  // namespace

GridSpec ProblemSpec::grid(std::size_t N) const {
    if (dim == 1) return GridSpec::line(lower[0], upper[0], N, bc);
    return GridSpec::rect(lower[0], upper[0], lower[1], upper[1], N, N, bc);
}

Field ProblemSpec::initial_field(const GridSpec& g, std::size_t component) const {
    (void)component;
    if (dim == 1) return sample(g, initial1);
    return sample(g, initial2);
}

Field ProblemSpec::exact_field(const GridSpec& g, double t) const {
    if (!has_exact()) throw std::logic_error("problem " + name + " has no closed-form solution");
    if (dim == 1) return sample(g, [&](double x) { return exact1(x, t); });
    return sample(g, [&](double x, double y) { return exact2(x, y, t); });
}

std::array<double, 2> ProblemSpec::limiter_bounds(const GridSpec& g) const {
    if (bounds) return *bounds;
    Field u0 = initial_field(g);
    auto [lo, hi] = std::minmax_element(u0.values.begin(), u0.values.end());
    return {*lo, *hi};
}

Problem1D ProblemSpec::problem1d(const GridSpec& g) const {
    if (dim != 1) throw DimensionError(name + " is not a 1D problem");
    Problem1D p;
    p.grid = g;
    p.t0 = t0;
    p.components = components;
    p.flux = flux;
    p.coupled = coupled;
    p.initial = {initial1, initial1};
    if (bc == Boundary::Dirichlet && exact1) {
        auto ex = exact1;
        const double a = g.lower[0], b = g.upper[0];
        BoundaryData bd = [ex, a, b](double t) { return std::array<double, 2>{ex(a, t), ex(b, t)}; };
        p.boundary = {bd, bd};
    }
    return p;
}

Problem2D ProblemSpec::problem2d(const GridSpec& g) const {
    if (dim != 2) throw DimensionError(name + " is not a 2D problem");
    Problem2D p;
    p.grid = g;
    p.t0 = t0;
    p.flux = flux2;
    p.initial = initial2;
    p.boundary = boundary2;
    return p;
}

const std::vector<ProblemSpec>& problem_registry() {
    static const std::vector<ProblemSpec> reg = build_registry();
    return reg;
}

std::vector<std::string> problem_names() {
    std::vector<std::string> out;
    for (const auto& p : problem_registry()) out.push_back(p.name);
    return out;
}

const ProblemSpec& find_problem(const std::string& name) {
    for (const auto& p : problem_registry())
        if (p.name == name) return p;
    std::string msg = "unknown problem '" + name + "'; available:";
    for (const auto& n : problem_names()) msg += " " + n;
    throw UnknownProblemError(msg);
}

}  // namespace hocbp
