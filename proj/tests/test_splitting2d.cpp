#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hocbp/problems.hpp"
#include "hocbp/splitting1d.hpp"
#include "hocbp/splitting2d.hpp"
#include "oracles.hpp"

using namespace hocbp;
using std::numbers::pi;
using oracle::Dense;

namespace {

Field random_field(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Field f(g);
    for (auto& v : f.values) v = U(rng);
    return f;
}

double amp(double h, double nu, double tau) {
    const double s = 4.0 / (h * h) * std::pow(std::sin(pi * h), 2);
    const double a = 1.0 - h * h / 12.0 * s, b = tau * nu / 4.0 * s;
    return (a - b) / (a + b);
}

// BxBy - tau (By Dx diag(c1) + Bx Dy diag(c2)) on an n-by-n periodic grid
Dense convection_matrix(std::size_t n, double h, double tau, const std::vector<double>& c1,
                        const std::vector<double>& c2) {
    const Dense B = oracle::B(n, true), D = oracle::centered(n, h, true);
    Dense M = oracle::kron_xy(B, B);
    M = oracle::add(M, oracle::mul(oracle::kron_xy(B, D), oracle::diag(c1)), -tau);
    M = oracle::add(M, oracle::mul(oracle::kron_xy(D, B), oracle::diag(c2)), -tau);
    return M;
}

std::vector<double> nodal(const GridSpec& g, double (*c)(double, double)) {
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < g.nodes(1); ++j)
        for (std::size_t i = 0; i < g.nodes(0); ++i) v[j * g.nodes(0) + i] = c(g.coord(0, i), g.coord(1, j));
    return v;
}

double c1_fn(double, double y) { return std::cos(2 * pi * y); }
double c2_fn(double x, double) { return 0.5 * std::sin(2 * pi * x); }

FluxSpec2D variable_linear() {
    return {[](double x, double y, double u) { return c1_fn(x, y) * u; },
            [](double x, double y, double u) { return c2_fn(x, y) * u; }, 1.0, 0.5, {}};
}

}  // namespace

TEST_SUITE("splitting2d") {

TEST_CASE("conditions in two dimensions") {
    auto g = GridSpec::rect(0, 2, 0, 2, 50, 50, Boundary::Periodic);
    const double h = g.spacing(0);
    auto r = check_conditions_2d(1e-6, h / 12, g, 2.0, 2.0);
    CHECK(r.all_ok());
    CHECK(r.cfl == doctest::Approx(1.0 / 3));
    auto bad = check_conditions_2d(1e-6, h / 4, g, 1.0, 1.0);
    CHECK(bad.cfl == doctest::Approx(0.5));
    CHECK_FALSE(bad.convection_ok);
    auto z = check_conditions_2d(0.0, h / 12, g, 2.0, 2.0);
    CHECK(z.diffusion_ok);
    CHECK_FALSE(z.diffusion_limiter_needed);
    auto uneq = check_conditions_2d(1e-3, 1e-3, GridSpec::rect(0, 1, 0, 2, 10, 10, Boundary::Periodic), 1, 1);
    CHECK_FALSE(uneq.equal_mesh_ratios);
    CHECK_FALSE(uneq.warnings.empty());
    CHECK_THROWS_AS(check_conditions_2d(0, 0.1, GridSpec::line(0, 1, 8, Boundary::Periodic), 1, 1), DimensionError);
}

TEST_CASE("ADI diffusion half step") {
    const std::size_t n = 8;
    auto g = GridSpec::rect(0, 1, 0, 1, n, n, Boundary::Periodic);
    const double h = g.spacing(0), nu = 0.02, tau = 0.004;
    auto ops = build_operator_bundle(nu, tau, g);
    SUBCASE("constant stays") {
        Field c = adi_diffusion_half_step(Field(g, 0.4), ops);
        for (double v : c.values) CHECK(v == doctest::Approx(0.4));
    }
    SUBCASE("separable Fourier mode") {
        auto g16 = GridSpec::rect(0, 1, 0, 1, 16, 16, Boundary::Periodic);
        auto ops16 = build_operator_bundle(nu, tau, g16);
        Field s = sample(g16, [](double x, double y) { return std::sin(2 * pi * x) * std::sin(2 * pi * y); });
        Field out = adi_diffusion_half_step(s, ops16);
        const double a = amp(1.0 / 16, nu, tau);
        for (std::size_t k = 0; k < s.size(); ++k)
            CHECK(out[k] == doctest::Approx(a * a * s[k]).scale(1.0).epsilon(1e-13));
    }
    SUBCASE("dense tensor-product oracle") {
        Field r = random_field(g, 1);
        const Dense A = oracle::A(n, true), D = oracle::second_diff(n, h, true);
        const Dense H1 = oracle::add(A, D, -tau * nu / 4), H2 = oracle::add(A, D, tau * nu / 4);
        auto ref = oracle::solve(oracle::kron_xy(H1, H1), oracle::apply(oracle::kron_xy(H2, H2), r.values));
        Field out = adi_diffusion_half_step(r, ops);
        CHECK(oracle::max_abs_diff(ref, out.values) < 1e-13);
        CHECK(mass(out) == doctest::Approx(mass(r)).epsilon(1e-13));
    }
}

TEST_CASE("ADI convection stages") {
    const std::size_t n = 16;
    auto g = GridSpec::rect(0, 1, 0, 1, n, n, Boundary::Periodic);
    const double h = g.spacing(0), tau = h / 6;
    auto ops = build_operator_bundle(0.0, tau, g);
    const auto c1 = nodal(g, c1_fn), c2 = nodal(g, c2_fn);
    const Dense BB = oracle::kron_xy(oracle::B(n, true), oracle::B(n, true));
    const Dense M = convection_matrix(n, h, tau, c1, c2);
    const FluxSpec2D lin = variable_linear();
    SUBCASE("zero fluxes") {
        Field r = random_field(g, 2);
        CHECK(oracle::max_abs_diff(convection_stage1_2d(r, FluxSpec2D{}, 0.0, ops).values, r.values) < 1e-15);
        CHECK(oracle::max_abs_diff(convection_stage2_2d(r, r, FluxSpec2D{}, 0.0, ops).values, r.values) < 1e-15);
    }
    SUBCASE("spike matches the dense nine-point operator") {
        Field e(g, 0.0);
        e.at(5, 9) = 1.0;
        Field out = convection_stage1_2d(e, lin, 0.0, ops);
        auto ref = oracle::solve(BB, oracle::apply(M, e.values));
        CHECK(oracle::max_abs_diff(out.values, ref) < 1e-12);
        CHECK(mass(out) == doctest::Approx(mass(e)).epsilon(1e-13));
    }
    SUBCASE("second stage: convex form equals the direct form") {
        Field u2 = random_field(g, 3);
        Field u3 = convection_stage1_2d(u2, lin, 0.0, ops);
        Field out = convection_stage2_2d(u2, u3, lin, 0.0, ops);
        // BxBy u4 = BxBy u2 - tau/2 (By Dx (f2 + f3) + Bx Dy (g2 + g3))
        auto rhs = oracle::apply(oracle::add(BB, M), u2.values);
        auto r3 = oracle::apply(oracle::add(M, BB, -1.0), u3.values);
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = 0.5 * (rhs[k] + r3[k]);
        auto ref = oracle::solve(BB, rhs);
        CHECK(oracle::max_abs_diff(out.values, ref) < 1e-13);
    }
    SUBCASE("mass gains the trapezoidal source") {
        FluxSpec2D src = lin;
        src.source = [](double x, double y, double t) { return 1.0 + std::sin(2 * pi * x) * y + t; };
        Field u2 = random_field(g, 4);
        Field u3 = convection_stage1_2d(u2, src, 0.1, ops);
        Field out = convection_stage2_2d(u2, u3, src, 0.1, ops);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                s += src.source(g.coord(0, i), g.coord(1, j), 0.1) + src.source(g.coord(0, i), g.coord(1, j), 0.1 + tau);
        CHECK(mass(out) == doctest::Approx(mass(u2) + 0.5 * tau * h * h * s).epsilon(1e-13));
    }
}

TEST_CASE("weak monotonicity of the nine-point stage weights") {
    const std::size_t n = 8;
    auto g = GridSpec::rect(0, 1, 0, 1, n, n, Boundary::Periodic);
    const double h = g.spacing(0);
    const std::vector<double> one(n * n, 1.0);
    for (double cfl : {0.1, 0.2, 1.0 / 3, 0.3667, 0.5}) {
        // equal speeds on both axes: cfl = 2 lambda a
        const double tau = cfl * h / 2.0;
        const Dense M = convection_matrix(n, h, tau, one, one);
        const Dense BB = oracle::kron_xy(oracle::B(n, true), oracle::B(n, true));
        const Dense M2 = oracle::scale(oracle::add(BB, M), 0.5);
        // the library applies exactly this operator
        auto ops = build_operator_bundle(0.0, tau, g);
        FluxSpec2D lin{[](double, double, double u) { return u; }, [](double, double, double u) { return u; }, 1, 1, {}};
        Field r = random_field(g, 7);
        CHECK(oracle::max_abs_diff(convection_stage1_2d(r, lin, 0.0, ops).values,
                                   oracle::solve(BB, oracle::apply(M, r.values))) < 1e-12);
        auto rep = check_conditions_2d(0.0, tau, g, 1.0, 1.0);
        INFO("cfl " << cfl);
        CHECK((oracle::min_entry(M) >= -1e-15) == rep.convection_ok);
        // the second stage mixes in BxBy, so its weights stay non-negative at least as long
        if (rep.convection_ok) CHECK(oracle::min_entry(M2) >= -1e-15);
    }
    for (double nm : {0.2, 1.0, 5.0 / 3, 1.8}) {
        const double tau = 0.01, nu = nm * h * h / tau;
        const Dense A = oracle::A(n, true), D = oracle::second_diff(n, h, true);
        const Dense H2 = oracle::add(A, D, tau * nu / 4);
        auto rep = check_conditions_2d(nu, tau, g, 0.0, 0.0);
        INFO("nu_mu " << nm);
        CHECK((oracle::min_entry(oracle::kron_xy(H2, H2)) >= -1e-15) == rep.diffusion_ok);
    }
}

TEST_CASE("full step") {
    auto g = GridSpec::rect(0, 1, 0, 1, 12, 12, Boundary::Periodic);
    SUBCASE("identity without physics") {
        Field r = random_field(g, 5);
        StepPlan plan = make_plan(0.0, 0.0, 0.01, 0.01, {});
        Field out = strang_adi_step(r, plan, FluxSpec2D{}, 0.0);
        CHECK(oracle::max_abs_diff(out.values, r.values) < 1e-15);
    }
    SUBCASE("mass identity over a run with a source") {
        Problem2D p;
        p.grid = g;
        p.flux = variable_linear();
        p.flux.source = [](double x, double y, double t) { return std::cos(2 * pi * x) * std::sin(2 * pi * y) + 0.2 * t; };
        p.initial = [](double x, double y) { return 1.0 + 0.3 * std::sin(2 * pi * (x + y)); };
        auto r = integrate_2d(p, make_plan(1e-3, 0.0, 0.2, g.spacing(0) / 10, {}));
        const double m0 = mass(sample(g, p.initial));
        for (const auto& m : r.metrics) CHECK(std::abs(m.mass_err) <= 1e-12 * m0);
    }
}

TEST_CASE("y-independent data reduces to the 1D stepper") {
    const std::size_t nx = 24, ny = 6;
    auto g2 = GridSpec::rect(0, 1, 0, 0.25, nx, ny, Boundary::Periodic);
    auto g1 = GridSpec::line(0, 1, nx, Boundary::Periodic);
    const double nu = 2e-3, tau = 0.25 / nx;
    auto prof = [](double x) { return 0.5 + 0.4 * std::sin(2 * pi * x); };
    Field u2 = sample(g2, [&](double x, double) { return prof(x); });
    Field u1 = sample(g1, prof);
    LimiterSettings lim{LimiterMode::BP, 0.0, 1.0, 1.0, true};
    AdiStepper s2(g2, nu, tau, lim);
    Stepper1D s1(g1, nu, tau, lim);
    FluxSpec2D f2{[](double, double, double u) { return 0.5 * u * u; }, {}, 1.0, 0.0, {}};
    FluxSpec f1{[](double u) { return 0.5 * u * u; }, 1.0, {}};
    for (int k = 0; k < 3; ++k) {
        s2.step(u2, f2, k * tau);
        s1.step(u1, f1, k * tau);
    }
    double err = 0.0;
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) err = std::max(err, std::abs(u2.at(i, j) - u1[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("dirichlet edges carry the boundary data") {
    const ProblemSpec& p = find_problem("example6-case1");
    auto g = p.grid(20);
    const double tau = g.spacing(0) * g.spacing(0);
    Field u = p.initial_field(g);
    AdiStepper st(g, p.nu, tau, {});
    st.step(u, p.flux2, p.t0, p.boundary2);
    const std::size_t n = g.nodes(0);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(u.at(i, 0) == p.boundary2(g.coord(0, i), g.coord(1, 0), p.t0 + tau));
        CHECK(u.at(i, n - 1) == p.boundary2(g.coord(0, i), g.coord(1, n - 1), p.t0 + tau));
        CHECK(u.at(0, i) == p.boundary2(g.coord(0, 0), g.coord(1, i), p.t0 + tau));
    }
}

TEST_CASE("bounds hold with the BP limiter on the rotating and vortex problems") {
    for (const char* name : {"example6-case1", "example6-case2", "example6-case3"}) {
        const ProblemSpec& p = find_problem(name);
        auto g = p.grid(40);
        const double h = g.spacing(0);
        const double tau = 0.9 * h / (3.0 * (p.f_prime_bound + p.g_prime_bound));
        auto b = p.limiter_bounds(g);
        LimiterSettings lim{LimiterMode::BP, b[0], b[1], 1.0, true};
        auto plan = make_plan(p.nu, p.t0, p.t0 + 0.2, tau, lim);
        auto rep = check_conditions_2d(p.nu, plan.tau, g, p.f_prime_bound, p.g_prime_bound);
        INFO(name);
        REQUIRE(rep.all_ok());
        auto r = integrate_2d(p.problem2d(g), plan);
        const double guard = rounding_guard(b[0], b[1]);
        for (const auto& m : r.metrics) {
            CHECK(m.min_u >= b[0] - guard);
            CHECK(m.max_u <= b[1] + guard);
        }
    }
}

}
