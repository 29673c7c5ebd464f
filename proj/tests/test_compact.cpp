#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hocbp/compact_ops.hpp"
#include "oracles.hpp"

using namespace hocbp;
using std::numbers::pi;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> v(n);
    for (auto& x : v) x = U(rng);
    return v;
}

oracle::Dense dense_of(const TridiagonalSystem& s) {
    const auto& st = s.stencil();
    return oracle::stencil(s.size(), st.left, st.center, st.right, s.topology() == Topology::Cyclic);
}

}  // namespace

TEST_SUITE("compact") {

TEST_CASE("second difference") {
    auto g = GridSpec::line(0.0, 1.0, 8, Boundary::Periodic);
    CHECK(oracle::max_abs(apply_second_difference(Field(g, 3.0), 0).values) < 1e-12);
    Field s = sample(g, [](double x) { return std::sin(2 * pi * x); });
    Field d = apply_second_difference(s, 0);
    const double h = g.spacing(0);
    const double sym = -4.0 / (h * h) * std::pow(std::sin(pi * h), 2);
    for (std::size_t i = 0; i < 8; ++i) CHECK(d[i] == doctest::Approx(sym * s[i]).epsilon(1e-12).scale(1.0));
    // stencil oracle
    auto ref = oracle::apply(oracle::second_diff(8, h, true), s.values);
    CHECK(oracle::max_abs_diff(ref, d.values) < 1e-12);

    auto gd = GridSpec::line(-1.0, 2.0, 12, Boundary::Dirichlet);
    Field q = sample(gd, [](double x) { return x * x; });
    Field dq = apply_second_difference(q, 0);
    for (std::size_t i = 1; i + 1 < gd.nodes(0); ++i) CHECK(dq[i] == doctest::Approx(2.0));
}

TEST_CASE("centered difference") {
    auto g = GridSpec::line(0.0, 1.0, 10, Boundary::Periodic);
    CHECK(oracle::max_abs(apply_centered_difference(Field(g, -2.0), 0).values) < 1e-14);
    Field lin = sample(g, [](double x) { return x; });
    Field d = apply_centered_difference(lin, 0);
    for (std::size_t i = 1; i + 1 < 10; ++i) CHECK(d[i] == doctest::Approx(1.0));
    Field spike(g, 0.0);
    spike[4] = 1.0;
    Field ds = apply_centered_difference(spike, 0);
    const double h = g.spacing(0);
    CHECK(ds[3] == doctest::Approx(1.0 / (2 * h)));
    CHECK(ds[5] == doctest::Approx(-1.0 / (2 * h)));
    CHECK(ds[4] == 0.0);
    CHECK(ds[0] == 0.0);
}

TEST_CASE("A and B averages") {
    auto g = GridSpec::line(0.0, 1.0, 8, Boundary::Periodic);
    for (auto* op : {&apply_A, &apply_B}) {
        Field c = (*op)(Field(g, 2.5), 0);
        for (double v : c.values) CHECK(v == doctest::Approx(2.5));
    }
    Field spike(g, 0.0);
    spike[2] = 1.0;
    Field a = apply_A(spike, 0);
    CHECK(a[1] == doctest::Approx(1.0 / 12));
    CHECK(a[2] == doctest::Approx(10.0 / 12));
    CHECK(a[3] == doctest::Approx(1.0 / 12));
    Field s = sample(g, [](double x) { return std::sin(2 * pi * x); });
    Field as = apply_A(s, 0);
    const double symA = 1.0 - std::pow(std::sin(pi / 8), 2) / 3.0;
    CHECK(symA == doctest::Approx(0.951184).epsilon(1e-6));
    for (std::size_t i = 0; i < 8; ++i) CHECK(as[i] == doctest::Approx(symA * s[i]).scale(1.0));
    Field bs = apply_B(s, 0);
    CHECK(oracle::max_abs_diff(bs.values, oracle::apply(oracle::B(8, true), s.values)) < 1e-15);
}

TEST_CASE("axis checks") {
    Field u(GridSpec::line(0, 1, 8, Boundary::Periodic));
    CHECK_THROWS_AS(apply_A(u, 1), DimensionError);
    CHECK_THROWS_AS(apply_second_difference(u, -1), DimensionError);
}

TEST_CASE("periodic sums are conserved") {
    auto g = GridSpec::line(0.0, 2.0, 17, Boundary::Periodic);
    Field v(g, random_vec(17, 11));
    const double s = oracle::kahan_sum(v.values);
    CHECK(std::abs(oracle::kahan_sum(apply_second_difference(v, 0).values)) < 1e-11);
    CHECK(std::abs(oracle::kahan_sum(apply_centered_difference(v, 0).values)) < 1e-13);
    CHECK(oracle::kahan_sum(apply_A(v, 0).values) == doctest::Approx(s).epsilon(1e-14));
    CHECK(oracle::kahan_sum(apply_B(v, 0).values) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("2D sweeps act on one axis") {
    auto g = GridSpec::rect(0, 1, 0, 1, 6, 5, Boundary::Periodic);
    Field u(g, random_vec(g.size(), 5));
    Field ay = apply_A(u, 1);
    auto ref = oracle::apply(oracle::kron_xy(oracle::A(5, true), oracle::identity(6)), u.values);
    CHECK(oracle::max_abs_diff(ay.values, ref) < 1e-15);
    Field dx = apply_centered_difference(u, 0);
    auto refx = oracle::apply(oracle::kron_xy(oracle::identity(5), oracle::centered(6, 1.0 / 6, true)), u.values);
    CHECK(oracle::max_abs_diff(dx.values, refx) < 1e-13);
}

TEST_CASE("fourth-order consistency of the compact pairs") {
    // periodic: sin; Dirichlet interior: exp
    struct Case {
        Boundary bc;
        double a, b;
        double (*u)(double);
        double (*u1)(double);
        double (*u2)(double);
    };
    const Case cases[] = {
        {Boundary::Periodic, 0.0, 1.0, [](double x) { return std::sin(2 * pi * x); },
         [](double x) { return 2 * pi * std::cos(2 * pi * x); },
         [](double x) { return -4 * pi * pi * std::sin(2 * pi * x); }},
        {Boundary::Dirichlet, 0.0, 1.0, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
         [](double x) { return std::exp(x); }},
    };
    for (const auto& c : cases) {
        double eA[3], eB[3];
        for (int r = 0; r < 3; ++r) {
            auto g = GridSpec::line(c.a, c.b, 16u << r, c.bc);
            Field u = sample(g, c.u);
            Field lhsA = apply_A(sample(g, c.u2), 0);
            Field rhsA = apply_second_difference(u, 0);
            Field lhsB = apply_B(sample(g, c.u1), 0);
            Field rhsB = apply_centered_difference(u, 0);
            eA[r] = eB[r] = 0.0;
            for (std::size_t i = 1; i + 1 < g.nodes(0); ++i) {
                eA[r] = std::max(eA[r], std::abs(lhsA[i] - rhsA[i]));
                eB[r] = std::max(eB[r], std::abs(lhsB[i] - rhsB[i]));
            }
        }
        for (int r = 0; r < 2; ++r) {
            CHECK(std::log2(eA[r] / eA[r + 1]) >= 3.7);
            CHECK(std::log2(eB[r] / eB[r + 1]) >= 3.7);
        }
    }
}

TEST_CASE("tridiagonal solves against a dense oracle") {
    for (Topology topo : {Topology::Cyclic, Topology::Plain}) {
        const bool cyc = topo == Topology::Cyclic;
        const double nm = 0.2;
        TridiagonalSystem h1(16, {(1 - 3 * nm) / 12, (10 + 6 * nm) / 12, (1 - 3 * nm) / 12}, topo, "H1", nm);
        auto rhs = random_vec(16, 21);
        auto x = h1.solve(rhs);
        auto res = oracle::apply(dense_of(h1), x);
        CHECK(oracle::max_abs_diff(res, rhs) <= 1e-12 * oracle::max_abs(rhs));
        auto ref = oracle::solve(dense_of(h1), rhs);
        CHECK(oracle::max_abs_diff(x, ref) < 1e-13);
        // round trip for every operator family
        for (Stencil3 s : {Stencil3{1.0 / 12, 10.0 / 12, 1.0 / 12}, Stencil3{1.0 / 6, 4.0 / 6, 1.0 / 6},
                           Stencil3{-0.05, 1.1, -0.05}}) {
            TridiagonalSystem sys(23, s, topo);
            auto v = random_vec(23, 4);
            auto back = sys.solve(sys.multiply(v));
            CHECK(oracle::max_abs_diff(back, v) <= 1e-12 * oracle::max_abs(v));
        }
        // strided solve matches the contiguous one
        std::vector<double> strided(16 * 3, 7.0);
        for (std::size_t i = 0; i < 16; ++i) strided[i * 3] = rhs[i];
        h1.solve_inplace(strided.data(), 3);
        for (std::size_t i = 0; i < 16; ++i) CHECK(strided[i * 3] == doctest::Approx(x[i]).epsilon(1e-15));
        CHECK(strided[1] == 7.0);
        (void)cyc;
    }
}

TEST_CASE("trivial solves") {
    TridiagonalSystem h1(12, {0.05, 0.9, 0.05}, Topology::Cyclic);
    auto x = h1.solve(std::vector<double>(12, 3.0));
    for (double v : x) CHECK(v == doctest::Approx(3.0));
    TridiagonalSystem id(9, {0.0, 1.0, 0.0}, Topology::Cyclic);
    auto r = random_vec(9, 2);
    CHECK(id.solve(r) == r);
}

TEST_CASE("singular system names nu_mu") {
    bool thrown = false;
    try {
        TridiagonalSystem bad(10, {1.0, -2.0, 1.0}, Topology::Cyclic, "H1x", 0.75);
    } catch (const SingularSystemError& e) {
        thrown = true;
        CHECK(std::string(e.what()).find("nu_mu = 0.75") != std::string::npos);
    }
    CHECK(thrown);
}

TEST_CASE("M-matrix characterization") {
    auto bundle_at = [](double nm) {
        // nu = nm, tau = h^2 = 1/64
        return build_operator_bundle(nm, 1.0 / 64, GridSpec::line(0, 1, 8, Boundary::Periodic));
    };
    CHECK(bundle_at(0.5).axes[0].H1.is_m_matrix());
    CHECK_FALSE(bundle_at(0.1).axes[0].H1.is_m_matrix());
    CHECK_FALSE(bundle_at(0.1).axes[0].A.is_m_matrix());
}

TEST_CASE("operator bundle") {
    auto g = GridSpec::line(0, 1, 20, Boundary::Periodic);
    const double h = g.spacing(0);
    SUBCASE("nu = 0 gives H1 = H2 = A") {
        auto b = build_operator_bundle(0.0, 0.01, g);
        const auto& ax = b.axes[0];
        for (const auto* s : {&ax.H1, &ax.H2}) {
            CHECK(s->stencil().left == doctest::Approx(1.0 / 12));
            CHECK(s->stencil().center == doctest::Approx(10.0 / 12));
        }
    }
    SUBCASE("nu_mu = 1/3 is exactly diagonal") {
        auto b = build_operator_bundle(1.0, h * h / 3.0, g);
        CHECK(b.axes[0].H1.stencil().left == 0.0);
        CHECK(b.axes[0].H1.stencil().center == doctest::Approx(1.0));
        CHECK_FALSE(b.axes[0].limiter_c_diffusion.has_value());
        CHECK(b.axes[0].H1.is_m_matrix());
    }
    SUBCASE("diffusion limiter weight") {
        CHECK(*diffusion_limiter_weight(0.1) == doctest::Approx(10.6 / 0.7));
        CHECK(*diffusion_limiter_weight(0.1) == doctest::Approx(15.142857).epsilon(1e-7));
        CHECK_FALSE(diffusion_limiter_weight(0.5).has_value());
        for (double nm = 0.0; nm < 0.333; nm += 0.01) CHECK(*diffusion_limiter_weight(nm) >= 2.0);
    }
    SUBCASE("H1 = A - (tau nu/4) dxx and H2 = A + (tau nu/4) dxx entrywise") {
        const double nu = 0.3, tau = 0.002;
        auto b = build_operator_bundle(nu, tau, g);
        auto A = oracle::A(20, true);
        auto D = oracle::second_diff(20, h, true);
        auto H1 = oracle::add(A, D, -tau * nu / 4);
        auto H2 = oracle::add(A, D, tau * nu / 4);
        auto d1 = dense_of(b.axes[0].H1), d2 = dense_of(b.axes[0].H2);
        CHECK(oracle::max_abs_diff(H1.a, d1.a) < 1e-14);
        CHECK(oracle::max_abs_diff(H2.a, d2.a) < 1e-14);
        CHECK(b.axes[0].nu_mu == doctest::Approx(nu * tau / (h * h)));
    }
    SUBCASE("row sums are one") {
        auto b = build_operator_bundle(0.7, 0.003, g);
        for (const auto* s : {&b.axes[0].A, &b.axes[0].B, &b.axes[0].H1, &b.axes[0].H2}) {
            const auto& st = s->stencil();
            CHECK(st.left + st.center + st.right == doctest::Approx(1.0));
        }
    }
    SUBCASE("entry matches the stencil layout") {
        auto b = build_operator_bundle(0.0, 0.01, GridSpec::line(0, 1, 8, Boundary::Dirichlet));
        const auto& B = b.axes[0].B;
        CHECK(B.entry(0, 0) == 1.0);
        CHECK(B.entry(0, 1) == 0.0);
        CHECK(B.entry(3, 2) == doctest::Approx(1.0 / 6));
        CHECK(B.entry(3, 3) == doctest::Approx(4.0 / 6));
    }
    SUBCASE("invalid inputs") {
        CHECK_THROWS(build_operator_bundle(-1.0, 0.1, g));
        CHECK_THROWS(build_operator_bundle(0.1, 0.0, g));
    }
}

}
