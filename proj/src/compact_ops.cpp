#include "hocbp/compact_ops.hpp"

#include <cmath>
#include <sstream>

namespace hocbp {

void apply_line(const double* in, std::size_t n, std::size_t stride, const Stencil3& s, Topology topo,
                double boundary_scale, double* out, std::size_t out_stride) {
    auto at = [&](std::size_t i) { return in[i * stride]; };
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i * out_stride] = s.left * at(i - 1) + s.center * at(i) + s.right * at(i + 1);
    if (topo == Topology::Cyclic) {
        out[0] = s.left * at(n - 1) + s.center * at(0) + s.right * at(1);
        out[(n - 1) * out_stride] = s.left * at(n - 2) + s.center * at(n - 1) + s.right * at(0);
    } else {
        out[0] = boundary_scale * at(0);
        out[(n - 1) * out_stride] = boundary_scale * at(n - 1);
    }
}

namespace {

Field apply_axis(const Field& v, int axis, const Stencil3& s, double boundary_scale) {
    const GridSpec& g = v.grid;
    if (axis < 0 || axis >= g.dim) throw DimensionError("axis " + std::to_string(axis) + " out of range");
    Field out(g);
    const std::size_t n = g.nodes(axis);
    const std::size_t st = g.stride(axis);
    const std::size_t lines = g.size() / n;
    const Topology topo = topology_of(g);
    for (std::size_t l = 0; l < lines; ++l) {
        // x-lines start at l*nx; y-lines start at column l
        std::size_t base = axis == 0 ? l * n : l;
        apply_line(v.values.data() + base, n, st, s, topo, boundary_scale, out.values.data() + base, st);
    }
    return out;
}

}  // namespace

Field apply_second_difference(const Field& v, int axis) {
    if (axis < 0 || axis >= v.grid.dim) throw DimensionError("axis " + std::to_string(axis) + " out of range");
    double h = v.grid.spacing(axis);
    double r = 1.0 / (h * h);
    return apply_axis(v, axis, {r, -2.0 * r, r}, 0.0);
}

Field apply_centered_difference(const Field& v, int axis) {
    if (axis < 0 || axis >= v.grid.dim) throw DimensionError("axis " + std::to_string(axis) + " out of range");
    double r = 0.5 / v.grid.spacing(axis);
    return apply_axis(v, axis, {-r, 0.0, r}, 0.0);
}

Field apply_A(const Field& v, int axis) { return apply_axis(v, axis, {1.0 / 12, 10.0 / 12, 1.0 / 12}, 1.0); }

Field apply_B(const Field& v, int axis) { return apply_axis(v, axis, {1.0 / 6, 4.0 / 6, 1.0 / 6}, 1.0); }

TridiagonalSystem::TridiagonalSystem(std::size_t n, Stencil3 s, Topology topo, std::string label, double nu_mu,
                                     bool factorize)
    : n_(n), s_(s), topo_(topo), label_(std::move(label)) {
    if (n < 3) throw DimensionError("tridiagonal system needs at least 3 rows");
    diagonal_ = s_.left == 0.0 && s_.right == 0.0;
    if (factorize) factor(nu_mu);
}

double TridiagonalSystem::entry(std::size_t i, std::size_t j) const {
    if (topo_ == Topology::Plain && (i == 0 || i == n_ - 1)) return i == j ? 1.0 : 0.0;
    if (i == j) return s_.center;
    if ((j + 1) % n_ == i && (topo_ == Topology::Cyclic || j + 1 == i)) return s_.left;
    if ((i + 1) % n_ == j && (topo_ == Topology::Cyclic || i + 1 == j)) return s_.right;
    return 0.0;
}

void TridiagonalSystem::factor(double nu_mu) {
    const double a = s_.left, b = s_.center, c = s_.right;
    const double scale = std::abs(a) + std::abs(b) + std::abs(c);
    auto fail = [&](std::size_t row) {
        std::ostringstream os;
        os << "singular " << (label_.empty() ? "tridiagonal" : label_) << " system (zero pivot at row " << row
           << ", nu_mu = " << nu_mu << ")";
        throw SingularSystemError(os.str());
    };
    cp_.assign(n_, 0.0);
    inv_.assign(n_, 0.0);
    if (diagonal_) {
        if (std::abs(b) <= 1e-14 * scale || b == 0.0) fail(0);
        factorized_ = true;
        return;
    }
    auto row = [&](std::size_t i, double& ai, double& bi, double& ci) {
        ai = a;
        bi = b;
        ci = c;
        if (topo_ == Topology::Plain) {
            if (i == 0) ai = 0.0, bi = 1.0, ci = 0.0;
            if (i == n_ - 1) ai = 0.0, bi = 1.0, ci = 0.0;
        } else {
            if (i == 0) bi = b - gamma_;
            if (i == n_ - 1) bi = b - c * a / gamma_;
        }
    };
    if (topo_ == Topology::Cyclic) {
        gamma_ = -b;
        beta_ = a;
    }
    for (std::size_t i = 0; i < n_; ++i) {
        double ai, bi, ci;
        row(i, ai, bi, ci);
        double den = i == 0 ? bi : bi - ai * cp_[i - 1];
        if (std::abs(den) <= 1e-14 * scale) fail(i);
        inv_[i] = 1.0 / den;
        cp_[i] = ci * inv_[i];
    }
    factorized_ = true;
    if (topo_ == Topology::Cyclic) {
        z_.assign(n_, 0.0);
        z_[0] = gamma_;
        z_[n_ - 1] = c;
        thomas(z_.data(), 1);
        corr_den_ = 1.0 + z_[0] + beta_ * z_[n_ - 1] / gamma_;
        if (std::abs(corr_den_) <= 1e-14) fail(n_ - 1);
    }
}

void TridiagonalSystem::thomas(double* x, std::size_t st) const {
    const double a = s_.left;
    auto sub = [&](std::size_t i) {
        if (topo_ == Topology::Plain && (i == n_ - 1)) return 0.0;
        return a;
    };
    x[0] *= inv_[0];
    for (std::size_t i = 1; i < n_; ++i) x[i * st] = (x[i * st] - sub(i) * x[(i - 1) * st]) * inv_[i];
    for (std::size_t i = n_ - 1; i-- > 0;) x[i * st] -= cp_[i] * x[(i + 1) * st];
}

void TridiagonalSystem::solve_inplace(double* x, std::size_t st) const {
    if (!factorized_) throw SingularSystemError("system '" + label_ + "' was built without a factorization");
    if (diagonal_) {
        const double r = 1.0 / s_.center;
        if (topo_ == Topology::Plain) {
            for (std::size_t i = 1; i + 1 < n_; ++i) x[i * st] *= r;
        } else {
            for (std::size_t i = 0; i < n_; ++i) x[i * st] *= r;
        }
        return;
    }
    thomas(x, st);
    if (topo_ == Topology::Cyclic) {
        const double fact = (x[0] + beta_ * x[(n_ - 1) * st] / gamma_) / corr_den_;
        for (std::size_t i = 0; i < n_; ++i) x[i * st] -= fact * z_[i];
    }
}

std::vector<double> TridiagonalSystem::solve(const std::vector<double>& rhs) const {
    if (rhs.size() != n_) throw DimensionError("solve: rhs length mismatch");
    std::vector<double> x = rhs;
    solve_inplace(x.data(), 1);
    return x;
}

void TridiagonalSystem::multiply(const double* x, std::size_t xs, double* y, std::size_t ys) const {
    apply_line(x, n_, xs, s_, topo_, 1.0, y, ys);
}

std::vector<double> TridiagonalSystem::multiply(const std::vector<double>& x) const {
    if (x.size() != n_) throw DimensionError("multiply: length mismatch");
    std::vector<double> y(n_);
    multiply(x.data(), 1, y.data(), 1);
    return y;
}

bool TridiagonalSystem::is_m_matrix() const {
    if (s_.center < 0.0 || s_.left > 0.0 || s_.right > 0.0) return false;
    const double row_sum = s_.left + s_.center + s_.right;
    if (row_sum < 0.0) return false;
    // Plain systems always carry positive identity rows
    return row_sum > 0.0 || topo_ == Topology::Plain;
}

std::optional<double> diffusion_limiter_weight(double nu_mu) {
    const double off = 1.0 - 3.0 * nu_mu;
    if (off <= 1e-14) return std::nullopt;
    return (10.0 + 6.0 * nu_mu) / off;
}

OperatorBundle build_operator_bundle(double nu, double tau, const GridSpec& grid) {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be finite and non-negative");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be finite and positive");
    grid.validate();
    OperatorBundle b;
    b.nu = nu;
    b.tau = tau;
    b.topology = topology_of(grid);
    for (int axis = 0; axis < grid.dim; ++axis) {
        AxisOperators ax;
        ax.h = grid.spacing(axis);
        ax.nu_mu = nu * tau / (ax.h * ax.h);
        ax.limiter_c_diffusion = diffusion_limiter_weight(ax.nu_mu);
        const std::size_t n = grid.nodes(axis);
        const double k = 3.0 * ax.nu_mu;
        // snap the 1 - 3 nu_mu tie so H1 becomes exactly diagonal
        const double off1 = std::abs(1.0 - k) <= 1e-14 ? 0.0 : (1.0 - k) / 12.0;
        const double off2 = (1.0 + k) / 12.0;
        const std::string tag = axis == 0 ? "x" : "y";
        ax.A = TridiagonalSystem(n, {1.0 / 12, 10.0 / 12, 1.0 / 12}, b.topology, "A" + tag, ax.nu_mu);
        ax.B = TridiagonalSystem(n, {1.0 / 6, 4.0 / 6, 1.0 / 6}, b.topology, "B" + tag, ax.nu_mu);
        ax.H1 = TridiagonalSystem(n, {off1, (10.0 + 2.0 * k) / 12.0, off1}, b.topology, "H1" + tag, ax.nu_mu);
        ax.H2 = TridiagonalSystem(n, {off2, (10.0 - 2.0 * k) / 12.0, off2}, b.topology, "H2" + tag, ax.nu_mu,
                                  false);
        b.axes.push_back(std::move(ax));
    }
    return b;
}

}  // namespace hocbp
