#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hocbp/field.hpp"

namespace hocbp {

enum class Topology { Cyclic, Plain };

inline Topology topology_of(const GridSpec& g) { return g.periodic() ? Topology::Cyclic : Topology::Plain; }

struct Stencil3 {
    double left = 0.0;
    double center = 1.0;
    double right = 0.0;
};

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Applies a three-point stencil along one strided line of `n` values.
// On a Plain line the two end outputs are `boundary_scale * in` (1 keeps the
// value, 0 zeroes it). `in` and `out` must not alias.
void apply_line(const double* in, std::size_t n, std::size_t stride, const Stencil3& s, Topology topo,
                double boundary_scale, double* out, std::size_t out_stride);

// Field-level operators. Periodic grids wrap; Dirichlet grids keep A, B at the
// boundary nodes as identity and give zero for the difference operators there.
Field apply_second_difference(const Field& v, int axis);
Field apply_centered_difference(const Field& v, int axis);
Field apply_A(const Field& v, int axis);
Field apply_B(const Field& v, int axis);

// Constant-coefficient tridiagonal operator. Cyclic systems wrap the stencil;
// Plain systems use identity rows at both ends so prescribed boundary values
// pass straight through a solve.
class TridiagonalSystem {
public:
    TridiagonalSystem() = default;
    TridiagonalSystem(std::size_t n, Stencil3 s, Topology topo, std::string label = {}, double nu_mu = 0.0,
                      bool factorize = true);

    std::size_t size() const { return n_; }
    const Stencil3& stencil() const { return s_; }
    Topology topology() const { return topo_; }
    const std::string& label() const { return label_; }
    bool factorized() const { return factorized_; }

    // y = M x along strided lines
    void multiply(const double* x, std::size_t xs, double* y, std::size_t ys) const;
    std::vector<double> multiply(const std::vector<double>& x) const;

    // overwrites x (holding the right-hand side) with the solution
    void solve_inplace(double* x, std::size_t stride = 1) const;
    std::vector<double> solve(const std::vector<double>& rhs) const;

    double entry(std::size_t i, std::size_t j) const;
    bool is_m_matrix() const;

private:
    void factor(double nu_mu);
    void thomas(double* x, std::size_t stride) const;

    std::size_t n_ = 0;
    Stencil3 s_{};
    Topology topo_ = Topology::Cyclic;
    std::string label_;
    bool factorized_ = false;
    bool diagonal_ = false;
    // Thomas factors: modified super-diagonal and reciprocal pivots
    std::vector<double> cp_, inv_;
    // cyclic rank-one correction
    double gamma_ = 0.0, beta_ = 0.0, corr_den_ = 1.0;
    std::vector<double> z_;
};

struct AxisOperators {
    double h = 0.0;
    double nu_mu = 0.0;
    std::optional<double> limiter_c_diffusion;
    TridiagonalSystem A, B, H1, H2;
};

struct OperatorBundle {
    double nu = 0.0;
    double tau = 0.0;
    Topology topology = Topology::Cyclic;
    std::vector<AxisOperators> axes;
};

// Diffusion weight c for which H1 u = (u_{i-1} + c u_i + u_{i+1}) / (c + 2);
// empty once H1 has non-positive off-diagonals.
std::optional<double> diffusion_limiter_weight(double nu_mu);

OperatorBundle build_operator_bundle(double nu, double tau, const GridSpec& grid);

}  // namespace hocbp
