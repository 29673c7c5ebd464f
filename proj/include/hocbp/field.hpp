#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace hocbp {

enum class Boundary { Periodic, Dirichlet };

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Uniform grid on [lower, upper] per axis with `cells` intervals.
// Periodic axes store `cells` nodes (x_0 .. x_{N-1}); Dirichlet axes store
// both endpoints, `cells + 1` nodes. 2D data is row-major with x fastest.
struct GridSpec {
    int dim = 1;
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{1.0, 1.0};
    std::array<std::size_t, 2> cells{1, 1};
    Boundary bc = Boundary::Periodic;

    static GridSpec line(double a, double b, std::size_t n, Boundary bc);
    static GridSpec rect(double ax, double bx, double ay, double by, std::size_t nx, std::size_t ny,
                         Boundary bc);

    double length(int axis) const { return upper.at(axis) - lower.at(axis); }
    double spacing(int axis) const;
    std::size_t nodes(int axis) const;
    std::size_t size() const;
    // stride between neighbours along `axis` in the flat array
    std::size_t stride(int axis) const { return axis == 0 ? 1 : nodes(0); }
    double coord(int axis, std::size_t i) const { return lower[axis] + spacing(axis) * double(i); }
    double cell_volume() const;
    bool periodic() const { return bc == Boundary::Periodic; }

    // throws DimensionError when the geometry is unusable
    void validate() const;
    bool operator==(const GridSpec& o) const = default;
};

struct Field {
    GridSpec grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0);
    Field(const GridSpec& g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
    double& at(std::size_t i, std::size_t j) { return values[j * grid.nodes(0) + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * grid.nodes(0) + i]; }

    bool all_finite() const;
};

template <class F>
Field sample(const GridSpec& g, F&& fn) {
    Field out(g);
    if constexpr (std::is_invocable_v<F&, double>) {
        if (g.dim != 1) throw DimensionError("sample: one-argument function on a 2D grid");
        for (std::size_t i = 0; i < g.nodes(0); ++i) out[i] = fn(g.coord(0, i));
    } else {
        if (g.dim != 2) throw DimensionError("sample: two-argument function on a 1D grid");
        for (std::size_t j = 0; j < g.nodes(1); ++j)
            for (std::size_t i = 0; i < g.nodes(0); ++i) out.at(i, j) = fn(g.coord(0, i), g.coord(1, j));
    }
    return out;
}

struct ErrorNorms {
    double linf = 0.0;
    double l2 = 0.0;
};

struct BoundsReport {
    double min_val = 0.0;
    double max_val = 0.0;
    double m_err = 0.0;
    double M_err = 0.0;
};

double mass(const Field& u);
ErrorNorms error_norms(const Field& u, const Field& exact);
BoundsReport bounds_report(const Field& u, double m, double M);

}  // namespace hocbp
