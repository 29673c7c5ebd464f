#include "hocbp/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hocbp {

GridSpec GridSpec::line(double a, double b, std::size_t n, Boundary bc) {
    GridSpec g;
    g.dim = 1;
    g.lower = {a, 0.0};
    g.upper = {b, 1.0};
    g.cells = {n, 1};
    g.bc = bc;
    g.validate();
    return g;
}

GridSpec GridSpec::rect(double ax, double bx, double ay, double by, std::size_t nx, std::size_t ny,
                        Boundary bc) {
    GridSpec g;
    g.dim = 2;
    g.lower = {ax, ay};
    g.upper = {bx, by};
    g.cells = {nx, ny};
    g.bc = bc;
    g.validate();
    return g;
}

double GridSpec::spacing(int axis) const { return length(axis) / double(cells.at(axis)); }

std::size_t GridSpec::nodes(int axis) const {
    if (axis >= dim) return 1;
    return periodic() ? cells[axis] : cells[axis] + 1;
}

std::size_t GridSpec::size() const { return dim == 1 ? nodes(0) : nodes(0) * nodes(1); }

double GridSpec::cell_volume() const { return dim == 1 ? spacing(0) : spacing(0) * spacing(1); }

void GridSpec::validate() const {
    if (dim != 1 && dim != 2) throw DimensionError("grid dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        if (cells[a] < 4) throw DimensionError("need at least 4 cells per axis, got " + std::to_string(cells[a]));
        if (!(upper[a] > lower[a]) || !std::isfinite(upper[a] - lower[a]))
            throw DimensionError("axis " + std::to_string(a) + " has an empty or non-finite extent");
    }
}

Field::Field(const GridSpec& g, double fill) : grid(g), values(g.size(), fill) {}

Field::Field(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size())
        throw DimensionError("field length " + std::to_string(values.size()) + " does not match grid size " +
                             std::to_string(g.size()));
}

bool Field::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double mass(const Field& u) {
    double s = 0.0;
    for (double v : u.values) s += v;
    return u.grid.cell_volume() * s;
}

ErrorNorms error_norms(const Field& u, const Field& exact) {
    if (!(u.grid == exact.grid) || u.size() != exact.size()) throw DimensionError("error_norms: grid mismatch");
    ErrorNorms e;
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double d = u[k] - exact[k];
        e.linf = std::max(e.linf, std::abs(d));
        s += d * d;
    }
    e.l2 = std::sqrt(u.grid.cell_volume() * s);
    return e;
}

BoundsReport bounds_report(const Field& u, double m, double M) {
    BoundsReport r;
    if (u.values.empty()) return r;
    auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
    r.min_val = *lo;
    r.max_val = *hi;
    r.m_err = r.min_val - m;
    r.M_err = M - r.max_val;
    return r;
}

}  // namespace hocbp
