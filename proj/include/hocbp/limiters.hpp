#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hocbp/compact_ops.hpp"
#include "hocbp/field.hpp"

namespace hocbp {

// u holds solved point values whose weighted averages
// (u_{i-1} + c u_i + u_{i+1}) / (c + 2) are expected to lie in [m, M].
// On a Plain line the two end values are treated as fixed data.
struct LimiterInput {
    std::span<const double> u;
    double m = 0.0;
    double M = 1.0;
    double c = 4.0;
    Topology topology = Topology::Cyclic;
};

// A run of consecutive indices, wrapping modulo n on cyclic data.
struct IndexRange {
    std::size_t first = 0;
    std::size_t count = 0;
    bool operator==(const IndexRange&) const = default;
};

struct ProfileClassification {
    std::vector<IndexRange> class_one;               // sawtooth runs incl. one flanking point per side
    std::vector<std::vector<std::size_t>> class_two;  // remaining out-of-range points, grouped
};

struct LimiterStats {
    std::size_t clamped = 0;   // points moved onto a bound
    double mass_moved = 0.0;   // sum of absolute corrections
    std::size_t fallback = 0;  // windows fixed by the widening pass
    void merge(const LimiterStats& o) {
        clamped += o.clamped;
        mass_moved += o.mass_moved;
        fallback += o.fallback;
    }
};

class LimiterPreconditionError : public std::runtime_error {
public:
    LimiterPreconditionError(const std::string& what, double worst_average, std::size_t index)
        : std::runtime_error(what), worst_average(worst_average), index(index) {}
    double worst_average;
    std::size_t index;
};

double rounding_guard(double m, double M);

ProfileClassification classify_profiles(const LimiterInput& in);

// throws LimiterPreconditionError with the worst weighted average
void check_limiter_precondition(const LimiterInput& in);

std::vector<double> bp_limit(const LimiterInput& in, bool check_precondition = true, LimiterStats* stats = nullptr);

// Reusable in-place limiter; keeps scratch buffers between calls.
class BoundLimiter {
public:
    void apply(std::span<double> u, double m, double M, double c, Topology topo, bool check_precondition,
               LimiterStats* stats = nullptr);
    // strided line, e.g. a column of a row-major 2D array
    void apply_strided(double* u, std::size_t n, std::size_t stride, double m, double M, double c, Topology topo,
                       bool check_precondition, LimiterStats* stats = nullptr);

private:
    std::vector<double> orig_, line_;
    std::vector<int> sign_;
    std::vector<std::size_t> viol_;
};

// Row solves with opx then row limiting with cx, then column solves with opy
// and column limiting with cy. `ubar` holds the doubly averaged data.
Field bp_limit_2d(const Field& ubar, const TridiagonalSystem& opx, const TridiagonalSystem& opy, double m, double M,
                  double cx, double cy, bool check_precondition = true, LimiterStats* stats = nullptr);

// Modified-minmod TVB limiter. A node is troubled when a one-sided half
// increment exceeds M_tvb h^2 and disagrees with minmod of the two
// increments; every interface touching a troubled node exchanges a quarter of
// its jump. Sums are kept and no new extrema appear.
std::vector<double> tvb_limit(std::span<const double> u, double M_tvb, double h,
                              Topology topo = Topology::Cyclic, std::size_t* troubled = nullptr);

class TvbLimiter {
public:
    std::size_t apply_strided(double* u, std::size_t n, std::size_t stride, double M_tvb, double h, Topology topo);

private:
    std::vector<double> line_;
    std::vector<char> bad_;
};

}  // namespace hocbp
