#include "hocbp/limiters.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hocbp {

double rounding_guard(double m, double M) {
    double w = M - m;
    if (w <= 0.0) w = std::max({std::abs(m), std::abs(M), 1.0});
    return 1e-14 * w;
}

namespace {

struct Line {
    double* u;
    std::size_t n;
    std::size_t stride;
    double& operator[](std::size_t i) const { return u[i * stride]; }
};

struct Movable {
    std::size_t n;
    bool cyclic;
    std::size_t lo() const { return cyclic ? 0 : 1; }
    std::size_t hi() const { return cyclic ? n : n - 1; }  // exclusive
    std::size_t count() const { return hi() - lo(); }
    bool fixed(std::size_t i) const { return !cyclic && (i == 0 || i == n - 1); }
    std::size_t left(std::size_t i) const { return i == 0 ? n - 1 : i - 1; }
    std::size_t right(std::size_t i) const { return i + 1 == n ? 0 : i + 1; }
};

// out-of-range sign per movable node: -1 below m, +1 above M
void violation_signs(const std::vector<double>& u, const Movable& mv, double m, double M, double g,
                     std::vector<int>& sign, std::vector<std::size_t>& viol) {
    sign.assign(mv.n, 0);
    viol.clear();
    for (std::size_t i = mv.lo(); i < mv.hi(); ++i) {
        if (u[i] < m - g) sign[i] = -1;
        else if (u[i] > M + g) sign[i] = 1;
        if (sign[i] != 0) viol.push_back(i);
    }
}

ProfileClassification classify_signs(const std::vector<int>& sign, const std::vector<std::size_t>& viol,
                                      const Movable& mv) {
    ProfileClassification out;
    if (viol.empty()) return out;
    const std::size_t n = mv.n;
    std::vector<std::vector<std::size_t>> chains;
    for (std::size_t k : viol) {
        if (chains.empty() || k - chains.back().back() > 2) chains.push_back({});
        chains.back().push_back(k);
    }
    bool ring = false;
    if (mv.cyclic) {
        std::size_t wrap_gap = chains.front().front() + n - chains.back().back();
        if (wrap_gap <= 2) {
            if (chains.size() == 1) {
                ring = true;
            } else {
                auto& last = chains.back();
                last.insert(last.end(), chains.front().begin(), chains.front().end());
                chains.front() = std::move(last);
                chains.pop_back();
            }
        }
    }
    for (const auto& ch : chains) {
        bool alternating = false;
        for (std::size_t k = 0; k + 1 < ch.size(); ++k)
            if (sign[ch[k]] != sign[ch[k + 1]]) alternating = true;
        if (ring && ch.size() > 1 && sign[ch.front()] != sign[ch.back()]) alternating = true;
        if (!alternating) {
            out.class_two.push_back(ch);
            continue;
        }
        if (ring) {
            out.class_one.push_back({0, n});
            continue;
        }
        std::size_t span = (ch.back() + n - ch.front()) % n + 1;
        if (mv.cyclic) {
            out.class_one.push_back({mv.left(ch.front()), std::min(span + 2, n)});
        } else {
            std::size_t first = ch.front() > mv.lo() ? ch.front() - 1 : ch.front();
            std::size_t last = ch.back() + 1 < mv.hi() ? ch.back() + 1 : ch.back();
            out.class_one.push_back({first, last - first + 1});
        }
    }
    std::sort(out.class_one.begin(), out.class_one.end(),
              [](const IndexRange& a, const IndexRange& b) { return a.first < b.first; });
    return out;
}

// Clamp the listed values into [m, M] and shift the mass created or destroyed
// back onto the headroom of the same set. Returns false (leaving u untouched)
// when the set's mean lies outside [m, M].
bool clamp_and_rebalance(std::vector<double>& u, const std::vector<std::size_t>& idx, double m, double M,
                         double tol) {
    double U = 0.0, V = 0.0, A = 0.0, B = 0.0;
    for (std::size_t i : idx) U += u[i];
    for (std::size_t i : idx) {
        double v = std::clamp(u[i], m, M);
        V += v;
        A += v - m;
        B += M - v;
    }
    const double d = V - U;
    if (d > 0.0 && d > A + tol) return false;
    if (d < 0.0 && -d > B + tol) return false;
    for (std::size_t i : idx) {
        double v = std::clamp(u[i], m, M);
        if (d > 0.0 && A > 0.0) v -= (v - m) / A * d;
        else if (d < 0.0 && B > 0.0) v += (M - v) / B * (-d);
        u[i] = v;
    }
    return true;
}

void range_indices(const IndexRange& r, std::size_t n, std::vector<std::size_t>& idx) {
    idx.clear();
    for (std::size_t k = 0; k < r.count; ++k) idx.push_back((r.first + k) % n);
}

void limit_line(std::vector<double>& v, const std::vector<double>& orig, const Movable& mv, double m, double M,
                std::vector<int>& sign, std::vector<std::size_t>& viol, LimiterStats* stats) {
    const double g = rounding_guard(m, M);
    const double tol = 1e-13 * std::max({M - m, std::abs(m), std::abs(M)}) * double(mv.n);
    violation_signs(orig, mv, m, M, g, sign, viol);
    if (viol.empty()) {
        for (std::size_t i = mv.lo(); i < mv.hi(); ++i) v[i] = std::clamp(v[i], m, M);
        return;
    }
    const std::size_t n_viol = viol.size();
    ProfileClassification cls = classify_signs(sign, viol, mv);

    // isolated violations: move the excess onto the two neighbours by headroom
    for (const auto& group : cls.class_two) {
        for (std::size_t i : group) {
            const std::size_t l = mv.left(i), r = mv.right(i);
            const bool under = orig[i] < m;
            auto room = [&](std::size_t k) {
                if (mv.fixed(k)) return 0.0;
                return std::max(under ? orig[k] - m : M - orig[k], 0.0);
            };
            const double wl = room(l), wr = room(r), W = wl + wr;
            if (!(W > 0.0)) continue;  // left for the widening pass
            if (under) {
                const double d = m - orig[i];
                v[i] += d;
                v[l] -= d * wl / W;
                v[r] -= d * wr / W;
            } else {
                const double e = orig[i] - M;
                v[i] -= e;
                v[l] += e * wl / W;
                v[r] += e * wr / W;
            }
        }
    }

    // sawtooth runs: clamp and rebalance inside the run
    std::vector<std::size_t> idx;
    for (const auto& run : cls.class_one) {
        range_indices(run, mv.n, idx);
        clamp_and_rebalance(v, idx, m, M, tol);
    }

    // anything still outside: widen a window until its mean is admissible
    for (std::size_t i = mv.lo(); i < mv.hi(); ++i) {
        if (v[i] >= m - g && v[i] <= M + g) continue;
        std::size_t a = i, b = i, width = 1;  // inclusive window [a, b] (modular on cyclic)
        bool done = false;
        while (!done) {
            bool grew = false;
            if (mv.cyclic) {
                if (width + 2 <= mv.n) {
                    a = mv.left(a);
                    b = mv.right(b);
                    width += 2;
                    grew = true;
                } else if (width < mv.n) {
                    b = mv.right(b);
                    width += 1;
                    grew = true;
                }
            } else {
                if (a > mv.lo()) --a, ++width, grew = true;
                if (b + 1 < mv.hi()) ++b, ++width, grew = true;
            }
            idx.clear();
            for (std::size_t k = 0; k < width; ++k) idx.push_back((a + k) % mv.n);
            double s = 0.0;
            for (std::size_t k : idx) s += v[k];
            const double mean = s / double(width);
            if ((mean >= m - g && mean <= M + g) || !grew) {
                if (!clamp_and_rebalance(v, idx, m, M, tol))
                    for (std::size_t k : idx) v[k] = std::clamp(v[k], m, M);
                done = true;
            }
        }
        if (stats) stats->fallback += 1;
    }

    for (std::size_t i = mv.lo(); i < mv.hi(); ++i) v[i] = std::clamp(v[i], m, M);
    if (stats) {
        stats->clamped += n_viol;
        for (std::size_t i = 0; i < mv.n; ++i) stats->mass_moved += std::abs(v[i] - orig[i]);
    }
}

void check_line(const std::vector<double>& u, const Movable& mv, double m, double M, double c) {
    const double tol = 1e-12 * std::max({M - m, std::abs(m), std::abs(M)});
    double worst = 0.0, worst_val = 0.0;
    std::size_t worst_i = 0;
    for (std::size_t i = mv.lo(); i < mv.hi(); ++i) {
        const double ub = (u[mv.left(i)] + c * u[i] + u[mv.right(i)]) / (c + 2.0);
        const double over = std::max(m - ub, ub - M);
        if (over > worst) worst = over, worst_val = ub, worst_i = i;
    }
    if (worst > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "limiter precondition violated: weighted average " << worst_val << " at index " << worst_i
           << " lies outside [" << m << ", " << M << "] (c = " << c
           << "); the step-size conditions are likely breached";
        throw LimiterPreconditionError(os.str(), worst_val, worst_i);
    }
}

}  // namespace

ProfileClassification classify_profiles(const LimiterInput& in) {
    const std::size_t n = in.u.size();
    Movable mv{n, in.topology == Topology::Cyclic};
    std::vector<double> u(in.u.begin(), in.u.end());
    std::vector<int> sign;
    std::vector<std::size_t> viol;
    if (n < 3) return {};
    violation_signs(u, mv, in.m, in.M, rounding_guard(in.m, in.M), sign, viol);
    return classify_signs(sign, viol, mv);
}

void check_limiter_precondition(const LimiterInput& in) {
    if (in.u.size() < 3) throw DimensionError("limiter needs at least 3 values");
    std::vector<double> u(in.u.begin(), in.u.end());
    check_line(u, Movable{u.size(), in.topology == Topology::Cyclic}, in.m, in.M, in.c);
}

std::vector<double> bp_limit(const LimiterInput& in, bool check_precondition, LimiterStats* stats) {
    std::vector<double> v(in.u.begin(), in.u.end());
    BoundLimiter lim;
    lim.apply(v, in.m, in.M, in.c, in.topology, check_precondition, stats);
    return v;
}

void BoundLimiter::apply(std::span<double> u, double m, double M, double c, Topology topo, bool check_precondition,
                         LimiterStats* stats) {
    apply_strided(u.data(), u.size(), 1, m, M, c, topo, check_precondition, stats);
}

void BoundLimiter::apply_strided(double* u, std::size_t n, std::size_t stride, double m, double M, double c,
                                 Topology topo, bool check_precondition, LimiterStats* stats) {
    if (n < 3) throw DimensionError("limiter needs at least 3 values");
    if (!(m <= M)) throw std::invalid_argument("limiter bounds must satisfy m <= M");
    if (!(c >= 2.0)) throw std::invalid_argument("limiter weight c must be at least 2");
    Line line{u, n, stride};
    orig_.resize(n);
    for (std::size_t i = 0; i < n; ++i) orig_[i] = line[i];
    Movable mv{n, topo == Topology::Cyclic};
    if (check_precondition) check_line(orig_, mv, m, M, c);
    line_ = orig_;
    limit_line(line_, orig_, mv, m, M, sign_, viol_, stats);
    for (std::size_t i = 0; i < n; ++i) line[i] = line_[i];
}

Field bp_limit_2d(const Field& ubar, const TridiagonalSystem& opx, const TridiagonalSystem& opy, double m, double M,
                  double cx, double cy, bool check_precondition, LimiterStats* stats) {
    const GridSpec& g = ubar.grid;
    if (g.dim != 2) throw DimensionError("bp_limit_2d needs a 2D field");
    const std::size_t nx = g.nodes(0), ny = g.nodes(1);
    if (opx.size() != nx || opy.size() != ny) throw DimensionError("bp_limit_2d: operator size mismatch");
    Field u = ubar;
    BoundLimiter lim;
    for (std::size_t j = 0; j < ny; ++j) {
        double* row = u.values.data() + j * nx;
        opx.solve_inplace(row, 1);
        lim.apply_strided(row, nx, 1, m, M, cx, opx.topology(), check_precondition, stats);
    }
    for (std::size_t i = 0; i < nx; ++i) {
        double* col = u.values.data() + i;
        opy.solve_inplace(col, nx);
        lim.apply_strided(col, ny, nx, m, M, cy, opy.topology(), check_precondition, stats);
    }
    return u;
}

namespace {

double minmod3(double a, double b, double c) {
    if (a > 0 && b > 0 && c > 0) return std::min({a, b, c});
    if (a < 0 && b < 0 && c < 0) return std::max({a, b, c});
    return 0.0;
}

}  // namespace

std::size_t TvbLimiter::apply_strided(double* u, std::size_t n, std::size_t stride, double M_tvb, double h,
                                      Topology topo) {
    if (n < 3) throw DimensionError("TVB limiter needs at least 3 values");
    Line line{u, n, stride};
    Movable mv{n, topo == Topology::Cyclic};
    line_.resize(n);
    bad_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) line_[i] = line[i];
    const double thresh = M_tvb * h * h;
    std::size_t troubled = 0;
    for (std::size_t i = mv.lo(); i < mv.hi(); ++i) {
        const double dp = line_[mv.right(i)] - line_[i];
        const double dm = line_[i] - line_[mv.left(i)];
        auto modified = [&](double a) { return std::abs(a) <= thresh ? a : minmod3(a, dp, dm); };
        if (modified(0.5 * dp) != 0.5 * dp || modified(0.5 * dm) != 0.5 * dm) {
            bad_[i] = 1;
            ++troubled;
        }
    }
    if (troubled == 0) return 0;
    const std::size_t last = mv.cyclic ? n : n - 1;
    for (std::size_t i = 0; i < last; ++i) {
        const std::size_t r = mv.right(i);
        if (mv.fixed(i) || mv.fixed(r)) continue;
        if (!bad_[i] && !bad_[r]) continue;
        const double F = 0.25 * (line_[r] - line_[i]);
        line[i] += F;
        line[r] -= F;
    }
    return troubled;
}

std::vector<double> tvb_limit(std::span<const double> u, double M_tvb, double h, Topology topo,
                              std::size_t* troubled) {
    std::vector<double> v(u.begin(), u.end());
    TvbLimiter lim;
    std::size_t t = lim.apply_strided(v.data(), v.size(), 1, M_tvb, h, topo);
    if (troubled) *troubled = t;
    return v;
}

}  // namespace hocbp
