#pragma once

// Discrete Legendre-Fenchel transform of sampled 1D functions.

#include "nlsg/core.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

namespace nlsg {

/// Values v[i] at strictly increasing abscissae x[i]; v may be +inf.
struct SampledFunction {
    std::vector<double> x;
    std::vector<double> v;

    SampledFunction() = default;
    SampledFunction(std::vector<double> xs, std::vector<double> vs) : x(std::move(xs)), v(std::move(vs)) {
        if (x.size() != v.size()) throw input_error("sampled function: abscissae and values differ in length");
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!std::isfinite(x[i])) throw input_error("sampled function: abscissae must be finite");
            if (i > 0 && !(x[i] > x[i - 1])) throw input_error("sampled function: abscissae must increase");
            if (std::isnan(v[i]) || v[i] == -inf) throw input_error("sampled function: values must be real or +inf");
        }
    }

    template <class F>
    static SampledFunction sample(const std::vector<double>& xs, F&& f) {
        std::vector<double> vs(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = f(xs[i]);
        return SampledFunction(xs, std::move(vs));
    }

    std::size_t size() const { return x.size(); }

    /// Linear interpolation; +inf if a neighbour is +inf or z lies outside the samples.
    double operator()(double z) const {
        if (x.empty() || z < x.front() || z > x.back()) return inf;
        auto it = std::lower_bound(x.begin(), x.end(), z);
        const std::size_t j = static_cast<std::size_t>(it - x.begin());
        if (x[j] == z) return v[j];
        if (!std::isfinite(v[j - 1]) || !std::isfinite(v[j])) return inf;
        const double w = (z - x[j - 1]) / (x[j] - x[j - 1]);
        return (1.0 - w) * v[j - 1] + w * v[j];
    }
};

/// n uniform points on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw input_error("linspace needs at least two points");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

namespace detail {

struct Hull {
    std::vector<double> x, v;
};

/// Lower convex hull of the finite points (x sorted ascending).
inline Hull lower_hull(const SampledFunction& g) {
    Hull h;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g.v[i])) continue;
        const double xi = g.x[i], vi = g.v[i];
        while (h.x.size() >= 2) {
            const std::size_t n = h.x.size();
            const double x0 = h.x[n - 2], v0 = h.v[n - 2], x1 = h.x[n - 1], v1 = h.v[n - 1];
            // drop (x1, v1) if it lies on or above the chord from (x0, v0) to (xi, vi)
            if ((v1 - v0) * (xi - x0) >= (vi - v0) * (x1 - x0)) {
                h.x.pop_back();
                h.v.pop_back();
            } else {
                break;
            }
        }
        h.x.push_back(xi);
        h.v.push_back(vi);
    }
    if (h.x.size() < 2) throw input_error("legendre transform needs at least two finite samples");
    return h;
}

}  // namespace detail

/// g*(y) = max_i (y x_i - g(x_i)) on the dual grid. With `mark_outside_inf`, dual points
/// whose slope leaves the range of hull slopes get +inf: there the continuum conjugate of
/// the sampled function's piecewise-linear extension is unbounded.
inline SampledFunction legendre(const SampledFunction& g, const std::vector<double>& dual,
                                bool mark_outside_inf = true) {
    const detail::Hull h = detail::lower_hull(g);
    const std::size_t m = h.x.size();
    std::vector<double> slope(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) slope[i] = (h.v[i + 1] - h.v[i]) / (h.x[i + 1] - h.x[i]);
    const double tol = 1e-12 * (1.0 + std::max(std::abs(slope.front()), std::abs(slope.back())));

    std::vector<double> out(dual.size());
    std::size_t j = 0;  // active hull vertex; monotone in y for sorted dual grids
    for (std::size_t k = 0; k < dual.size(); ++k) {
        const double y = dual[k];
        if (k > 0 && y < dual[k - 1]) throw input_error("dual grid must be increasing");
        if (mark_outside_inf && (y < slope.front() - tol || y > slope.back() + tol)) {
            out[k] = inf;
            continue;
        }
        while (j + 1 < m && slope[j] < y) ++j;
        out[k] = y * h.x[j] - h.v[j];
    }
    return SampledFunction(dual, std::move(out));
}

/// Single-point conjugate max_i (y x_i - g(x_i)) over the finite samples.
inline double conjugate_at(const SampledFunction& g, double y) {
    double best = -inf;
    int finite = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::isfinite(g.v[i])) {
            best = std::max(best, y * g.x[i] - g.v[i]);
            ++finite;
        }
    if (finite == 0) throw input_error("conjugate of an all-infinite function");
    return best;
}

inline void write_csv(std::ostream& os, const SampledFunction& f, const char* xname = "y",
                      const char* vname = "phi") {
    os << xname << "," << vname << "\n";
    for (std::size_t i = 0; i < f.size(); ++i) os << format_double(f.x[i]) << "," << format_double(f.v[i]) << "\n";
}

}  // namespace nlsg
