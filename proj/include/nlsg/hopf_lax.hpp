#pragma once

// Hopf-Lax transforms sup_y (f(x + t y) - phi(y) t) over a sampled rate
// function, and the two-sided envelopes built from bounding Hamiltonians.

#include "nlsg/expectation.hpp"
#include "nlsg/grid.hpp"
#include "nlsg/legendre.hpp"

#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace nlsg {

/// phi sampled on y-values. `radial` means the samples are phi(|y|) at |y| = y[i] >= 0;
/// that is the only form accepted in two dimensions.
struct RateFunction {
    SampledFunction samples;
    bool radial = false;

    RateFunction(SampledFunction s, bool is_radial = false) : samples(std::move(s)), radial(is_radial) {
        if (samples.size() == 0) throw input_error("rate function needs at least one sample");
        bool any_finite = false;
        for (double v : samples.v) {
            if (v < -1e-9) throw input_error("rate function values must be >= 0");
            any_finite = any_finite || std::isfinite(v);
        }
        if (!any_finite) throw input_error("rate function is +inf everywhere");
        if (radial && samples.x.front() < 0.0) throw input_error("radial rate needs |y| >= 0");
    }

    /// 0 at y0, +inf at every other listed point.
    static RateFunction indicator_point(double y0 = 0.0) { return RateFunction(SampledFunction({y0}, {0.0})); }

    /// 0 on [-r, r] sampled with `count` points, nothing outside.
    static RateFunction indicator_ball(double r, int count) {
        auto y = linspace(-r, r, count);
        return RateFunction(SampledFunction(y, std::vector<double>(y.size(), 0.0)));
    }

    template <class F>
    static RateFunction sample(const std::vector<double>& y, F&& phi, bool is_radial = false) {
        return RateFunction(SampledFunction::sample(y, phi), is_radial);
    }

    double min_value() const {
        double m = inf;
        for (double v : samples.v) m = std::min(m, v);
        return m;
    }

    /// Grid point with the smallest value (the smallest |y| among ties).
    double argmin() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < samples.size(); ++i) {
            const double v = samples.v[i], b = samples.v[best];
            if (v < b || (v == b && std::abs(samples.x[i]) < std::abs(samples.x[best]))) best = i;
        }
        return samples.x[best];
    }

    /// Checks min = 0 within tol and convexity of the finite part.
    void check(double tol = 1e-6) const {
        if (std::abs(min_value()) > tol)
            throw precondition_error("rate minimum is " + format_double(min_value()) +
                                     ", not 0; enlarge or refine the dual grids");
        const auto& x = samples.x;
        const auto& v = samples.v;
        for (std::size_t i = 1; i + 1 < x.size(); ++i) {
            if (!std::isfinite(v[i - 1]) || !std::isfinite(v[i]) || !std::isfinite(v[i + 1])) continue;
            const double s0 = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
            const double s1 = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
            if (s1 < s0 - 1e-7 * (1.0 + std::abs(s0))) throw precondition_error("rate function is not convex");
        }
    }
};

/// phi(y) = sup_z (y z - E[z xi]) with z on `z_grid` and y on `y_grid`. In 2D the model is
/// probed along the first axis and the rate is returned in radial form.
template <int D>
RateFunction conjugate_rate(const ConvexExpectation<D>& E, const std::vector<double>& z_grid,
                            const std::vector<double>& y_grid, double tol = 1e-6) {
    auto H = SampledFunction::sample(z_grid, [&](double z) {
        Point<D> a = zero_point<D>();
        a[0] = z;
        return linear_value<D>(E, a);
    });
    RateFunction r(legendre(H, y_grid), D == 2);
    r.check(tol);
    return r;
}

namespace detail {

template <int D>
struct Candidate {
    Point<D> y;
    double cost;
};

/// Finite candidates ordered by |y| so that strict improvement breaks ties toward small |y|.
template <int D>
std::vector<Candidate<D>> rate_candidates(const RateFunction& phi) {
    std::vector<Candidate<D>> c;
    const auto& s = phi.samples;
    if constexpr (D == 1) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!std::isfinite(s.v[i])) continue;
            c.push_back({{s.x[i]}, s.v[i]});
            if (phi.radial && s.x[i] > 0.0) c.push_back({{-s.x[i]}, s.v[i]});
        }
    } else {
        if (!phi.radial) throw input_error("two-dimensional rate functions must be radial");
        constexpr int directions = 16;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!std::isfinite(s.v[i])) continue;
            const double r = s.x[i];
            if (r == 0.0) {
                c.push_back({{0.0, 0.0}, s.v[i]});
                continue;
            }
            for (int k = 0; k < directions; ++k) {
                const double th = 2.0 * std::numbers::pi * k / directions;
                c.push_back({{r * std::cos(th), r * std::sin(th)}, s.v[i]});
            }
        }
    }
    std::stable_sort(c.begin(), c.end(),
                     [](const Candidate<D>& a, const Candidate<D>& b) { return norm<D>(a.y) < norm<D>(b.y); });
    return c;
}

}  // namespace detail

template <int D>
GridFunction<D> hopf_lax(const GridFunction<D>& f, double t, const RateFunction& phi) {
    if (!(t >= 0.0)) throw input_error("time must be >= 0");
    if (t == 0.0) return f;
    const auto cand = detail::rate_candidates<D>(phi);
    const Grid<D>& grid = f.grid();
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Point<D> x = grid.node(i);
        double best = -inf;
        for (const auto& c : cand) {
            const double v = f(axpy<D>(x, t, c.y)) - c.cost * t;
            if (v > best) best = v;
        }
        out[i] = best;
    }
    return GridFunction<D>(grid, std::move(out), f.extension());
}

template <int D>
struct Envelope {
    GridFunction<D> lower;
    GridFunction<D> upper;
};

/// (S_-(t) f, S_+(t) f) with rates H_-^* >= H_+^*. H_- is conjugated as given, so a
/// nonconvex lower bound contributes the conjugate of its convex envelope.
template <int D>
Envelope<D> envelope(const GridFunction<D>& f, double t, const SampledFunction& h_minus,
                     const SampledFunction& h_plus, const std::vector<double>& y_grid) {
    if (h_minus.x != h_plus.x) throw input_error("envelope Hamiltonians must share their grid");
    for (std::size_t i = 0; i < h_minus.size(); ++i)
        if (h_minus.v[i] > h_plus.v[i] + 1e-12)
            throw input_error("lower Hamiltonian exceeds upper Hamiltonian at z = " + format_double(h_minus.x[i]));
    RateFunction lower_rate(legendre(h_minus, y_grid), D == 2);
    RateFunction upper_rate(legendre(h_plus, y_grid), D == 2);
    return {hopf_lax(f, t, lower_rate), hopf_lax(f, t, upper_rate)};
}

/// sup_K |T(s + t) f - T(s) T(t) f|
template <int D>
double semigroup_defect(const GridFunction<D>& f, double s, double t, const RateFunction& phi, const Box<D>& K) {
    if (!(s >= 0.0) || !(t >= 0.0)) throw input_error("times must be >= 0");
    if (s == 0.0) return 0.0;
    return sup_distance_on(hopf_lax(f, s + t, phi), hopf_lax(hopf_lax(f, t, phi), s, phi), K);
}

inline void write_csv(std::ostream& os, const RateFunction& r) {
    write_csv(os, r.samples, r.radial ? "r" : "y", "phi");
}

inline RateFunction read_rate_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw input_error("empty rate CSV");
    const bool radial = line.rfind("r,", 0) == 0;
    std::vector<double> y, v;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw input_error("bad rate CSV row '" + line + "'");
        y.push_back(std::stod(line.substr(0, comma)));
        const std::string tok = line.substr(comma + 1);
        v.push_back(tok == "inf" ? inf : std::stod(tok));
    }
    return RateFunction(SampledFunction(std::move(y), std::move(v)), radial);
}

}  // namespace nlsg
