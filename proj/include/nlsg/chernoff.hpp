#pragma once

// One-step operators (I(t)f)(x) = t E[f(psi(t, x, .)) / t], their iteration
// over equidistant partitions, and Chernoff limits with convergence tables.

#include "nlsg/expectation.hpp"
#include "nlsg/grid.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace nlsg {

enum class ScalingKind { first_order, perturbed, second_order };

inline std::string to_string(ScalingKind k) {
    switch (k) {
        case ScalingKind::first_order: return "affine";
        case ScalingKind::perturbed: return "perturbed";
        case ScalingKind::second_order: return "second_order";
    }
    return "?";
}

/// psi(t, x, y): x + t y, x + t drift(x) + t y, or x + sqrt(t) y.
template <int D>
class ScalingFamily {
public:
    using Drift = std::function<Point<D>(const Point<D>&)>;

    static ScalingFamily affine() { return ScalingFamily(ScalingKind::first_order, nullptr, 0.0); }
    static ScalingFamily second_order() { return ScalingFamily(ScalingKind::second_order, nullptr, 0.0); }

    /// Time-linear perturbation with a drift that is bounded and `lipschitz`-Lipschitz.
    static ScalingFamily perturbed(Drift drift, double lipschitz) {
        if (!drift) throw input_error("perturbed family needs a drift");
        if (!(lipschitz >= 0.0)) throw input_error("drift Lipschitz bound must be >= 0");
        return ScalingFamily(ScalingKind::perturbed, std::move(drift), lipschitz);
    }

    static ScalingFamily perturbed(const GridFunction<1>& drift, double lipschitz)
        requires(D == 1)
    {
        return perturbed([drift](const Point<1>& x) { return Point<1>{drift(x)}; }, lipschitz);
    }

    ScalingKind kind() const { return kind_; }
    double lipschitz() const { return lipschitz_; }

    Point<D> drift(const Point<D>& x) const {
        return kind_ == ScalingKind::perturbed ? drift_(x) : zero_point<D>();
    }

    Point<D> operator()(double t, const Point<D>& x, const Point<D>& y) const {
        switch (kind_) {
            case ScalingKind::first_order: return axpy<D>(x, t, y);
            case ScalingKind::perturbed: return axpy<D>(axpy<D>(x, t, drift_(x)), t, y);
            case ScalingKind::second_order: return axpy<D>(x, std::sqrt(t), y);
        }
        return x;
    }

    /// psi_0(x, y) = lim (psi(h, x, y) - x) / h; undefined for the second-order family.
    Point<D> velocity(const Point<D>& x, const Point<D>& y) const {
        if (kind_ == ScalingKind::second_order)
            throw precondition_error("second-order scaling has no first-order velocity");
        return kind_ == ScalingKind::perturbed ? add<D>(drift_(x), y) : y;
    }

private:
    ScalingFamily(ScalingKind k, Drift d, double L) : kind_(k), drift_(std::move(d)), lipschitz_(L) {}

    ScalingKind kind_;
    Drift drift_;
    double lipschitz_;
};

/// t = k h + r with k = max{k : k h <= t} and r in [0, h).
struct Partition {
    double horizon;
    double step;
    long steps;
    double remainder;

    Partition(double t, double h) : horizon(t), step(h) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw input_error("partition horizon must be >= 0");
        if (!(h > 0.0 && h <= 1.0)) throw input_error("partition step must lie in (0, 1]");
        const double q = t / h;
        double k = std::floor(q);
        if (std::abs(q - std::round(q)) <= 1e-12 * std::max(1.0, q)) k = std::round(q);
        steps = static_cast<long>(k);
        remainder = t - k * h;
        if (remainder < 1e-12 * h) remainder = 0.0;
    }

    long applications() const { return steps + (remainder > 0.0 ? 1 : 0); }
};

template <int D>
struct OneStepOperator {
    ConvexExpectation<D> expectation;
    ScalingFamily<D> scaling;
    GrowthWeight weight{0};

    /// t E[g(psi(t, x, .)) / t] for an arbitrary payoff callable g.
    template <class G>
    double apply_at(double t, const Point<D>& x, G&& g) const {
        if (!(t >= 0.0)) throw input_error("time step must be >= 0");
        if (t == 0.0) return g(x);
        return t * expectation([&](const Point<D>& y) { return g(scaling(t, x, y)) / t; });
    }
};

template <int D>
GridFunction<D> one_step(const OneStepOperator<D>& I, double t, const GridFunction<D>& f) {
    if (!(t >= 0.0)) throw input_error("time step must be >= 0");
    if (t == 0.0) return f;
    const Grid<D>& grid = f.grid();
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = I.apply_at(t, grid.node(i), f);
    return GridFunction<D>(grid, std::move(out), f.extension());
}

/// I(h)^k I(r) f: the remainder step is applied first.
template <int D>
GridFunction<D> iterate(const OneStepOperator<D>& I, const Partition& pi, const GridFunction<D>& f) {
    GridFunction<D> u = f;
    if (pi.remainder > 0.0) u = one_step(I, pi.remainder, u);
    for (long k = 0; k < pi.steps; ++k) u = one_step(I, pi.step, u);
    return u;
}

struct ChernoffRow {
    std::string schedule;  // "uniform" or "dyadic"
    long n;
    double h;
    double sup_gap_on_K;        // vs the previous entry of the same schedule; nan for the first
    double cross_schedule_gap;  // vs the other schedule's entry with the nearest step; nan if none
    double value_at_origin;
};

struct ChernoffOptions {
    std::vector<long> uniform{4, 8, 16, 32, 64, 128};
    std::vector<int> dyadic{2, 3, 4, 5, 6, 7};  // h = 2^-j
    double tolerance = 1e-2;
};

template <int D>
struct ChernoffResult {
    GridFunction<D> limit;  // iterate at the finest uniform step
    GridFunction<D> dyadic_limit;
    std::vector<ChernoffRow> rows;
    double uniform_gap;  // last successive gap of the uniform schedule
    double dyadic_gap;
    double cross_gap;  // finest uniform vs finest dyadic, sup over K
    bool cauchy;
};

template <int D>
ChernoffResult<D> chernoff_limit(const OneStepOperator<D>& I, double t, const GridFunction<D>& f, const Box<D>& K,
                                 const ChernoffOptions& opt = {}) {
    check_box_inside(f.grid(), K);
    if (opt.uniform.empty() || opt.dyadic.empty()) throw input_error("both schedules need at least one entry");
    for (std::size_t i = 1; i < opt.uniform.size(); ++i)
        if (opt.uniform[i] <= opt.uniform[i - 1]) throw input_error("uniform schedule must be strictly increasing");
    for (std::size_t i = 1; i < opt.dyadic.size(); ++i)
        if (opt.dyadic[i] <= opt.dyadic[i - 1]) throw input_error("dyadic schedule must be strictly increasing");
    if (opt.uniform.front() < 1 || opt.dyadic.front() < 0) throw input_error("schedule entries must be positive");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<GridFunction<D>> uni, dya;
    std::vector<double> hu, hd;
    for (long n : opt.uniform) {
        hu.push_back(1.0 / n);
        uni.push_back(iterate(I, Partition(t, hu.back()), f));
    }
    for (int j : opt.dyadic) {
        hd.push_back(std::ldexp(1.0, -j));
        dya.push_back(iterate(I, Partition(t, hd.back()), f));
    }

    auto nearest = [](const std::vector<double>& hs, double h) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < hs.size(); ++i)
            if (std::abs(std::log(hs[i] / h)) < std::abs(std::log(hs[best] / h))) best = i;
        return best;
    };

    std::vector<ChernoffRow> rows;
    for (std::size_t i = 0; i < uni.size(); ++i) {
        const double gap = i == 0 ? nan : sup_distance_on(uni[i], uni[i - 1], K);
        const double cross = sup_distance_on(uni[i], dya[nearest(hd, hu[i])], K);
        rows.push_back({"uniform", opt.uniform[i], hu[i], gap, cross, uni[i].value_at_origin()});
    }
    for (std::size_t i = 0; i < dya.size(); ++i) {
        const double gap = i == 0 ? nan : sup_distance_on(dya[i], dya[i - 1], K);
        const double cross = sup_distance_on(dya[i], uni[nearest(hu, hd[i])], K);
        rows.push_back({"dyadic", std::lround(1.0 / hd[i]), hd[i], gap, cross, dya[i].value_at_origin()});
    }
    const double ug = uni.size() > 1 ? sup_distance_on(uni.back(), uni[uni.size() - 2], K) : 0.0;
    const double dg = dya.size() > 1 ? sup_distance_on(dya.back(), dya[dya.size() - 2], K) : 0.0;
    const double cg = sup_distance_on(uni.back(), dya.back(), K);
    const bool cauchy = ug <= opt.tolerance && dg <= opt.tolerance;
    return {uni.back(), dya.back(), std::move(rows), ug, dg, cg, cauchy};
}

inline void write_csv(std::ostream& os, const std::vector<ChernoffRow>& rows) {
    os << "schedule,n,h,sup_gap_on_K,cross_schedule_gap,value_at_origin\n";
    for (const auto& r : rows)
        os << r.schedule << "," << r.n << "," << format_double(r.h) << "," << format_double(r.sup_gap_on_K) << ","
           << format_double(r.cross_schedule_gap) << "," << format_double(r.value_at_origin) << "\n";
}

/// c = max over probe t of ||(I(t)f - f)^+||_kappa / t.
template <int D>
double upper_lipschitz_certificate(const OneStepOperator<D>& I, const GridFunction<D>& f,
                                   const std::vector<double>& probes, GrowthWeight w) {
    if (probes.empty()) throw input_error("need at least one probe time");
    double c = 0.0;
    for (double t : probes) {
        if (!(t > 0.0)) throw input_error("probe times must be positive");
        const double v = weighted_norm(positive_part(difference(one_step(I, t, f), f)), w) / t;
        c = std::max(c, v);
    }
    return c;
}

struct LipschitzReport {
    double coarse;
    double refined;
    bool stable;
};

/// Certificate on the probes and on the probes plus half the smallest probe; stable
/// when the refined value is finite and within 10% of the coarse one.
template <int D>
LipschitzReport upper_lipschitz_stability(const OneStepOperator<D>& I, const GridFunction<D>& f,
                                          std::vector<double> probes, GrowthWeight w) {
    const double coarse = upper_lipschitz_certificate(I, f, probes, w);
    probes.push_back(*std::min_element(probes.begin(), probes.end()) / 2.0);
    const double refined = upper_lipschitz_certificate(I, f, probes, w);
    return {coarse, refined, std::isfinite(refined) && refined <= 1.1 * coarse + 1e-12};
}

/// Probe times t0, t0/2, ..., t0/2^(count-1).
inline std::vector<double> halving_probes(double t0, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(std::ldexp(t0, -i));
    return out;
}

}  // namespace nlsg
