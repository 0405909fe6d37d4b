#pragma once

// Convex penalties phi: [0, inf) -> [0, inf] sampled on a parameter grid, and
// the finite shift sets used by the penalised shift-supremum expectations.

#include "nlsg/core.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace nlsg {

class PenaltyFunction {
public:
    /// `slope_bound` is the declared superlinearity certificate phi(c_m)/c_m >= slope_bound;
    /// it is only checked when the last value is finite.
    PenaltyFunction(std::vector<double> c, std::vector<double> values, double slope_bound = 0.0)
        : c_(std::move(c)), v_(std::move(values)), slope_bound_(slope_bound) {
        if (c_.size() < 2) throw input_error("penalty grid needs at least two points");
        if (c_.size() != v_.size()) throw input_error("penalty grid and values differ in length");
        if (c_[0] != 0.0) throw input_error("penalty grid must start at c = 0");
        if (v_[0] != 0.0) throw input_error("penalty must satisfy phi(0) = 0");
        for (std::size_t i = 1; i < c_.size(); ++i) {
            if (!(c_[i] > c_[i - 1]) || !std::isfinite(c_[i]))
                throw input_error("penalty grid must be strictly increasing and finite");
            if (std::isnan(v_[i]) || v_[i] == -inf) throw input_error("penalty values must be in [0, inf]");
            if (v_[i] < v_[i - 1] - 1e-12) throw input_error("penalty must be nondecreasing");
        }
        // Convexity on the finite part: divided differences are nondecreasing.
        std::size_t last = 0;
        while (last + 1 < v_.size() && std::isfinite(v_[last + 1])) ++last;
        for (std::size_t i = last + 1; i < v_.size(); ++i)
            if (std::isfinite(v_[i])) throw input_error("penalty cannot return to finite values after inf");
        for (std::size_t i = 1; i + 1 <= last; ++i) {
            const double s0 = (v_[i] - v_[i - 1]) / (c_[i] - c_[i - 1]);
            const double s1 = (v_[i + 1] - v_[i]) / (c_[i + 1] - c_[i]);
            if (s1 < s0 - 1e-9 * (1.0 + std::abs(s0))) throw input_error("penalty must be convex");
        }
        if (last + 1 == v_.size() && v_.back() / c_.back() < slope_bound_ - 1e-12)
            throw input_error("penalty does not meet its declared superlinearity bound");
    }

    /// phi(c) = 0 for c <= r, +inf beyond.
    static PenaltyFunction zero_on(double r) {
        if (!(r > 0.0)) throw input_error("zero_on radius must be positive");
        return PenaltyFunction({0.0, r, 2.0 * r}, {0.0, 0.0, inf});
    }

    /// phi(c) = coef * c^exponent on `count` uniform points of [0, cmax], +inf beyond.
    static PenaltyFunction power(double coef, double exponent, double cmax, int count) {
        if (!(coef > 0.0) || !(exponent >= 1.0)) throw input_error("power penalty needs coef > 0, exponent >= 1");
        if (count < 2 || !(cmax > 0.0)) throw input_error("power penalty needs cmax > 0 and count >= 2");
        std::vector<double> c(count), v(count);
        for (int i = 0; i < count; ++i) {
            c[i] = cmax * i / (count - 1);
            v[i] = coef * std::pow(c[i], exponent);
        }
        return PenaltyFunction(std::move(c), std::move(v), v.back() / cmax);
    }

    const std::vector<double>& grid() const { return c_; }
    const std::vector<double>& values() const { return v_; }
    double slope_bound() const { return slope_bound_; }

    /// Largest c with phi(c) finite.
    double finite_radius() const {
        std::size_t i = 0;
        while (i + 1 < v_.size() && std::isfinite(v_[i + 1])) ++i;
        return c_[i];
    }

    double operator()(double c) const {
        if (std::isnan(c) || c < 0.0) throw input_error("penalty argument must be >= 0");
        if (c > c_.back()) return inf;
        auto it = std::lower_bound(c_.begin(), c_.end(), c);
        std::size_t j = static_cast<std::size_t>(it - c_.begin());
        if (c_[j] == c) return v_[j];
        const double a = v_[j - 1], b = v_[j];
        if (!std::isfinite(a) || !std::isfinite(b)) return inf;
        const double w = (c - c_[j - 1]) / (c_[j] - c_[j - 1]);
        return (1.0 - w) * a + w * b;
    }

    bool operator==(const PenaltyFunction&) const = default;

private:
    std::vector<double> c_;
    std::vector<double> v_;
    double slope_bound_;
};

/// Finite shift set with the penalty paid at each shift.
template <int D>
struct ShiftSet {
    std::vector<Point<D>> shifts;
    std::vector<double> costs;
};

/// Shifts {-r, ..., r} in 1D with `count` uniform points (count odd so 0 is included),
/// dropping shifts with infinite cost.
inline ShiftSet<1> uniform_shifts(const PenaltyFunction& phi, double radius, int count) {
    if (count < 1 || count % 2 == 0) throw input_error("shift count must be odd and positive");
    if (!(radius >= 0.0)) throw input_error("shift radius must be >= 0");
    ShiftSet<1> s;
    for (int i = 0; i < count; ++i) {
        const double l = count == 1 ? 0.0 : -radius + 2.0 * radius * i / (count - 1);
        const double lam = (2 * i == count - 1) ? 0.0 : l;
        const double cost = phi(std::abs(lam));
        if (std::isfinite(cost)) {
            s.shifts.push_back({lam});
            s.costs.push_back(cost);
        }
    }
    return s;
}

/// Shifts +-c_i for every finite node of the penalty grid.
inline ShiftSet<1> penalty_grid_shifts(const PenaltyFunction& phi, bool symmetric = true) {
    ShiftSet<1> s;
    const auto& c = phi.grid();
    const auto& v = phi.values();
    for (std::size_t i = c.size(); i-- > 1;)
        if (symmetric && std::isfinite(v[i])) {
            s.shifts.push_back({-c[i]});
            s.costs.push_back(v[i]);
        }
    for (std::size_t i = 0; i < c.size(); ++i)
        if (std::isfinite(v[i])) {
            s.shifts.push_back({c[i]});
            s.costs.push_back(v[i]);
        }
    return s;
}

/// Square lattice spacing*Z^2 intersected with the ball of the given radius.
inline ShiftSet<2> lattice_shifts(const PenaltyFunction& phi, double radius, double spacing) {
    if (!(spacing > 0.0) || !(radius >= 0.0)) throw input_error("lattice needs spacing > 0, radius >= 0");
    const int m = static_cast<int>(std::floor(radius / spacing + 1e-9));
    ShiftSet<2> s;
    for (int j = -m; j <= m; ++j)
        for (int i = -m; i <= m; ++i) {
            const Point<2> l{i * spacing, j * spacing};
            const double r = norm<2>(l);
            if (r > radius + 1e-12) continue;
            const double cost = phi(r);
            if (!std::isfinite(cost)) continue;
            s.shifts.push_back(l);
            s.costs.push_back(cost);
        }
    return s;
}

}  // namespace nlsg
