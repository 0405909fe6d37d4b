#pragma once

// Convex expectations on finitely supported reference measures. Payoffs are
// passed as callables Point<D> -> double so that the shift-supremum variants
// can evaluate them off the atoms.

#include "nlsg/measure.hpp"
#include "nlsg/penalty.hpp"

#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <variant>

namespace nlsg {

template <int D>
struct Linear {
    DiscreteMeasure<D> mu;
};

template <int D>
struct Entropic {
    DiscreteMeasure<D> mu;
};

template <int D>
struct Shortfall {
    DiscreteMeasure<D> mu;
    double p;
};

template <int D>
struct ShiftSup {
    DiscreteMeasure<D> mu;
    ShiftSet<D> shifts;
};

template <int D>
struct SymmetricTwoPointSup {
    DiscreteMeasure<D> mu;
    ShiftSet<D> shifts;
};

template <int D>
class ConvexExpectation;

/// X -> inf_a E[X + a.xi], realised by golden-section search over [-bound, bound]^D.
template <int D>
struct Centered {
    std::shared_ptr<const ConvexExpectation<D>> base;
    double bound = 8.0;
};

template <int D>
class ConvexExpectation {
public:
    using Variant = std::variant<Linear<D>, Entropic<D>, Shortfall<D>, ShiftSup<D>,
                                 SymmetricTwoPointSup<D>, Centered<D>>;

    template <class T>
        requires std::is_constructible_v<Variant, T>
    ConvexExpectation(T model) : v_(std::move(model)) {
        validate();
    }

    static ConvexExpectation linear(DiscreteMeasure<D> mu) { return Linear<D>{std::move(mu)}; }
    static ConvexExpectation entropic(DiscreteMeasure<D> mu) { return Entropic<D>{std::move(mu)}; }
    static ConvexExpectation shortfall(DiscreteMeasure<D> mu, double p) {
        return Shortfall<D>{std::move(mu), p};
    }
    static ConvexExpectation shift_sup(DiscreteMeasure<D> mu, ShiftSet<D> s) {
        return ShiftSup<D>{std::move(mu), std::move(s)};
    }
    static ConvexExpectation symmetric_two_point_sup(DiscreteMeasure<D> mu, ShiftSet<D> s) {
        return SymmetricTwoPointSup<D>{std::move(mu), std::move(s)};
    }

    const Variant& variant() const { return v_; }

    std::string name() const {
        return std::visit(
            [](const auto& m) -> std::string {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, Linear<D>>) return "linear";
                else if constexpr (std::is_same_v<T, Entropic<D>>) return "entropic";
                else if constexpr (std::is_same_v<T, Shortfall<D>>) return "shortfall";
                else if constexpr (std::is_same_v<T, ShiftSup<D>>) return "shift_sup";
                else if constexpr (std::is_same_v<T, SymmetricTwoPointSup<D>>) return "two_point_sup";
                else return "centered(" + m.base->name() + ")";
            },
            v_);
    }

    /// Evaluate on the payoff g. Non-finite payoff values raise input_error.
    template <class G>
    double operator()(G&& g) const {
        auto gv = [&](const Point<D>& y) {
            const double v = g(y);
            if (!std::isfinite(v)) throw input_error("payoff is not finite at a required point");
            return v;
        };
        return std::visit([&](const auto& m) { return eval(m, gv); }, v_);
    }

private:
    Variant v_;

    void validate() const {
        std::visit(
            [](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, Shortfall<D>>) {
                    if (!(m.p > 1.0) || !std::isfinite(m.p)) throw input_error("shortfall exponent must be > 1");
                } else if constexpr (std::is_same_v<T, ShiftSup<D>> || std::is_same_v<T, SymmetricTwoPointSup<D>>) {
                    if (m.shifts.shifts.empty()) throw input_error("shift set is empty");
                    if (m.shifts.shifts.size() != m.shifts.costs.size())
                        throw input_error("shift and cost counts differ");
                    for (double c : m.shifts.costs)
                        if (!std::isfinite(c) || c < 0.0) throw input_error("shift costs must be finite and >= 0");
                } else if constexpr (std::is_same_v<T, Centered<D>>) {
                    if (!m.base) throw input_error("centered model needs a base model");
                    if (!(m.bound > 0.0)) throw input_error("centering search bound must be positive");
                }
            },
            v_);
    }

    template <class G>
    static double eval(const Linear<D>& m, G& g) {
        return m.mu.integrate(g);
    }

    template <class G>
    static double eval(const Entropic<D>& m, G& g) {
        const auto& mu = m.mu;
        std::vector<double> lw(mu.size()), v(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
            lw[i] = mu.weight(i) > 0.0 ? std::log(mu.weight(i)) : -inf;
            v[i] = mu.weight(i) > 0.0 ? g(mu.atom(i)) : 0.0;
        }
        double r = log_sum_exp(lw, v);
        // log-sum-exp of a constant vector is only constant up to rounding.
        double lo = inf, hi = -inf;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (lw[i] > -inf) lo = std::min(lo, v[i]), hi = std::max(hi, v[i]);
        return std::clamp(r, lo, hi);
    }

    template <class G>
    static double eval(const Shortfall<D>& m, G& g) {
        const auto& mu = m.mu;
        std::vector<double> v(mu.size());
        double lo = inf, hi = -inf;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            v[i] = g(mu.atom(i));
            if (mu.weight(i) > 0.0) lo = std::min(lo, v[i]), hi = std::max(hi, v[i]);
        }
        if (lo == hi) return lo;
        auto excess = [&](double level) {
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double d = 1.0 + v[i] - level;
                if (d > 0.0) s += mu.weight(i) * std::pow(d, m.p);
            }
            return s;
        };
        double a = lo - 1.0, b = hi + 1.0;  // excess(a) >= 2^p > 1, excess(b) = 0
        if (!(excess(a) > 1.0) || !(excess(b) <= 1.0)) throw internal_error("shortfall bracket failed");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (excess(mid) <= 1.0) b = mid;
            else a = mid;
        }
        return b;
    }

    template <class G>
    static double eval(const ShiftSup<D>& m, G& g) {
        double best = -inf;
        const auto& s = m.shifts;
        for (std::size_t k = 0; k < s.shifts.size(); ++k) {
            const Point<D>& l = s.shifts[k];
            const double v = m.mu.integrate([&](const Point<D>& a) { return g(add<D>(a, l)); }) - s.costs[k];
            best = std::max(best, v);
        }
        return best;
    }

    template <class G>
    static double eval(const SymmetricTwoPointSup<D>& m, G& g) {
        double best = -inf;
        const auto& s = m.shifts;
        for (std::size_t k = 0; k < s.shifts.size(); ++k) {
            const Point<D>& l = s.shifts[k];
            const double v = m.mu.integrate([&](const Point<D>& a) {
                return 0.5 * (g(add<D>(a, l)) + g(sub<D>(a, l)));
            }) - s.costs[k];
            best = std::max(best, v);
        }
        return best;
    }

    template <class G>
    static double eval(const Centered<D>& m, G& g) {
        const ConvexExpectation& base = *m.base;
        // Type-erased so that nested centring does not instantiate payoff types without end.
        Point<D> shift_dir{};
        const std::function<double(const Point<D>&)> tilted = [&](const Point<D>& y) {
            return g(y) + dot<D>(shift_dir, y);
        };
        auto value = [&](const Point<D>& a) {
            shift_dir = a;
            return base(tilted);
        };
        if constexpr (D == 1) {
            return golden_min([&](double a) { return value({a}); }, -m.bound, m.bound);
        } else {
            return golden_min(
                [&](double a0) {
                    return golden_min([&](double a1) { return value({a0, a1}); }, -m.bound, m.bound);
                },
                -m.bound, m.bound);
        }
    }

    /// Minimum of a convex function on [lo, hi], including the endpoints.
    template <class F>
    static double golden_min(F&& f, double lo, double hi) {
        const double r = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        double x1 = b - r * (b - a), x2 = a + r * (b - a);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 90 && b - a > 1e-12; ++it) {
            if (f1 <= f2) {
                b = x2, x2 = x1, f2 = f1;
                x1 = b - r * (b - a), f1 = f(x1);
            } else {
                a = x1, x1 = x2, f1 = f2;
                x2 = a + r * (b - a), f2 = f(x2);
            }
        }
        double best = std::min(f1, f2);
        best = std::min(best, f(0.5 * (a + b)));
        best = std::min({best, f(lo), f(hi)});
        if (lo <= 0.0 && hi >= 0.0) best = std::min(best, f(0.0));
        return best;
    }
};

template <int D, class G>
double expect(const ConvexExpectation<D>& E, G&& g) {
    return E(std::forward<G>(g));
}

/// E[a.xi] for a given direction a.
template <int D>
double linear_value(const ConvexExpectation<D>& E, const std::type_identity_t<Point<D>>& a) {
    return E([&](const Point<D>& y) { return dot<D>(a, y); });
}

inline double linear_value(const ConvexExpectation<1>& E, double a) {
    return linear_value<1>(E, Point<1>{a});
}

/// Probe directions used for the mean-zero checks: +-1, +-2 along each axis.
template <int D>
std::vector<Point<D>> centering_probes() {
    std::vector<Point<D>> out;
    for (int k = 0; k < D; ++k)
        for (double s : {-2.0, -1.0, 1.0, 2.0}) {
            Point<D> a = zero_point<D>();
            a[k] = s;
            out.push_back(a);
        }
    return out;
}

/// True when |E[a.xi]| <= tol for every probe direction.
template <int D>
bool is_centered(const ConvexExpectation<D>& E, double tol = 1e-9) {
    for (const auto& a : centering_probes<D>())
        if (std::abs(linear_value<D>(E, a)) > tol) return false;
    return true;
}

/// Mean-centred version X -> inf_a E[X + a.xi]. Requires E[a.xi] >= 0 on the probes.
template <int D>
ConvexExpectation<D> centered(const ConvexExpectation<D>& E, double bound = 8.0, double tol = 1e-12) {
    for (const auto& a : centering_probes<D>())
        if (linear_value<D>(E, a) < -tol)
            throw precondition_error("centering needs E[a xi] >= 0 for all probe directions a");
    return Centered<D>{std::make_shared<const ConvexExpectation<D>>(E), bound};
}

}  // namespace nlsg
