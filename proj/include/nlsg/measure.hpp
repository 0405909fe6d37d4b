#pragma once

#include "nlsg/core.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <type_traits>
#include <utility>
#include <vector>

namespace nlsg {

/// Finitely supported probability measure sum_i w_i delta_{a_i}.
template <int D>
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<Point<D>> atoms, std::vector<double> weights)
        : atoms_(std::move(atoms)), weights_(std::move(weights)) {
        if (atoms_.empty()) throw input_error("measure needs at least one atom");
        if (atoms_.size() != weights_.size()) throw input_error("atom and weight counts differ");
        double total = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (!all_finite<D>(atoms_[i])) throw input_error("atoms must be finite");
            if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
                throw input_error("weights must be nonnegative and finite");
            total += weights_[i];
        }
        if (std::abs(total - 1.0) > 1e-12) throw input_error("weights must sum to 1");
    }

    std::size_t size() const { return atoms_.size(); }
    const std::vector<Point<D>>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    const Point<D>& atom(std::size_t i) const { return atoms_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * f(atoms_[i]);
        return s;
    }

    double max_norm() const {
        double m = 0.0;
        for (const auto& a : atoms_) m = std::max(m, norm<D>(a));
        return m;
    }

private:
    std::vector<Point<D>> atoms_;
    std::vector<double> weights_;
};

template <int D>
DiscreteMeasure<D> point_mass(const Point<D>& m) {
    return DiscreteMeasure<D>({m}, {1.0});
}

inline DiscreteMeasure<1> point_mass(double m) {
    return point_mass<1>(Point<1>{m});
}

/// Atoms and weights from (value, weight) pairs.
inline DiscreteMeasure<1> atoms_1d(const std::vector<std::pair<double, double>>& rows) {
    std::vector<Point<1>> a;
    std::vector<double> w;
    for (const auto& [x, p] : rows) {
        a.push_back({x});
        w.push_back(p);
    }
    return DiscreteMeasure<1>(std::move(a), std::move(w));
}

/// 1/2 delta_{-s} + 1/2 delta_{+s}
inline DiscreteMeasure<1> symmetric_two_point(double s = 1.0) {
    return atoms_1d({{-s, 0.5}, {s, 0.5}});
}

/// Gauss-Hermite quadrature for N(mean, sdev^2) with the given number of nodes.
inline DiscreteMeasure<1> gauss_hermite(int nodes, double mean = 0.0, double sdev = 1.0) {
    if (nodes < 1) throw input_error("Gauss-Hermite needs at least one node");
    if (!(sdev >= 0.0)) throw input_error("standard deviation must be nonnegative");
    const int n = nodes;
    std::vector<double> x(n), w(n);
    // Newton iteration on the orthonormal physicists' Hermite recurrence.
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    double z = 0.0;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(n, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];
        double pp = 0.0;
        int its = 0;
        for (; its < 200; ++its) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        if (its == 200) throw internal_error("Gauss-Hermite Newton iteration did not converge");
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    std::vector<Point<1>> atoms(n);
    std::vector<double> weights(n);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        atoms[n - 1 - i] = {mean + std::sqrt(2.0) * sdev * x[i]};
        weights[n - 1 - i] = w[i] / sqrt_pi;
        total += weights[n - 1 - i];
    }
    for (double& v : weights) v /= total;
    return DiscreteMeasure<1>(std::move(atoms), std::move(weights));
}

/// Independent product of two one-dimensional measures.
inline DiscreteMeasure<2> product(const DiscreteMeasure<1>& a, const DiscreteMeasure<1>& b) {
    std::vector<Point<2>> atoms;
    std::vector<double> w;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            atoms.push_back({a.atom(i)[0], b.atom(j)[0]});
            w.push_back(a.weight(i) * b.weight(j));
        }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    return DiscreteMeasure<2>(std::move(atoms), std::move(w));
}

template <int D>
struct Moments {
    Point<D> mean;
    Matrix<D> second;  // E[y y^T], not centred
};

template <int D>
Moments<D> mean_and_cov(const DiscreteMeasure<D>& mu) {
    Moments<D> m{zero_point<D>(), zero_matrix<D>()};
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto& a = mu.atom(i);
        const double w = mu.weight(i);
        for (int k = 0; k < D; ++k) {
            m.mean[k] += w * a[k];
            for (int l = 0; l < D; ++l) m.second[k][l] += w * a[k] * a[l];
        }
    }
    return m;
}

/// log sum_i w_i exp(v_i), stable for large |v_i|.
inline double log_sum_exp(const std::vector<double>& log_weights, const std::vector<double>& v) {
    double mx = -inf;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (log_weights[i] > -inf) mx = std::max(mx, v[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (log_weights[i] > -inf) s += std::exp(log_weights[i] + v[i] - mx);
    return mx + std::log(s);
}

/// Lambda(x) = log E[exp(x . xi)]
template <int D>
double log_mgf(const DiscreteMeasure<D>& mu, const std::type_identity_t<Point<D>>& x) {
    double mx = -inf;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weight(i) > 0.0) mx = std::max(mx, dot<D>(x, mu.atom(i)));
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weight(i) > 0.0) s += mu.weight(i) * std::exp(dot<D>(x, mu.atom(i)) - mx);
    return mx + std::log(s);
}

inline double log_mgf(const DiscreteMeasure<1>& mu, double x) {
    return log_mgf<1>(mu, Point<1>{x});
}

}  // namespace nlsg
