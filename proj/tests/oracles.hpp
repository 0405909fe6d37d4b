#pragma once

// Reference computations for the tests, written from the defining formulas and
// independent of the library's expectation, grid and Legendre code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// One-dimensional convex expectation given by its formula on atoms, weights and shifts.
struct Model {
    enum Kind { linear, entropic, shift_sup } kind;
    std::vector<double> atoms;
    std::vector<double> weights;
    std::vector<double> shifts{0.0};  // shift_sup only
    std::vector<double> costs{0.0};

    double operator()(const std::function<double(double)>& g) const {
        switch (kind) {
            case linear: {
                double s = 0.0;
                for (std::size_t i = 0; i < atoms.size(); ++i) s += weights[i] * g(atoms[i]);
                return s;
            }
            case entropic: {
                std::vector<double> v(atoms.size());
                for (std::size_t i = 0; i < atoms.size(); ++i) v[i] = g(atoms[i]);
                const double m = *std::max_element(v.begin(), v.end());
                double s = 0.0;
                for (std::size_t i = 0; i < atoms.size(); ++i) s += weights[i] * std::exp(v[i] - m);
                return m + std::log(s);
            }
            case shift_sup: {
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < shifts.size(); ++k) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < atoms.size(); ++i) s += weights[i] * g(atoms[i] + shifts[k]);
                    best = std::max(best, s - costs[k]);
                }
                return best;
            }
        }
        return 0.0;
    }
};

/// (1/n) E-bar[n f(X_n)] with X_n the average of n iid copies, by enumerating every
/// atom sequence. The first variable is the outermost expectation.
inline double product_functional(const Model& E, const std::function<double(double)>& f, int n) {
    const double h = 1.0 / n;
    std::function<double(int, double)> level = [&](int k, double x) -> double {
        if (k == n) return f(x) / h;
        return E([&](double y) { return level(k + 1, x + h * y); });
    };
    return h * level(0, 0.0);
}

/// Composite Simpson rule for the integral of f against N(0, sd^2) on [-12 sd, 12 sd].
inline double gaussian_integral(const std::function<double(double)>& f, double sd, int panels = 4000) {
    const double a = -12.0 * sd, b = 12.0 * sd;
    const double dx = (b - a) / panels;
    const double norm = 1.0 / (sd * std::sqrt(2.0 * 3.14159265358979323846));
    auto g = [&](double x) { return f(x) * norm * std::exp(-0.5 * x * x / (sd * sd)); };
    double s = g(a) + g(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * dx);
    return s * dx / 3.0;
}

/// Cramer rate of the symmetric +-1 coin at x in (-1, 1).
inline double coin_rate(double x) {
    return 0.5 * (1 + x) * std::log(1 + x) + 0.5 * (1 - x) * std::log(1 - x);
}

/// max over a uniform y-grid of f(x + t y) - t phi(y).
inline double hopf_lax_1d(const std::function<double(double)>& f, const std::function<double(double)>& phi,
                          double x, double t, double ylo, double yhi, int count) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) {
        const double y = ylo + (yhi - ylo) * i / (count - 1);
        best = std::max(best, f(x + t * y) - t * phi(y));
    }
    return best;
}

/// Exact P(S_n >= k) for S_n ~ Binomial(n, 1/2), as a log.
inline double log_binomial_tail(int n, int k) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (int j = std::max(k, 0); j <= n; ++j) {
        const double t = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) - n * std::log(2.0);
        terms.push_back(t);
        best = std::max(best, t);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    return best + std::log(s);
}

}  // namespace oracle
