#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace nlsg {

template <int D>
using Point = std::array<double, D>;

template <int D>
using Matrix = std::array<std::array<double, D>, D>;

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Malformed or out-of-range arguments supplied by the caller.
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation's documented precondition is violated by otherwise valid input.
class precondition_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed in a way that should be impossible for valid input.
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

template <int D>
constexpr Point<D> zero_point() {
    Point<D> p{};
    p.fill(0.0);
    return p;
}

/// x + s * y
template <int D>
inline Point<D> axpy(const Point<D>& x, double s, const Point<D>& y) {
    Point<D> r;
    for (int k = 0; k < D; ++k) r[k] = x[k] + s * y[k];
    return r;
}

template <int D>
inline Point<D> add(const Point<D>& x, const Point<D>& y) {
    return axpy<D>(x, 1.0, y);
}

template <int D>
inline Point<D> sub(const Point<D>& x, const Point<D>& y) {
    return axpy<D>(x, -1.0, y);
}

template <int D>
inline Point<D> scaled(const Point<D>& x, double s) {
    Point<D> r;
    for (int k = 0; k < D; ++k) r[k] = s * x[k];
    return r;
}

template <int D>
inline double dot(const Point<D>& x, const Point<D>& y) {
    double s = 0.0;
    for (int k = 0; k < D; ++k) s += x[k] * y[k];
    return s;
}

template <int D>
inline double norm(const Point<D>& x) {
    return std::sqrt(dot<D>(x, x));
}

template <int D>
inline bool all_finite(const Point<D>& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

/// y^T a y
template <int D>
inline double quadratic_form(const Matrix<D>& a, const Point<D>& y) {
    double s = 0.0;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) s += y[i] * a[i][j] * y[j];
    return s;
}

template <int D>
inline double trace_product(const Matrix<D>& a, const Matrix<D>& b) {
    double s = 0.0;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) s += a[i][j] * b[j][i];
    return s;
}

template <int D>
constexpr Matrix<D> zero_matrix() {
    Matrix<D> m{};
    for (auto& row : m) row.fill(0.0);
    return m;
}

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace nlsg
