#pragma once

// Recursive statistics, nonlinear LLN/CLT functionals, generator checks and
// exact large-deviation measurements for lattice-valued iid sums.

#include "nlsg/chernoff.hpp"
#include "nlsg/legendre.hpp"

#include <optional>
#include <ostream>
#include <random>

namespace nlsg {

/// X_n: fold psi(t/n, ., y_i) over the samples, starting at 0.
template <int D>
Point<D> recursive_statistic(const ScalingFamily<D>& psi, double t,
                             const std::type_identity_t<std::vector<Point<D>>>& samples) {
    if (samples.empty()) throw input_error("recursive statistic needs at least one sample");
    const double h = t / static_cast<double>(samples.size());
    Point<D> x = zero_point<D>();
    for (const auto& y : samples) x = psi(h, x, y);
    return x;
}

/// (I(1/n)^n f)(0) for the one-step operator built from E and psi.
template <int D>
double nonlinear_functional(const ConvexExpectation<D>& E, const ScalingFamily<D>& psi, const GridFunction<D>& f,
                            long n) {
    if (n < 1) throw input_error("n must be >= 1");
    OneStepOperator<D> I{E, psi};
    return iterate(I, Partition(1.0, 1.0 / n), f).value_at_origin();
}

/// Second-order functional; E must satisfy E[a.xi] = 0 on the probe directions.
template <int D>
double clt_functional(const ConvexExpectation<D>& E, const GridFunction<D>& f, long n, double tol = 1e-9) {
    if (!is_centered(E, tol)) throw precondition_error("CLT functional needs a centred expectation");
    return nonlinear_functional(E, ScalingFamily<D>::second_order(), f, n);
}

struct GeneratorRow {
    double h;
    double defect;
};

struct GeneratorReport {
    std::vector<GeneratorRow> rows;
    double generator_at_origin;  // Af(0) from grid derivatives
    double quotient_at_origin;   // (I(h)f - f)(0) / h at the smallest h
    bool monotone;               // defect nonincreasing up to 1e-9

    double final_defect() const { return rows.back().defect; }
};

/// Af(x) at node idx: E[grad f . psi_0(x, .)] for first-order families,
/// E[1/2 xi^T D^2 f xi] for the second-order family.
template <int D>
double generator_at(const OneStepOperator<D>& I, const GridFunction<D>& f, const std::type_identity_t<Index<D>>& idx) {
    const Point<D> x = f.grid().node(idx);
    if (I.scaling.kind() == ScalingKind::second_order) {
        const Matrix<D> H = fd_hessian(f, idx);
        return I.expectation([&](const Point<D>& y) { return 0.5 * quadratic_form<D>(H, y); });
    }
    const Point<D> g = fd_gradient(f, idx);
    return I.expectation([&](const Point<D>& y) { return dot<D>(g, I.scaling.velocity(x, y)); });
}

/// max over nodes in K of |(I(h)f - f)/h - Af| for each h. I(h) is applied to the exact
/// callable `fn`; Af uses finite differences of `fn` sampled on `grid`.
template <int D, class F>
GeneratorReport generator_check(const OneStepOperator<D>& I, F&& fn, const Grid<D>& grid,
                                const std::vector<double>& hs, const Box<D>& K) {
    if (hs.empty()) throw input_error("need at least one h");
    const auto f = GridFunction<D>::sample(grid, fn);
    const auto nodes = nodes_in(grid, K);
    std::vector<double> af(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) af[j] = generator_at(I, f, grid.unflat(nodes[j]));

    GeneratorReport rep;
    rep.generator_at_origin = generator_at(I, f, grid.origin());
    rep.monotone = true;
    double hmin = inf;
    for (double h : hs) {
        if (!(h > 0.0)) throw input_error("h must be positive");
        double d = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const Point<D> x = grid.node(nodes[j]);
            const double q = (I.apply_at(h, x, fn) - fn(x)) / h;
            d = std::max(d, std::abs(q - af[j]));
        }
        if (!rep.rows.empty() && d > rep.rows.back().defect + 1e-9) rep.monotone = false;
        rep.rows.push_back({h, d});
        hmin = std::min(hmin, h);
    }
    const Point<D> o = zero_point<D>();
    rep.quotient_at_origin = (I.apply_at(hmin, o, fn) - fn(o)) / hmin;
    return rep;
}

/// Seeded iid draws from mu.
template <int D>
std::vector<Point<D>> sample_iid(const DiscreteMeasure<D>& mu, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw input_error("sample count must be >= 1");
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick(mu.weights().begin(), mu.weights().end());
    std::vector<Point<D>> out(n);
    for (auto& y : out) y = mu.atom(pick(rng));
    return out;
}

/// Atoms of a 1D measure written as offset + spacing * k_i with integer k_i >= 0.
struct Lattice {
    double offset;
    double spacing;
    std::vector<long> steps;
    std::vector<double> weights;
};

inline Lattice detect_lattice(const DiscreteMeasure<1>& mu) {
    std::vector<double> v;
    std::vector<double> w;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weight(i) > 0.0) v.push_back(mu.atom(i)[0]), w.push_back(mu.weight(i));
    const double lo = *std::min_element(v.begin(), v.end());
    double spacing = 0.0;
    for (double x : v) {
        double d = x - lo;
        if (d <= 1e-12) continue;
        if (spacing == 0.0) {
            spacing = d;
            continue;
        }
        // Euclid on reals, rejecting incommensurable atoms.
        double a = std::max(spacing, d), b = std::min(spacing, d);
        int it = 0;
        while (b > 1e-9 * a && it++ < 64) {
            const double r = std::fmod(a, b);
            a = b;
            b = (r < 1e-9 * a || a - r < 1e-9 * a) ? 0.0 : r;
        }
        if (it >= 64) throw input_error("atoms do not lie on a common lattice");
        spacing = a;
    }
    const double hi = *std::max_element(v.begin(), v.end());
    // a real Euclid run on incommensurable atoms ends at a vanishing spacing
    if (spacing > 0.0 && (hi - lo) / spacing > 1e6) throw input_error("atoms do not lie on a common lattice");
    Lattice L{lo, spacing == 0.0 ? 1.0 : spacing, {}, w};
    for (double x : v) {
        const double k = (x - lo) / L.spacing;
        if (std::abs(k - std::round(k)) > 1e-6) throw input_error("atoms do not lie on a common lattice");
        L.steps.push_back(std::lround(k));
    }
    return L;
}

/// log P(S_n / n >= a) for each n in the strictly increasing grid, by exact
/// convolution over the lattice. Entries are -inf where the probability is 0.
inline std::vector<double> log_tail_probabilities(const DiscreteMeasure<1>& mu, double a,
                                                  const std::vector<long>& ns) {
    if (ns.empty()) throw input_error("n-grid is empty");
    for (std::size_t i = 0; i < ns.size(); ++i)
        if (ns[i] < 1 || (i > 0 && ns[i] <= ns[i - 1])) throw input_error("n-grid must be strictly increasing and >= 1");
    const Lattice L = detect_lattice(mu);
    const long kmax = *std::max_element(L.steps.begin(), L.steps.end());
    std::vector<double> p{1.0}, q;
    double log_scale = 0.0;
    std::vector<double> out;
    std::size_t next = 0;
    for (long n = 1; next < ns.size(); ++n) {
        q.assign(p.size() + kmax, 0.0);
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j] == 0.0) continue;
            for (std::size_t i = 0; i < L.steps.size(); ++i) q[j + L.steps[i]] += p[j] * L.weights[i];
        }
        const double mass = std::accumulate(q.begin(), q.end(), 0.0);
        for (double& x : q) x /= mass;
        log_scale += std::log(mass);
        std::swap(p, q);
        if (n == ns[next]) {
            // S_n = n offset + spacing K >= n a
            const double kmin = (n * a - n * L.offset) / L.spacing;
            long k0 = static_cast<long>(std::ceil(kmin - 1e-9 * std::max(1.0, std::abs(kmin))));
            k0 = std::max(0L, k0);
            double tail = 0.0;
            for (std::size_t j = static_cast<std::size_t>(std::min<long>(k0, p.size())); j < p.size(); ++j)
                tail += p[j];
            out.push_back(tail > 0.0 ? std::log(tail) + log_scale : -inf);
            ++next;
        }
    }
    return out;
}

struct RateReport {
    std::vector<long> n;
    std::vector<double> value;
    double fitted_rate;
    double bound;
    bool pass;
};

/// Fit v = r + b log(n)/n + c/n through the last three points and return r.
inline double extrapolate_rate(const std::vector<long>& n, const std::vector<double>& v) {
    if (n.size() < 3) return v.back();
    const std::size_t m = n.size();
    double A[3][4];
    for (int r = 0; r < 3; ++r) {
        const double x = static_cast<double>(n[m - 3 + r]);
        A[r][0] = 1.0;
        A[r][1] = std::log(x) / x;
        A[r][2] = 1.0 / x;
        A[r][3] = v[m - 3 + r];
    }
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
        }
    }
    return A[0][3] / A[0][0];
}

/// inf over x >= a of the conjugate of H, scanning the dual grid [a, upper] plus x = a.
inline double infimum_on_half_line(const SampledFunction& H, double a, double upper, int points = 401) {
    double m = conjugate_at(H, a);
    if (upper > a)
        for (double x : linspace(a, upper, points)) m = std::min(m, conjugate_at(H, x));
    return m;
}

namespace detail {

inline double measure_mean(const DiscreteMeasure<1>& mu) {
    return mean_and_cov<1>(mu).mean[0];
}

inline double measure_max(const DiscreteMeasure<1>& mu) {
    double m = -inf;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weight(i) > 0.0) m = std::max(m, mu.atom(i)[0]);
    return m;
}

}  // namespace detail

struct RateOptions {
    double enlargement = 0.0;  // L in A_L = [a - L, inf)
    double tolerance = 1e-3;
    std::vector<double> z_grid = linspace(-10.0, 10.0, 4001);
};

/// Measured (1/n) log P(X_n >= a) against the bound -inf_{x >= a - L} Lambda^*(x).
inline RateReport ld_rate(const DiscreteMeasure<1>& mu, double a, const std::vector<long>& ns,
                          const RateOptions& opt = {}) {
    const auto logp = log_tail_probabilities(mu, a, ns);
    if (std::all_of(logp.begin(), logp.end(), [](double v) { return v == -inf; }))
        throw precondition_error("tail event has probability 0 for every n");
    RateReport rep{ns, {}, 0.0, 0.0, false};
    for (std::size_t i = 0; i < ns.size(); ++i) rep.value.push_back(logp[i] / ns[i]);
    rep.fitted_rate = extrapolate_rate(ns, rep.value);
    const double lo = a - opt.enlargement;
    if (lo <= detail::measure_mean(mu)) {
        rep.bound = 0.0;
    } else {
        auto H = SampledFunction::sample(opt.z_grid, [&](double z) { return log_mgf(mu, z); });
        rep.bound = -infimum_on_half_line(H, lo, detail::measure_max(mu));
    }
    rep.pass = rep.fitted_rate <= rep.bound + opt.tolerance;
    return rep;
}

/// n^(p-1) P(X_n >= a) against (inf_{x >= a - L} Lambda_p^*(x))^(-p), Lambda_p the
/// shortfall of linear payoffs. fitted_rate is the extrapolated exponential rate.
inline RateReport poly_rate(const DiscreteMeasure<1>& mu, double p, double a, const std::vector<long>& ns,
                            const RateOptions& opt = {}) {
    if (!(p > 1.0 && p <= 4.0)) throw input_error("poly_rate exponent must lie in (1, 4]");
    const auto logp = log_tail_probabilities(mu, a, ns);
    if (std::all_of(logp.begin(), logp.end(), [](double v) { return v == -inf; }))
        throw precondition_error("tail event has probability 0 for every n");
    RateReport rep{ns, {}, 0.0, 0.0, false};
    std::vector<double> per_n;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        rep.value.push_back(std::exp((p - 1.0) * std::log(static_cast<double>(ns[i])) + logp[i]));
        per_n.push_back(logp[i] / ns[i]);
    }
    rep.fitted_rate = extrapolate_rate(ns, per_n);
    const double lo = a - opt.enlargement;
    if (lo <= detail::measure_mean(mu)) {
        rep.bound = inf;
        rep.pass = true;
        return rep;
    }
    const auto E = ConvexExpectation<1>::shortfall(mu, p);
    auto H = SampledFunction::sample(opt.z_grid, [&](double z) { return linear_value(E, z); });
    const double m = infimum_on_half_line(H, lo, detail::measure_max(mu));
    rep.bound = m > 0.0 ? std::pow(m, -p) : inf;
    rep.pass = rep.value.back() <= rep.bound * (1.0 + opt.tolerance);
    return rep;
}

inline void write_csv(std::ostream& os, const RateReport& r) {
    os << "n,value,fitted_rate,bound,pass\n";
    for (std::size_t i = 0; i < r.n.size(); ++i)
        os << r.n[i] << "," << format_double(r.value[i]) << "," << format_double(r.fitted_rate) << ","
           << format_double(r.bound) << "," << (r.pass ? "true" : "false") << "\n";
}

}  // namespace nlsg
