#pragma once

// Explicit monotone schemes for u_t = H(grad u) and u_t = G(D^2 u). The two
// outermost node layers are frozen at the initial data.

#include "nlsg/grid.hpp"
#include "nlsg/legendre.hpp"
#include "nlsg/penalty.hpp"

#include <functional>
#include <numeric>

namespace nlsg {

/// Convex first-order Hamiltonian H(p).
template <int D>
struct Hamiltonian1 {
    std::function<double(const Point<D>&)> value;

    double operator()(const Point<D>& p) const { return value(p); }

    /// Largest one-sided slope of H along axis k at p, used as local dissipation.
    double slope_bound(const Point<D>& p, int k) const {
        const double d = 1e-6 * (1.0 + std::abs(p[k]));
        Point<D> a = p, b = p;
        a[k] += d;
        b[k] -= d;
        const double h0 = value(p);
        return std::max(std::abs(value(a) - h0), std::abs(h0 - value(b))) / d;
    }

    static Hamiltonian1 zero() {
        return {[](const Point<D>&) { return 0.0; }};
    }

    /// Piecewise-linear interpolation of a table, continued linearly outside it.
    static Hamiltonian1 from_table(const SampledFunction& table)
        requires(D == 1)
    {
        for (double v : table.v)
            if (!std::isfinite(v)) throw input_error("Hamiltonian table must be finite");
        if (table.size() < 2) throw input_error("Hamiltonian table needs two points");
        return {[table](const Point<1>& p) {
            const auto& x = table.x;
            const auto& v = table.v;
            const double z = p[0];
            std::size_t j;
            if (z <= x.front()) j = 1;
            else if (z >= x.back()) j = x.size() - 1;
            else j = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), z) - x.begin());
            const double w = (z - x[j - 1]) / (x[j] - x[j - 1]);
            return (1.0 - w) * v[j - 1] + w * v[j];
        }};
    }
};

namespace detail {

template <int D>
bool frozen(const Grid<D>& g, const std::type_identity_t<Index<D>>& idx) {
    for (int k = 0; k < D; ++k)
        if (idx[k] < 2 || idx[k] > g.points() - 3) return true;
    return false;
}

}  // namespace detail

/// Local Lax-Friedrichs march to time t. Dissipation at each node and axis is the
/// largest slope of H at the two one-sided differences. The monotone scheme keeps
/// discrete slopes within their initial range, so the uniform step is fixed up front
/// from the slopes of H on the box |p_k| <= slope_cap (default: the discrete Lipschitz
/// constant of f). Runs sharing a cap share their time steps, which is what makes the
/// scheme order-preserving across initial data.
template <int D>
GridFunction<D> solve_hj(const Hamiltonian1<D>& H, const GridFunction<D>& f, double t, double slope_cap = 0.0) {
    if (!(t >= 0.0)) throw input_error("time must be >= 0");
    if (!(slope_cap >= 0.0)) throw input_error("slope cap must be >= 0");
    const Grid<D>& grid = f.grid();
    const double h = grid.spacing();
    const double lip = discrete_lipschitz(f);
    if (slope_cap == 0.0) slope_cap = lip;
    else if (lip > slope_cap * (1.0 + 1e-12))
        throw input_error("initial slope " + format_double(lip) + " exceeds the slope cap");
    double a_cap = 0.0;
    for (int corner = 0; corner < (1 << D); ++corner) {
        Point<D> p;
        for (int k = 0; k < D; ++k) p[k] = (corner >> k & 1) ? slope_cap : -slope_cap;
        double sum = 0.0;
        for (int k = 0; k < D; ++k) sum += H.slope_bound(p, k);
        a_cap = std::max(a_cap, sum);
    }
    double dt_fixed = t;
    if (a_cap > 0.0 && t > 0.0) dt_fixed = t / std::ceil(t * 2.0 * a_cap / h - 1e-12);

    std::vector<double> u = f.values();
    std::vector<double> next = u;
    std::vector<double> ham(u.size());
    double elapsed = 0.0;
    while (elapsed < t) {
        double amax = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const Index<D> idx = grid.unflat(i);
            if (detail::frozen(grid, idx)) continue;
            Point<D> pm, pp, pc;
            for (int k = 0; k < D; ++k) {
                Index<D> l = idx, r = idx;
                --l[k];
                ++r[k];
                pm[k] = (u[i] - u[grid.flat(l)]) / h;
                pp[k] = (u[grid.flat(r)] - u[i]) / h;
                pc[k] = 0.5 * (pm[k] + pp[k]);
            }
            double flux = H(pc);
            double a_sum = 0.0;
            for (int k = 0; k < D; ++k) {
                Point<D> qm = pc, qp = pc;
                qm[k] = pm[k];
                qp[k] = pp[k];
                const double a = std::max(H.slope_bound(qm, k), H.slope_bound(qp, k));
                flux += 0.5 * a * (pp[k] - pm[k]);
                a_sum += a;
            }
            ham[i] = flux;
            amax = std::max(amax, a_sum);
        }
        double dt = std::min(t - elapsed, dt_fixed);
        // only binds if the corner estimate of the dissipation was too small
        if (amax > 0.0) dt = std::min(dt, h / (2.0 * amax));
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (detail::frozen(grid, grid.unflat(i))) continue;
            next[i] = u[i] + dt * ham[i];
        }
        std::swap(u, next);
        next = u;
        elapsed = (t - elapsed <= dt * (1.0 + 1e-12)) ? t : elapsed + dt;
    }
    return GridFunction<D>(grid, std::move(u), f.extension());
}

/// G(a) = max over lambda of (1/2 lambda^T a lambda - phi(|lambda|)) + 1/2 tr(Sigma a).
/// In 2D every lambda must be parallel to a lattice vector with components in {-2..2}
/// and Sigma must be diagonal, so that every term is a monotone lattice second difference.
template <int D>
struct Hamiltonian2 {
    std::vector<Point<D>> lambdas;
    std::vector<double> costs;
    Matrix<D> sigma = zero_matrix<D>();

    Hamiltonian2(std::vector<Point<D>> l, std::vector<double> c, Matrix<D> s = zero_matrix<D>())
        : lambdas(std::move(l)), costs(std::move(c)), sigma(s) {
        if (lambdas.size() != costs.size()) throw input_error("lambda and cost counts differ");
        if (lambdas.empty()) {
            lambdas.push_back(zero_point<D>());
            costs.push_back(0.0);
        }
        double min_cost = inf;
        for (double c0 : costs) {
            if (!std::isfinite(c0) || c0 < 0.0) throw input_error("lambda costs must be finite and >= 0");
            min_cost = std::min(min_cost, c0);
        }
        if (min_cost != 0.0) throw input_error("G(0) = 0 needs a zero-cost lambda");
        for (int i = 0; i < D; ++i) {
            if (sigma[i][i] < 0.0) throw input_error("Sigma must be positive semidefinite");
            for (int j = 0; j < D; ++j)
                if (i != j && sigma[i][j] != 0.0 && D == 2) throw input_error("2D Sigma must be diagonal");
        }
        if constexpr (D == 2)
            for (const auto& l : lambdas) (void)lattice_direction(l);
    }

    /// linear heat generator G(a) = 1/2 sigma^2 tr(a)
    static Hamiltonian2 heat(double variance) {
        Matrix<D> s = zero_matrix<D>();
        for (int k = 0; k < D; ++k) s[k][k] = variance;
        return Hamiltonian2({}, {}, s);
    }

    /// lambda on the finite nodes of phi along the first axis: 1D shifts in [0, finite_radius].
    static Hamiltonian2 from_penalty(const PenaltyFunction& phi)
        requires(D == 1)
    {
        std::vector<Point<1>> l;
        std::vector<double> c;
        for (std::size_t i = 0; i < phi.grid().size(); ++i)
            if (std::isfinite(phi.values()[i])) {
                l.push_back({phi.grid()[i]});
                c.push_back(phi.values()[i]);
            }
        return Hamiltonian2(std::move(l), std::move(c));
    }

    double operator()(const Matrix<D>& a) const {
        double best = -inf;
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            best = std::max(best, 0.5 * quadratic_form<D>(a, lambdas[i]) - costs[i]);
        return best + 0.5 * trace_product<D>(sigma, a);
    }

    double max_variance() const {
        double m = 0.0;
        for (const auto& l : lambdas) m = std::max(m, dot<D>(l, l));
        double s = 0.0;
        for (int k = 0; k < D; ++k) s = std::max(s, sigma[k][k]);
        return m + s;
    }

    /// Integer lattice vector parallel to lambda.
    static Index<D> lattice_direction(const Point<D>& l) {
        Index<D> v{};
        v.fill(0);
        const double r = norm<D>(l);
        if (r == 0.0) return v;
        if constexpr (D == 1) {
            v[0] = 1;
            return v;
        } else {
            for (int a = -2; a <= 2; ++a)
                for (int b = 0; b <= 2; ++b) {
                    if (a == 0 && b == 0) continue;
                    const double nv = std::hypot(a, b);
                    if (std::abs(l[0] * b - l[1] * a) <= 1e-12 * r * nv) return {a, b};
                }
            throw input_error("2D lambda must be parallel to a lattice vector with components in {-2..2}");
        }
    }
};

/// Explicit march u <- u + dt G(D^2_h u), dt <= h^2 / (2 sigma_max^2 d).
template <int D>
GridFunction<D> solve_g_heat(const Hamiltonian2<D>& G, const GridFunction<D>& f, double t) {
    if (!(t >= 0.0)) throw input_error("time must be >= 0");
    const Grid<D>& grid = f.grid();
    const double h = grid.spacing();
    const double s2 = G.max_variance();
    std::vector<double> u = f.values();
    if (t == 0.0 || s2 == 0.0) return f;
    const double dt_max = h * h / (2.0 * s2 * D);
    const long steps = static_cast<long>(std::ceil(t / dt_max - 1e-12));
    const double dt = t / steps;

    std::vector<Index<D>> dirs;
    for (const auto& l : G.lambdas) dirs.push_back(Hamiltonian2<D>::lattice_direction(l));

    std::vector<double> next = u;
    for (long s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const Index<D> idx = grid.unflat(i);
            if (detail::frozen(grid, idx)) continue;
            auto second = [&](const Index<D>& v) {
                Index<D> p = idx, m = idx;
                double len2 = 0.0;
                for (int k = 0; k < D; ++k) {
                    p[k] += v[k];
                    m[k] -= v[k];
                    len2 += double(v[k]) * v[k];
                }
                return (u[grid.flat(p)] - 2.0 * u[i] + u[grid.flat(m)]) / (h * h * len2);
            };
            double best = -inf;
            for (std::size_t j = 0; j < dirs.size(); ++j) {
                const double l2 = dot<D>(G.lambdas[j], G.lambdas[j]);
                const double d2 = l2 == 0.0 ? 0.0 : second(dirs[j]);
                best = std::max(best, 0.5 * l2 * d2 - G.costs[j]);
            }
            double lin = 0.0;
            for (int k = 0; k < D; ++k) {
                if (G.sigma[k][k] == 0.0) continue;
                Index<D> e{};
                e.fill(0);
                e[k] = 1;
                lin += 0.5 * G.sigma[k][k] * second(e);
            }
            next[i] = u[i] + dt * (best + lin);
        }
        std::swap(u, next);
    }
    return GridFunction<D>(grid, std::move(u), f.extension());
}

}  // namespace nlsg
