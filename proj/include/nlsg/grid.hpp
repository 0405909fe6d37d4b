#pragma once

// Uniform tensor grids over the truncated box [-R, R]^D and the functions
// sampled on them. Everything downstream (one-step operators, Hopf-Lax
// transforms, PDE marches) produces and consumes GridFunction values.

#include "nlsg/core.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

namespace nlsg {

template <int D>
using Index = std::array<int, D>;

/// Uniform grid with N points per axis on [-R, R]^D. N is odd so the origin is a node.
template <int D>
class Grid {
    static_assert(D == 1 || D == 2, "only d = 1 and d = 2 are supported");

public:
    Grid(double half_width, int points) : half_width_(half_width), points_(points) {
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw input_error("grid half-width R must be positive and finite");
        if (points < 3) throw input_error("grid needs at least 3 points per axis");
        if (points % 2 == 0) throw input_error("N must be odd");
    }

    double half_width() const { return half_width_; }
    int points() const { return points_; }
    double spacing() const { return 2.0 * half_width_ / (points_ - 1); }
    int center_index() const { return (points_ - 1) / 2; }

    std::size_t size() const {
        std::size_t s = 1;
        for (int k = 0; k < D; ++k) s *= static_cast<std::size_t>(points_);
        return s;
    }

    double coordinate(int i) const {
        if (i == center_index()) return 0.0;
        return -half_width_ + i * spacing();
    }

    std::size_t flat(const Index<D>& idx) const {
        std::size_t f = 0;
        for (int k = D - 1; k >= 0; --k) f = f * points_ + static_cast<std::size_t>(idx[k]);
        return f;
    }

    Index<D> unflat(std::size_t f) const {
        Index<D> idx;
        for (int k = 0; k < D; ++k) {
            idx[k] = static_cast<int>(f % points_);
            f /= points_;
        }
        return idx;
    }

    Point<D> node(const Index<D>& idx) const {
        Point<D> x;
        for (int k = 0; k < D; ++k) x[k] = coordinate(idx[k]);
        return x;
    }

    Point<D> node(std::size_t f) const { return node(unflat(f)); }

    Index<D> origin() const {
        Index<D> idx;
        idx.fill(center_index());
        return idx;
    }

    bool in_range(const Index<D>& idx) const {
        for (int k = 0; k < D; ++k)
            if (idx[k] < 0 || idx[k] >= points_) return false;
        return true;
    }

    bool operator==(const Grid&) const = default;

private:
    double half_width_;
    int points_;
};

enum class Extension { constant, linear };

inline std::string to_string(Extension e) {
    return e == Extension::constant ? "constant" : "linear";
}

inline Extension extension_from_string(const std::string& s) {
    if (s == "constant") return Extension::constant;
    if (s == "linear") return Extension::linear;
    throw input_error("unknown extension policy '" + s + "'");
}

/// kappa_p(x) = (1 + |x|)^(-p), p in {0, 1, 2}.
struct GrowthWeight {
    int exponent = 0;

    explicit GrowthWeight(int p = 0) : exponent(p) {
        if (p < 0 || p > 2) throw input_error("growth weight exponent must be 0, 1 or 2");
    }

    template <std::size_t D>
    double operator()(const std::array<double, D>& x) const {
        return std::pow(1.0 + norm<static_cast<int>(D)>(x), -exponent);
    }
};

/// Axis-aligned box K used for sup norms on compacts.
template <int D>
struct Box {
    Point<D> lower;
    Point<D> upper;

    static Box centered(double half_width) {
        Box b;
        b.lower.fill(-half_width);
        b.upper.fill(half_width);
        return b;
    }

    bool contains(const Point<D>& x, double tol = 1e-12) const {
        for (int k = 0; k < D; ++k)
            if (x[k] < lower[k] - tol || x[k] > upper[k] + tol) return false;
        return true;
    }
};

template <int D>
class GridFunction {
public:
    GridFunction(Grid<D> grid, std::vector<double> values, Extension ext = Extension::constant)
        : grid_(grid), values_(std::move(values)), extension_(ext) {
        if (values_.size() != grid_.size())
            throw input_error("value array length does not match node count");
        for (double v : values_)
            if (!std::isfinite(v)) throw input_error("grid function values must be finite");
    }

    template <class F>
    static GridFunction sample(const Grid<D>& grid, F&& f, Extension ext = Extension::constant) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
        return GridFunction(grid, std::move(v), ext);
    }

    static GridFunction constant(const Grid<D>& grid, double c, Extension ext = Extension::constant) {
        return GridFunction(grid, std::vector<double>(grid.size(), c), ext);
    }

    const Grid<D>& grid() const { return grid_; }
    Extension extension() const { return extension_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double at(const Index<D>& idx) const { return values_[grid_.flat(idx)]; }

    /// Multilinear interpolation inside the box, extension policy outside.
    double operator()(const Point<D>& x) const {
        if (!all_finite<D>(x)) throw input_error("evaluation point must be finite");
        const double h = grid_.spacing();
        const double R = grid_.half_width();
        const int n = grid_.points();
        std::array<int, D> cell;
        std::array<double, D> w;
        for (int k = 0; k < D; ++k) {
            double xk = x[k];
            if (extension_ == Extension::constant) xk = std::clamp(xk, -R, R);
            double s = (xk + R) / h;
            const double r = std::round(s);
            if (std::abs(s - r) < 1e-9) s = r;
            int i = static_cast<int>(std::floor(s));
            i = std::clamp(i, 0, n - 2);
            cell[k] = i;
            w[k] = s - i;
        }
        if constexpr (D == 1) {
            const double* v = values_.data() + cell[0];
            if (w[0] == 0.0) return v[0];
            if (w[0] == 1.0) return v[1];
            return (1.0 - w[0]) * v[0] + w[0] * v[1];
        } else {
            auto val = [&](int i, int j) { return values_[static_cast<std::size_t>(j) * n + i]; };
            const int i = cell[0], j = cell[1];
            const double a = (1.0 - w[0]) * val(i, j) + w[0] * val(i + 1, j);
            const double b = (1.0 - w[0]) * val(i, j + 1) + w[0] * val(i + 1, j + 1);
            return (1.0 - w[1]) * a + w[1] * b;
        }
    }

    double operator()(double x) const
        requires(D == 1)
    {
        return (*this)(Point<1>{x});
    }

    /// Value at a possibly out-of-range multi-index, using the extension policy.
    double value_at_index(const Index<D>& idx) const {
        if (grid_.in_range(idx)) return at(idx);
        Point<D> x;
        for (int k = 0; k < D; ++k) x[k] = -grid_.half_width() + idx[k] * grid_.spacing();
        return (*this)(x);
    }

    double value_at_origin() const { return at(grid_.origin()); }

private:
    Grid<D> grid_;
    std::vector<double> values_;
    Extension extension_;
};

template <int D, class Op>
GridFunction<D> combine(const GridFunction<D>& f, const GridFunction<D>& g, Op op) {
    if (!(f.grid() == g.grid())) throw input_error("grid functions live on different grids");
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(f[i], g[i]);
    return GridFunction<D>(f.grid(), std::move(v), f.extension());
}

template <int D, class Op>
GridFunction<D> transform(const GridFunction<D>& f, Op op) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(f[i]);
    return GridFunction<D>(f.grid(), std::move(v), f.extension());
}

template <int D>
GridFunction<D> difference(const GridFunction<D>& f, const GridFunction<D>& g) {
    return combine(f, g, std::minus<>{});
}

template <int D>
GridFunction<D> positive_part(const GridFunction<D>& f) {
    return transform(f, [](double v) { return std::max(v, 0.0); });
}

template <int D>
GridFunction<D> with_extension(const GridFunction<D>& f, Extension ext) {
    return GridFunction<D>(f.grid(), f.values(), ext);
}

/// max over nodes of |f(x)| kappa_p(x)
template <int D>
double weighted_norm(const GridFunction<D>& f, GrowthWeight w) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        m = std::max(m, std::abs(f[i]) * w(f.grid().node(i)));
    return m;
}

template <int D>
void check_box_inside(const Grid<D>& grid, const Box<D>& K) {
    const double R = grid.half_width();
    for (int k = 0; k < D; ++k) {
        if (K.lower[k] > K.upper[k]) throw input_error("box has lower > upper");
        if (K.lower[k] < -R - 1e-12 || K.upper[k] > R + 1e-12)
            throw input_error("compact K is not contained in the grid box");
    }
}

/// Flat indices of the nodes inside K.
template <int D>
std::vector<std::size_t> nodes_in(const Grid<D>& grid, const Box<D>& K) {
    check_box_inside(grid, K);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (K.contains(grid.node(i), 1e-9)) out.push_back(i);
    return out;
}

template <int D>
double sup_norm_on(const GridFunction<D>& f, const Box<D>& K) {
    double m = 0.0;
    for (std::size_t i : nodes_in(f.grid(), K)) m = std::max(m, std::abs(f[i]));
    return m;
}

/// sup_K |f - g|
template <int D>
double sup_distance_on(const GridFunction<D>& f, const GridFunction<D>& g, const Box<D>& K) {
    return sup_norm_on(difference(f, g), K);
}

/// (tau_x f)(y) = f(x + y), resampled at every node.
template <int D>
GridFunction<D> shift(const GridFunction<D>& f, const std::type_identity_t<Point<D>>& x) {
    return GridFunction<D>::sample(
        f.grid(), [&](const Point<D>& y) { return f(add<D>(x, y)); }, f.extension());
}

/// Bump kernel eta_n(x) = n^d eta(n x) with eta supported on the ball of radius delta.
struct MollifierSpec {
    double radius = 1.0;
    int scale = 1;

    MollifierSpec(double delta, int n) : radius(delta), scale(n) {
        if (!(delta > 0.0 && delta <= 1.0)) throw input_error("mollifier radius must lie in (0, 1]");
        if (n < 1) throw input_error("mollifier scale index must be >= 1");
    }

    double support() const { return radius / scale; }
};

template <int D>
struct KernelTap {
    Index<D> offset;
    double weight;
};

/// Discretised (1 - |r/s|^2)^2 bump on the grid lattice, renormalised to sum 1.
template <int D>
std::vector<KernelTap<D>> mollifier_taps(const Grid<D>& grid, const MollifierSpec& m) {
    const double s = m.support();
    const double h = grid.spacing();
    const int reach = static_cast<int>(std::floor(s / h));
    std::vector<KernelTap<D>> taps;
    double total = 0.0;
    auto push = [&](const Index<D>& off) {
        double r2 = 0.0;
        for (int k = 0; k < D; ++k) r2 += (off[k] * h) * (off[k] * h);
        const double q = r2 / (s * s);
        if (q >= 1.0) return;
        const double w = (1.0 - q) * (1.0 - q);
        taps.push_back({off, w});
        total += w;
    };
    if constexpr (D == 1) {
        for (int k = -reach; k <= reach; ++k) push({k});
    } else {
        for (int l = -reach; l <= reach; ++l)
            for (int k = -reach; k <= reach; ++k) push({k, l});
    }
    for (auto& t : taps) t.weight /= total;
    return taps;
}

template <int D>
GridFunction<D> mollify(const GridFunction<D>& f, const MollifierSpec& m) {
    const Grid<D>& grid = f.grid();
    if (m.support() > grid.half_width() / 4.0)
        throw input_error("mollifier support exceeds R/4");
    const auto taps = mollifier_taps(grid, m);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Index<D> idx = grid.unflat(i);
        double acc = 0.0;
        for (const auto& t : taps) {
            Index<D> j;
            for (int k = 0; k < D; ++k) j[k] = idx[k] - t.offset[k];
            acc += t.weight * f.value_at_index(j);
        }
        out[i] = acc;
    }
    return GridFunction<D>(grid, std::move(out), f.extension());
}

/// Central differences at interior nodes, second-order one-sided at the boundary.
template <int D>
Point<D> fd_gradient(const GridFunction<D>& f, const std::type_identity_t<Index<D>>& node) {
    const double h = f.grid().spacing();
    const int n = f.grid().points();
    Point<D> g;
    for (int k = 0; k < D; ++k) {
        auto v = [&](int off) {
            Index<D> j = node;
            j[k] += off;
            return f.at(j);
        };
        if (node[k] == 0)
            g[k] = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
        else if (node[k] == n - 1)
            g[k] = (3.0 * v(0) - 4.0 * v(-1) + v(-2)) / (2.0 * h);
        else
            g[k] = (v(1) - v(-1)) / (2.0 * h);
    }
    return g;
}

/// Second differences; at boundary nodes the stencil centre moves one node inward.
template <int D>
Matrix<D> fd_hessian(const GridFunction<D>& f, const std::type_identity_t<Index<D>>& node) {
    const double h = f.grid().spacing();
    const int n = f.grid().points();
    Index<D> c = node;
    for (int k = 0; k < D; ++k) c[k] = std::clamp(c[k], 1, n - 2);
    auto v = [&](const Index<D>& off) {
        Index<D> j;
        for (int k = 0; k < D; ++k) j[k] = c[k] + off[k];
        return f.at(j);
    };
    Matrix<D> H = zero_matrix<D>();
    for (int a = 0; a < D; ++a) {
        Index<D> e{};
        e.fill(0);
        e[a] = 1;
        Index<D> me = e;
        me[a] = -1;
        Index<D> z{};
        z.fill(0);
        H[a][a] = (v(e) - 2.0 * v(z) + v(me)) / (h * h);
    }
    if constexpr (D == 2) {
        const double m = (v({1, 1}) - v({1, -1}) - v({-1, 1}) + v({-1, -1})) / (4.0 * h * h);
        H[0][1] = H[1][0] = m;
    }
    return H;
}

/// Largest |f(x) - f(y)| / |x - y| over axis-neighbour node pairs.
template <int D>
double discrete_lipschitz(const GridFunction<D>& f) {
    const Grid<D>& grid = f.grid();
    const double h = grid.spacing();
    double L = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Index<D> idx = grid.unflat(i);
        for (int k = 0; k < D; ++k) {
            if (idx[k] + 1 >= grid.points()) continue;
            Index<D> j = idx;
            ++j[k];
            L = std::max(L, std::abs(f.at(j) - f[i]) / h);
        }
    }
    return L;
}

/// sup_x sup_{|y| <= 1} kappa(x) / kappa(x + y) over the grid nodes. Diagnostic only.
template <int D>
double kappa_constant(const Grid<D>& grid, GrowthWeight w) {
    double c = 1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = norm<D>(grid.node(i));
        c = std::max(c, std::pow((2.0 + r) / (1.0 + r), w.exponent));
    }
    return c;
}

// CSV: a '#' header with R, N, dim, extension and weight exponent, then
// one row per node: x[,y],value.

template <int D>
void write_csv(std::ostream& os, const GridFunction<D>& f, GrowthWeight w = GrowthWeight(0)) {
    const Grid<D>& g = f.grid();
    os << "# R=" << format_double(g.half_width()) << ",N=" << g.points() << ",dim=" << D
       << ",extension=" << to_string(f.extension()) << ",weight=" << w.exponent << "\n";
    os << (D == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Point<D> x = g.node(i);
        for (int k = 0; k < D; ++k) os << format_double(x[k]) << ",";
        os << format_double(f[i]) << "\n";
    }
}

template <int D>
struct CsvGridFunction {
    GridFunction<D> function;
    GrowthWeight weight;
};

template <int D>
CsvGridFunction<D> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw input_error("grid CSV must start with a '# ' metadata line");
    double R = 0;
    int N = 0, dim = 0, weight = 0;
    Extension ext = Extension::constant;
    std::stringstream meta(line.substr(2));
    std::string item;
    while (std::getline(meta, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw input_error("bad metadata item '" + item + "'");
        const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "R") R = std::stod(val);
        else if (key == "N") N = std::stoi(val);
        else if (key == "dim") dim = std::stoi(val);
        else if (key == "extension") ext = extension_from_string(val);
        else if (key == "weight") weight = std::stoi(val);
        else throw input_error("unknown metadata key '" + key + "'");
    }
    if (dim != D) throw input_error("grid CSV dimension mismatch");
    Grid<D> grid(R, N);
    std::getline(is, line);  // column header
    std::vector<double> values;
    values.reserve(grid.size());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return {GridFunction<D>(grid, std::move(values), ext), GrowthWeight(weight)};
}

}  // namespace nlsg
