#include "nlsg/chernoff.hpp"
#include "nlsg/hopf_lax.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace nlsg;
using Catch::Approx;

namespace {

double shifted_quadratic(const Point<1>& x) { return -(x[0] - 1.0) * (x[0] - 1.0); }

RateFunction half_square(double radius, int count) {
    return RateFunction::sample(linspace(-radius, radius, count), [](double y) { return 0.5 * y * y; });
}

}  // namespace

TEST_CASE("rate function validation") {
    CHECK_THROWS_AS(RateFunction(SampledFunction({0.0, 1.0}, {inf, inf})), input_error);
    CHECK_THROWS_AS(RateFunction(SampledFunction({0.0, 1.0}, {-1.0, 0.0})), input_error);
    CHECK_THROWS_AS(RateFunction(SampledFunction({-1.0, 1.0}, {0.0, 0.0}), true), input_error);
    CHECK_NOTHROW(half_square(3, 61).check());
    CHECK_THROWS_AS(RateFunction::sample(linspace(1, 3, 5), [](double y) { return y; }).check(), precondition_error);
    auto bumpy = RateFunction::sample(linspace(-2, 2, 5), [](double y) { return std::abs(std::abs(y) - 1.0); });
    CHECK_THROWS_AS(bumpy.check(), precondition_error);
    CHECK(half_square(2, 41).argmin() == 0.0);
    CHECK(RateFunction::indicator_ball(1.0, 21).argmin() == 0.0);
}

TEST_CASE("conjugate rate examples") {
    const auto z = linspace(-10, 10, 4001);
    SECTION("point mass") {
        auto E = ConvexExpectation<1>::linear(point_mass(0.5));
        const auto y = linspace(-2, 2, 9);
        auto r = conjugate_rate(E, z, y);
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == 0.5) CHECK(r.samples.v[i] == Approx(0.0).margin(1e-12));
            else CHECK(r.samples.v[i] == inf);
        }
    }
    SECTION("entropic gaussian") {
        auto E = ConvexExpectation<1>::entropic(gauss_hermite(64));
        const auto y = linspace(-3, 3, 61);
        auto r = conjugate_rate(E, z, y);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(r.samples.v[i] == Approx(0.5 * y[i] * y[i]).margin(1e-4));
    }
    SECTION("sublinear maximum over two point masses") {
        ShiftSet<1> s{{{-1.0}, {1.0}}, {0.0, 0.0}};
        auto E = ConvexExpectation<1>::shift_sup(point_mass(0.0), s);
        const auto y = linspace(-2, 2, 41);
        auto r = conjugate_rate(E, z, y);
        for (std::size_t i = 0; i < y.size(); ++i) {
            INFO("y = " << y[i]);
            if (std::abs(y[i]) <= 1.0 + 1e-12) CHECK(r.samples.v[i] == Approx(0.0).margin(1e-12));
            else CHECK(r.samples.v[i] == inf);
        }
    }
    SECTION("grid too small") {
        // the rate y^2 / 2 has its zero outside the dual grid [1, 2]
        auto E = ConvexExpectation<1>::entropic(gauss_hermite(64));
        CHECK_THROWS_AS(conjugate_rate(E, z, linspace(1, 2, 11)), precondition_error);
    }
    SECTION("biconjugation restores the linear-payoff map") {
        auto E = ConvexExpectation<1>::entropic(symmetric_two_point(1.0));
        auto r = conjugate_rate(E, z, linspace(-1, 1, 2001));
        for (double zz : {-2.0, -0.5, 0.0, 0.7, 1.5}) {
            const double back = conjugate_at(r.samples, zz);
            CHECK(back == Approx(std::log(std::cosh(zz))).margin(2e-6));
        }
    }
}

TEST_CASE("hopf-lax examples") {
    Grid<1> g(8.0, 801);
    const Box<1> K = Box<1>::centered(2.0);
    auto f = GridFunction<1>::sample(g, shifted_quadratic);
    SECTION("indicator of the origin is the identity") {
        auto r = hopf_lax(f, 0.7, RateFunction::indicator_point());
        CHECK(r.values() == f.values());
    }
    SECTION("t = 0 returns f") { CHECK(hopf_lax(f, 0.0, half_square(3, 61)).values() == f.values()); }
    SECTION("quadratic rate") {
        // sup_y -(y - 1)^2 - y^2 / 2 = -1/3 at y = 2/3
        auto r = hopf_lax(f, 1.0, half_square(4, 1201));
        CHECK(r.value_at_origin() == Approx(-1.0 / 3).margin(1e-4));
        for (std::size_t i : nodes_in(g, K)) {
            const double x = g.node(i)[0];
            CHECK(r[i] == Approx(-(x - 1) * (x - 1) / 3).margin(1e-4));
        }
    }
    SECTION("indicator ball gives the maximal distribution") {
        auto rate = RateFunction::indicator_ball(1.0, 101);
        auto r = hopf_lax(f, 1.0, rate);
        for (std::size_t i : nodes_in(g, K)) {
            const double x = g.node(i)[0];
            const double expected = (std::abs(x - 1.0) <= 1.0) ? 0.0 : -(std::abs(x - 1.0) - 1.0) * (std::abs(x - 1.0) - 1.0);
            CHECK(r[i] == Approx(expected).margin(1e-12));
        }
    }
    SECTION("negative time") { CHECK_THROWS_AS(hopf_lax(f, -1.0, half_square(1, 3)), input_error); }
}

TEST_CASE("hopf-lax in two dimensions") {
    Grid<2> g(4.0, 81);
    auto f = GridFunction<2>::sample(g, [](const Point<2>& x) { return -(x[0] - 1) * (x[0] - 1) - x[1] * x[1]; });
    // radii on the nodes: the maximizer direction is an axis, so the best candidate is a node
    const auto radii = linspace(0, 3, 31);
    auto rate = RateFunction::sample(radii, [](double r) { return 0.5 * r * r; }, true);
    auto r = hopf_lax(f, 1.0, rate);
    double node_best = -inf;
    for (double y : radii) node_best = std::max(node_best, -(y - 1) * (y - 1) - 0.5 * y * y);
    CHECK(r.value_at_origin() == Approx(node_best).margin(1e-12));
    CHECK(r.value_at_origin() == Approx(-1.0 / 3).margin(0.25 * g.spacing() * g.spacing()));
    CHECK_THROWS_AS(hopf_lax(f, 1.0, half_square(1, 3)), input_error);
    // constants and the indicator of the origin
    auto c = GridFunction<2>::constant(g, 2.5);
    const auto rc = hopf_lax(c, 1.0, rate);
    for (double v : rc.values()) CHECK(v == 2.5);
    auto id = hopf_lax(f, 1.0, RateFunction(SampledFunction({0.0}, {0.0}), true));
    CHECK(id.values() == f.values());
}

TEST_CASE("hopf-lax properties") {
    Grid<1> g(6.0, 241);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto rates = std::vector<RateFunction>{
        half_square(3, 121),
        RateFunction::indicator_ball(0.5, 11),
        RateFunction::sample(linspace(-2, 2, 81), [](double y) { return std::abs(y - 0.5) + (y - 0.5) * (y - 0.5); }),
    };
    for (int trial = 0; trial < 100; ++trial) {
        const double a = u(rng), b = u(rng), c = 3 * u(rng), t = 0.1 + std::abs(u(rng));
        auto f = GridFunction<1>::sample(g, [=](const Point<1>& x) { return a * std::sin(x[0]) + b * std::cos(3 * x[0]); });
        auto bumped = GridFunction<1>::sample(g, [=](const Point<1>& x) {
            return a * std::sin(x[0]) + b * std::cos(3 * x[0]) + 0.5 * (1 + std::tanh(x[0] - c));
        });
        for (const auto& rate : rates) {
            const auto r = hopf_lax(f, t, rate);
            const auto rb = hopf_lax(bumped, t, rate);
            const double y0 = rate.argmin();
            for (std::size_t i = 0; i < g.size(); ++i) {
                CHECK(r[i] <= rb[i] + 1e-12);
                const double x = g.node(i)[0];
                CHECK(r[i] >= f(Point<1>{x + t * y0}) - t * rate.min_value() - 1e-12);
            }
            const auto rc = hopf_lax(GridFunction<1>::constant(g, c), t, rate);
            for (double v : rc.values()) CHECK(v == Approx(c).margin(1e-12));
        }
    }
}

TEST_CASE("semigroup defect") {
    auto smooth = [](const Point<1>& x) { return std::sin(x[0]) - 0.1 * x[0] * x[0]; };
    const Box<1> K = Box<1>::centered(2.0);
    SECTION("trivial cases") {
        Grid<1> g(6.0, 241);
        auto f = GridFunction<1>::sample(g, smooth);
        CHECK(semigroup_defect(f, 0.0, 0.5, half_square(3, 61), K) == 0.0);
        CHECK(semigroup_defect(f, 0.5, 0.5, RateFunction::indicator_point(), K) == 0.0);
        CHECK_THROWS_AS(semigroup_defect(f, -0.5, 0.5, RateFunction::indicator_point(), K), input_error);
    }
    SECTION("decays under refinement") {
        std::vector<double> defects;
        for (int k : {1, 2, 4, 8}) {
            Grid<1> g(6.0, 60 * k + 1);
            auto f = GridFunction<1>::sample(g, smooth);
            defects.push_back(semigroup_defect(f, 0.5, 0.5, half_square(3, 30 * k + 1), K));
        }
        for (std::size_t i = 0; i + 1 < defects.size(); ++i) {
            INFO("level " << i << ": " << defects[i] << " -> " << defects[i + 1]);
            CHECK(defects[i] / defects[i + 1] >= 1.5);
        }
    }
}

TEST_CASE("envelope") {
    Grid<1> g(8.0, 401);
    const auto z = linspace(-10, 10, 2001);
    const auto y = linspace(-4, 4, 801);
    auto lambda = [](double v) { return 0.5 * v * v; };
    auto f = GridFunction<1>::sample(g, shifted_quadratic);
    SECTION("equal Hamiltonians") {
        auto H = SampledFunction::sample(z, lambda);
        auto e = envelope(f, 1.0, H, H, y);
        CHECK(e.lower.values() == e.upper.values());
    }
    SECTION("perturbed quadratic") {
        const double L = 0.1;
        auto hm = SampledFunction::sample(z, [&](double v) { return lambda(v) - L * std::abs(v); });
        auto hp = SampledFunction::sample(z, [&](double v) { return lambda(v) + L * std::abs(v); });
        // H_+^*(y) = inf_{|u| <= L} Lambda^*(y + u)
        auto conj = legendre(hp, y);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double s = std::max(std::abs(y[i]) - L, 0.0);
            CHECK(conj.v[i] == Approx(0.5 * s * s).margin(1e-4));
        }
        auto e = envelope(f, 1.0, hm, hp, y);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(e.lower[i] <= e.upper[i] + 1e-12);
        auto c = GridFunction<1>::constant(g, -1.5);
        auto ec = envelope(c, 1.0, hm, hp, y);
        // H_- has minimum -L^2 / 2 at |z| = L, so its conjugate has minimum L^2 / 2 rather than 0
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(ec.lower[i] == Approx(-1.5 - 0.5 * L * L).margin(1e-12));
            CHECK(ec.upper[i] == Approx(-1.5).margin(1e-12));
        }
        CHECK_THROWS_AS(envelope(f, 1.0, hp, hm, y), input_error);
    }
    SECTION("grids must match") {
        auto a = SampledFunction::sample(z, lambda);
        auto b = SampledFunction::sample(linspace(-5, 5, 11), lambda);
        CHECK_THROWS_AS(envelope(f, 1.0, a, b, y), input_error);
    }
}

TEST_CASE("envelope brackets the chernoff limit") {
    Grid<1> g(4.0, 1601);
    const Box<1> K = Box<1>::centered(2.0);
    auto drift = [](const Point<1>& x) { return Point<1>{0.1 * std::sin(x[0])}; };
    OneStepOperator<1> I{ConvexExpectation<1>::entropic(gauss_hermite(64)), ScalingFamily<1>::perturbed(drift, 0.1)};
    auto f = GridFunction<1>::sample(g, shifted_quadratic);
    // the iterate carries an O(1/n) bias and O(n h^2) interpolation loss, both below 5e-3 here
    auto S = iterate(I, Partition(1.0, 1.0 / 128), f);
    const auto z = linspace(-10, 10, 2001);
    auto hm = SampledFunction::sample(z, [](double v) { return 0.5 * v * v - 0.1 * std::abs(v); });
    auto hp = SampledFunction::sample(z, [](double v) { return 0.5 * v * v + 0.1 * std::abs(v); });
    auto e = envelope(f, 1.0, hm, hp, linspace(-4, 4, 801));
    for (std::size_t i : nodes_in(g, K)) {
        CHECK(S[i] - e.lower[i] >= -5e-3);
        CHECK(e.upper[i] - S[i] >= -5e-3);
    }
}

TEST_CASE("rate CSV round trip") {
    auto r = RateFunction(SampledFunction({-1.0, 0.0, 0.25, 1.0}, {inf, 0.0, 0.1, inf}));
    std::stringstream ss;
    write_csv(ss, r);
    CHECK(ss.str().rfind("y,phi\n", 0) == 0);
    auto back = read_rate_csv(ss);
    CHECK(back.samples.x == r.samples.x);
    CHECK(back.samples.v == r.samples.v);
    CHECK_FALSE(back.radial);
    auto radial = RateFunction(SampledFunction({0.0, 0.5}, {0.0, 0.125}), true);
    std::stringstream rs;
    write_csv(rs, radial);
    CHECK(read_rate_csv(rs).radial);
    std::stringstream bad("y,phi\n1;2\n");
    CHECK_THROWS_AS(read_rate_csv(bad), input_error);
}
