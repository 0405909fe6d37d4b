#include "nlsg/pde.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace nlsg;
using Catch::Approx;

namespace {

Hamiltonian1<1> half_square_h() {
    return {[](const Point<1>& p) { return 0.5 * p[0] * p[0]; }};
}

Hamiltonian1<1> abs_h() {
    return {[](const Point<1>& p) { return std::abs(p[0]); }};
}

double clipped_square(const Point<1>& x) {
    const double c = std::clamp(x[0], -6.0, 6.0);
    return c * c;
}

double clipped_cosh(const Point<1>& x) { return std::cosh(std::clamp(x[0], -6.0, 6.0)); }

// E[cosh(s Z)] for standard normal Z
double gaussian_cosh(double s) { return std::exp(0.5 * s * s); }

}  // namespace

TEST_CASE("hamilton-jacobi examples") {
    const Box<1> K = Box<1>::centered(2.0);
    SECTION("zero hamiltonian") {
        Grid<1> g(4.0, 81);
        auto f = GridFunction<1>::sample(g, [](const Point<1>& x) { return std::sin(x[0]); });
        CHECK(solve_hj(Hamiltonian1<1>::zero(), f, 1.0).values() == f.values());
        CHECK(solve_hj(half_square_h(), f, 0.0).values() == f.values());
        CHECK_THROWS_AS(solve_hj(half_square_h(), f, -1.0), input_error);
        CHECK_THROWS_AS(solve_hj(half_square_h(), f, 1.0, 0.5), input_error);
    }
    SECTION("absolute value hamiltonian") {
        // u(1, x) = -max(|x| - 1, 0)
        Grid<1> g(6.0, 1201);
        auto f = GridFunction<1>::sample(g, [](const Point<1>& x) { return -std::abs(x[0]); });
        auto u = solve_hj(abs_h(), f, 1.0);
        for (std::size_t i : nodes_in(g, K)) {
            const double x = g.node(i)[0];
            CHECK(u[i] == Approx(-std::max(std::abs(x) - 1.0, 0.0)).margin(5e-2));
        }
    }
    SECTION("quadratic hamiltonian") {
        Grid<1> g(8.0, 801);
        auto f = GridFunction<1>::sample(g, [](const Point<1>& x) { return -(x[0] - 1) * (x[0] - 1); });
        auto u = solve_hj(half_square_h(), f, 1.0);
        CHECK(u.value_at_origin() == Approx(-1.0 / 3).margin(5e-2));
        for (std::size_t i : nodes_in(g, K)) {
            const double x = g.node(i)[0];
            CHECK(u[i] == Approx(-(x - 1) * (x - 1) / 3).margin(5e-2));
        }
    }
}

TEST_CASE("hamilton-jacobi properties") {
    Grid<1> g(6.0, 241);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    const std::vector<Hamiltonian1<1>> hs{half_square_h(), abs_h(),
                                          {[](const Point<1>& p) { return 0.5 * p[0] * p[0] + 0.1 * std::abs(p[0]); }}};
    for (int trial = 0; trial < 20; ++trial) {
        const double a = u(rng), b = u(rng), c = 2 * u(rng);
        auto f = GridFunction<1>::sample(g, [=](const Point<1>& x) { return a * std::sin(x[0]) + b * std::cos(2 * x[0]); });
        auto fg = GridFunction<1>::sample(g, [=](const Point<1>& x) {
            return a * std::sin(x[0]) + b * std::cos(2 * x[0]) + 0.3 * (1 + std::tanh(x[0] - c));
        });
        const double cap = std::max(discrete_lipschitz(f), discrete_lipschitz(fg));
        for (const auto& H : hs) {
            auto uf = solve_hj(H, f, 0.5, cap);
            auto ug = solve_hj(H, fg, 0.5, cap);
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(uf[i] <= ug[i] + 1e-12);
            const auto uc = solve_hj(H, GridFunction<1>::constant(g, c), 0.5);
            for (double v : uc.values()) CHECK(v == Approx(c).margin(1e-12));
        }
    }
}

TEST_CASE("hamilton-jacobi consistency") {
    const Box<1> K = Box<1>::centered(2.0);
    auto f0 = [](const Point<1>& x) { return -(x[0] - 1) * (x[0] - 1); };
    std::vector<double> errors;
    for (int N : {201, 401, 801}) {
        Grid<1> g(8.0, N);
        auto u = solve_hj(half_square_h(), GridFunction<1>::sample(g, f0), 1.0);
        auto exact = GridFunction<1>::sample(g, [](const Point<1>& x) { return -(x[0] - 1) * (x[0] - 1) / 3; });
        errors.push_back(sup_distance_on(u, exact, K));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        INFO(errors[i] << " -> " << errors[i + 1]);
        CHECK(errors[i] / errors[i + 1] >= 1.4);
    }
    SECTION("generator") {
        Grid<1> g(4.0, 401);
        auto f = GridFunction<1>::sample(g, [](const Point<1>& x) { return std::sin(x[0]); });
        const double dt = 1e-4;
        auto u = solve_hj(half_square_h(), f, dt);
        for (std::size_t i : nodes_in(g, K)) {
            const double p = fd_gradient(f, g.unflat(i))[0];
            CHECK((u[i] - f[i]) / dt == Approx(0.5 * p * p).margin(dt + 2 * g.spacing()));
        }
    }
}

TEST_CASE("hamiltonian tables") {
    auto H = Hamiltonian1<1>::from_table(SampledFunction({-1.0, 0.0, 2.0}, {1.0, 0.0, 1.0}));
    CHECK(H(Point<1>{0.0}) == 0.0);
    CHECK(H(Point<1>{1.0}) == Approx(0.5));
    CHECK(H(Point<1>{-2.0}) == Approx(2.0));
    CHECK(H(Point<1>{4.0}) == Approx(2.0));
    CHECK(H.slope_bound(Point<1>{1.0}, 0) == Approx(0.5).epsilon(1e-6));
    CHECK_THROWS_AS(Hamiltonian1<1>::from_table(SampledFunction({0.0, 1.0}, {0.0, inf})), input_error);
    CHECK_THROWS_AS(Hamiltonian1<1>::from_table(SampledFunction({0.0}, {0.0})), input_error);
}

TEST_CASE("second-order hamiltonian") {
    SECTION("validation") {
        CHECK_THROWS_AS(Hamiltonian2<1>({{1.0}}, {0.5}), input_error);
        CHECK_THROWS_AS(Hamiltonian2<1>({{1.0}, {0.0}}, {0.5}), input_error);
        CHECK_THROWS_AS(Hamiltonian2<1>({{0.0}}, {-1.0}), input_error);
        Matrix<2> off = zero_matrix<2>();
        off[0][1] = off[1][0] = 0.5;
        CHECK_THROWS_AS(Hamiltonian2<2>({}, {}, off), input_error);
        CHECK_THROWS_AS(Hamiltonian2<2>({{0.0, 0.0}, {1.0, 3.0}}, {0.0, 0.0}), input_error);
        CHECK_NOTHROW(Hamiltonian2<2>({{0.0, 0.0}, {0.5, 0.5}, {-0.4, 0.8}}, {0.0, 0.1, 0.2}));
        CHECK(Hamiltonian2<2>::lattice_direction({0.5, 0.5}) == Index<2>{1, 1});
        CHECK(Hamiltonian2<2>::lattice_direction({-0.4, 0.8}) == Index<2>{-1, 2});
    }
    SECTION("zero and monotone") {
        auto G = Hamiltonian2<1>::from_penalty(PenaltyFunction::power(1.0, 2.0, 2.0, 21));
        CHECK(G(zero_matrix<1>()) == 0.0);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-3, 3);
        for (int i = 0; i < 100; ++i) {
            Matrix<1> a{{{u(rng)}}};
            Matrix<1> b{{{a[0][0] + std::abs(u(rng))}}};
            CHECK(G(a) <= G(b));
        }
        auto G2 = Hamiltonian2<2>({{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.0}}, {0.0, 0.1, 0.2}, zero_matrix<2>());
        CHECK(G2(zero_matrix<2>()) == 0.0);
        for (int i = 0; i < 100; ++i) {
            Matrix<2> a{{{u(rng), 0.0}, {0.0, u(rng)}}};
            a[0][1] = a[1][0] = 0.3 * u(rng);
            const double s = std::abs(u(rng));
            Matrix<2> b = a;
            b[0][0] += s;
            b[1][1] += s;
            CHECK(G2(a) <= G2(b));
        }
    }
}

TEST_CASE("g-heat examples") {
    const Box<1> K = Box<1>::centered(2.0);
    SECTION("heat flow of a quadratic") {
        Grid<1> g(8.0, 321);
        auto f = GridFunction<1>::sample(g, clipped_square);
        auto u = solve_g_heat(Hamiltonian2<1>::heat(1.0), f, 1.0);
        for (std::size_t i : nodes_in(g, K)) CHECK(u[i] == Approx(f[i] + 1.0).margin(1e-4));
    }
    SECTION("convex payoff saturates the maximal variance") {
        Grid<1> g(8.0, 401);
        auto f = GridFunction<1>::sample(g, clipped_cosh);
        auto G = Hamiltonian2<1>::from_penalty(PenaltyFunction::zero_on(1.0));
        auto u = solve_g_heat(G, f, 1.0);
        CHECK(u.value_at_origin() == Approx(gaussian_cosh(1.0)).margin(1e-2));
        auto half = solve_g_heat(G, f, 0.25);
        CHECK(half.value_at_origin() == Approx(gaussian_cosh(0.5)).margin(1e-2));
    }
    SECTION("affine data and trivial cases") {
        Grid<1> g(4.0, 81);
        auto f = GridFunction<1>::sample(g, [](const Point<1>& x) { return 2.0 * x[0] - 1.0; });
        auto u = solve_g_heat(Hamiltonian2<1>::from_penalty(PenaltyFunction::zero_on(1.0)), f, 1.0);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(u[i] == Approx(f[i]).margin(1e-12));
        CHECK(solve_g_heat(Hamiltonian2<1>::heat(1.0), f, 0.0).values() == f.values());
        CHECK(solve_g_heat(Hamiltonian2<1>({}, {}), f, 1.0).values() == f.values());
        CHECK_THROWS_AS(solve_g_heat(Hamiltonian2<1>::heat(1.0), f, -1.0), input_error);
    }
    SECTION("two-dimensional heat flow") {
        Grid<2> g(4.0, 81);
        auto f = GridFunction<2>::sample(g, [](const Point<2>& x) { return dot<2>(x, x); });
        auto u = solve_g_heat(Hamiltonian2<2>::heat(1.0), f, 0.5);
        for (std::size_t i : nodes_in(g, Box<2>::centered(1.5))) CHECK(u[i] == Approx(f[i] + 1.0).margin(1e-3));
        // a diagonal lambda adds the mixed direction
        auto G = Hamiltonian2<2>({{0.0, 0.0}, {1.0, 1.0}}, {0.0, 0.0});
        auto v = solve_g_heat(G, f, 0.5);
        // G(2 I) = max(0, 1/2 * 2 * |lambda|^2) = 2
        CHECK(v.value_at_origin() == Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("g-heat properties") {
    Grid<1> g(6.0, 121);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1, 1);
    const std::vector<Hamiltonian2<1>> gs{Hamiltonian2<1>::heat(0.5),
                                          Hamiltonian2<1>::from_penalty(PenaltyFunction::zero_on(1.0)),
                                          Hamiltonian2<1>::from_penalty(PenaltyFunction::power(1.0, 2.0, 1.5, 7))};
    for (int trial = 0; trial < 20; ++trial) {
        const double a = u(rng), b = u(rng), c = 2 * u(rng);
        auto f = GridFunction<1>::sample(g, [=](const Point<1>& x) { return a * std::sin(x[0]) + b * std::cos(2 * x[0]); });
        auto fg = GridFunction<1>::sample(g, [=](const Point<1>& x) {
            return a * std::sin(x[0]) + b * std::cos(2 * x[0]) + 0.3 * (1 + std::tanh(x[0] - c));
        });
        for (const auto& G : gs) {
            auto uf = solve_g_heat(G, f, 0.5);
            auto ug = solve_g_heat(G, fg, 0.5);
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(uf[i] <= ug[i] + 1e-12);
            const auto uc = solve_g_heat(G, GridFunction<1>::constant(g, c), 0.5);
            for (double v : uc.values()) CHECK(v == Approx(c).margin(1e-12));
        }
    }
}

TEST_CASE("g-heat consistency") {
    const Box<1> K = Box<1>::centered(2.0);
    std::vector<double> errors;
    for (int N : {81, 161, 321}) {
        Grid<1> g(8.0, N);
        auto u = solve_g_heat(Hamiltonian2<1>::heat(1.0), GridFunction<1>::sample(g, clipped_cosh), 0.5);
        auto exact = GridFunction<1>::sample(g, [](const Point<1>& x) { return std::exp(0.25) * std::cosh(x[0]); });
        errors.push_back(sup_distance_on(u, exact, K));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        INFO(errors[i] << " -> " << errors[i + 1]);
        CHECK(errors[i] / errors[i + 1] >= 1.4);
    }
    SECTION("generator") {
        Grid<1> g(4.0, 201);
        auto f = GridFunction<1>::sample(g, [](const Point<1>& x) { return std::sin(x[0]); });
        auto G = Hamiltonian2<1>::from_penalty(PenaltyFunction::power(1.0, 2.0, 1.5, 7));
        const double dt = 1e-5;
        auto u = solve_g_heat(G, f, dt);
        for (std::size_t i : nodes_in(g, K)) {
            const auto a = fd_hessian(f, g.unflat(i));
            CHECK((u[i] - f[i]) / dt == Approx(G(a)).margin(1e-6));
        }
    }
}
