#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kgamma/bump.hpp"
#include "kgamma/outer.hpp"
#include "kgamma/random.hpp"
#include "oracles.hpp"

using namespace kgamma;

TEST_CASE("bump profile: support and smoothness at the edge") {
    BumpFunction b(0.0, 1.0);
    CHECK(b.value(0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(b.value(1.0) == 0.0);
    CHECK(b.value(-1.0) == 0.0);
    CHECK(b.value(1.5) == 0.0);
    CHECK(b.derivative(1.0) == 0.0);
    CHECK(b.second_derivative(-1.0) == 0.0);
    // vanishing to all orders: values near the edge are already tiny
    CHECK(std::fabs(b.value(0.999)) < 1e-200);
    CHECK_THROWS_AS(BumpFunction(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("bump derivatives match finite differences") {
    RandomStream rs(301);
    for (int rep = 0; rep < 30; ++rep) {
        const BumpFunction b(rs.uniform(-1.0, 1.0), rs.uniform(0.5, 2.0));
        const double x = b.center() + rs.uniform(-0.9, 0.9) * b.radius();
        auto f = [&](double t) { return b.value(t); };
        CHECK(b.derivative(x) ==
              doctest::Approx(oracles::derivative(f, x)).epsilon(1e-6));
        CHECK(b.second_derivative(x) ==
              doctest::Approx(oracles::second_derivative(f, x)).epsilon(1e-4));
    }
}

TEST_CASE("spatial bump gradient and laplacian") {
    RandomStream rs(302);
    std::array<BumpFunction, kMaxDim> axes{BumpFunction(0.5, 0.4),
                                           BumpFunction(0.4, 0.35),
                                           BumpFunction(0.6, 0.3)};
    const SpatialBump f(3, axes, 1.3);
    for (int rep = 0; rep < 20; ++rep) {
        Point x{rs.uniform(0.2, 0.8), rs.uniform(0.15, 0.65), rs.uniform(0.4, 0.8)};
        const Point g = f.gradient(x);
        double lap_fd = 0.0;
        for (int i = 0; i < 3; ++i) {
            auto fi = [&](double t) {
                Point y = x;
                y[i] = t;
                return f.value(y);
            };
            CHECK(g[i] == doctest::Approx(oracles::derivative(fi, x[i])).epsilon(1e-5));
            lap_fd += oracles::second_derivative(fi, x[i]);
        }
        CHECK(f.laplacian(x) == doctest::Approx(lap_fd).epsilon(1e-3));
    }
}

TEST_CASE("hat test function: mark support must be positive") {
    CHECK_THROWS_AS(
        HatTestFunction({{SpatialBump(1, {BumpFunction(0.5, 0.4)}, 1.0),
                          BumpFunction(0.5, 1.0)}}),  // support [-0.5, 1.5]
        std::invalid_argument);
}

TEST_CASE("hat test function: derivatives and hulls") {
    const HatTestFunction phi(
        {{SpatialBump(1, {BumpFunction(0.4, 0.3)}, 1.0), BumpFunction(1.0, 0.7)},
         {SpatialBump(1, {BumpFunction(0.6, 0.35)}, 0.7), BumpFunction(1.6, 1.1)}});
    CHECK(phi.spatial_support().axis(0).lo == doctest::Approx(0.1));
    CHECK(phi.spatial_support().axis(0).hi == doctest::Approx(0.95));
    CHECK(phi.mark_support().lo == doctest::Approx(0.3));
    CHECK(phi.mark_support().hi == doctest::Approx(2.7));

    RandomStream rs(303);
    for (int rep = 0; rep < 20; ++rep) {
        Point x{rs.uniform(0.15, 0.9), 0.0, 0.0};
        const double s = rs.uniform(0.35, 2.6);
        auto fs = [&](double t) { return phi.value(x, t); };
        auto fx = [&](double t) {
            Point y = x;
            y[0] = t;
            return phi.value(y, s);
        };
        CHECK(phi.d_mark(x, s) ==
              doctest::Approx(oracles::derivative(fs, s)).epsilon(1e-5));
        CHECK(phi.dd_mark(x, s) ==
              doctest::Approx(oracles::second_derivative(fs, s)).epsilon(1e-3));
        CHECK(phi.gradient_x(x, s)[0] ==
              doctest::Approx(oracles::derivative(fx, x[0])).epsilon(1e-5));
        CHECK(phi.laplacian_x(x, s) ==
              doctest::Approx(oracles::second_derivative(fx, x[0])).epsilon(1e-3));
    }
}

TEST_CASE("outer function: partials match finite differences") {
    RandomStream rs(304);
    const auto g = OuterFunction::tanh_of_linear({0.8, -0.6}, 0.2) *
                       OuterFunction::scaled_tanh(2, 1, 2.0) +
                   OuterFunction::constant(2, 0.3);
    for (int rep = 0; rep < 25; ++rep) {
        const double t1 = rs.uniform(-2.0, 2.0), t2 = rs.uniform(-2.0, 2.0);
        const auto e = g.eval(std::array{t1, t2});
        auto f1 = [&](double u) { return g.value(std::array{u, t2}); };
        auto f2 = [&](double u) { return g.value(std::array{t1, u}); };
        CHECK(e.value == doctest::Approx(f1(t1)));
        CHECK(e.d(0) == doctest::Approx(oracles::derivative(f1, t1)).epsilon(1e-6));
        CHECK(e.d(1) == doctest::Approx(oracles::derivative(f2, t2)).epsilon(1e-6));
        CHECK(e.dd(0, 0) ==
              doctest::Approx(oracles::second_derivative(f1, t1)).epsilon(1e-4));
        CHECK(e.dd(1, 1) ==
              doctest::Approx(oracles::second_derivative(f2, t2)).epsilon(1e-4));
        // mixed partial by nested differences
        auto d1 = [&](double u) {
            auto fu = [&](double v) { return g.value(std::array{v, u}); };
            return oracles::derivative(fu, t1);
        };
        CHECK(e.dd(0, 1) == doctest::Approx(oracles::derivative(d1, t2)).epsilon(1e-4));
        CHECK(e.dd(0, 1) == doctest::Approx(e.dd(1, 0)));
    }
}

TEST_CASE("outer function vocabulary and boundedness certificate") {
    CHECK(OuterFunction::constant(2, 1.0).bounded());
    CHECK(OuterFunction::tanh_of_linear({1.0, 2.0}, 0.0).bounded());
    CHECK(OuterFunction::scaled_tanh(1, 0, 3.0).bounded());
    CHECK_FALSE(OuterFunction::coordinate(2, 0).bounded());
    CHECK_FALSE(OuterFunction::linear({1.0, 1.0}).bounded());
    const auto prod = OuterFunction::tanh_of_linear({1.0, 0.0}, 0.1) *
                      OuterFunction::tanh_of_linear({0.0, -2.0}, 0.0);
    CHECK(prod.bounded());

    // scaled_tanh is close to the identity near zero
    const auto id_like = OuterFunction::scaled_tanh(1, 0, 10.0);
    CHECK(id_like.value(std::array{0.3}) == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("soft clamp: 1-Lipschitz map into (0,1)") {
    const auto g = OuterFunction::linear({1.0});
    const auto clamped = OuterFunction::soft_clamp01(g);
    double prev = clamped.value(std::array{-5.0});
    for (double t = -5.0; t <= 5.0; t += 0.25) {
        const auto e = clamped.eval(std::array{t});
        CHECK(e.value > 0.0);
        CHECK(e.value < 1.0);
        CHECK(e.d(0) <= 1.0 + 1e-12);  // contraction of the derivative
        CHECK(e.d(0) >= 0.0);
        CHECK(e.value >= prev - 1e-12);
        prev = e.value;
    }
}
