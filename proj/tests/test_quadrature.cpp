#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kgamma/quadrature.hpp"
#include "oracles.hpp"

using namespace kgamma;

TEST_CASE("Gauss-Legendre exactness on polynomials up to degree 2n-1") {
    for (int n : {2, 5, 12}) {
        const auto rule = gauss_legendre(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double sum = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                sum += rule.weights[i] * std::pow(rule.nodes[i], p);
            const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
            CHECK(sum == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("nodes are symmetric and weights positive") {
    const auto rule = gauss_legendre(16);
    for (int i = 0; i < 16; ++i) {
        CHECK(rule.weights[i] > 0.0);
        CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[15 - i]).epsilon(1e-14));
    }
}

TEST_CASE("tensor rule over a box") {
    const Box box = Box::cube(2, 0.0, 2.0);
    const auto rule = TensorRule::spatial(box, 12);
    // separable integrand: int_0^2 e^{-x} dx * int_0^2 sin(y) dy
    const double got = rule.integrate_spatial(
        [](const Point& p) { return std::exp(-p[0]) * std::sin(p[1]); });
    const double exact = (1.0 - std::exp(-2.0)) * (1.0 - std::cos(2.0));
    CHECK(got == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("hat rule over box times mark interval") {
    const Box box = Box::unit(1);
    const Interval mark{0.5, 2.5};
    const auto rule = TensorRule::hat(box, mark, 16);
    const double got = rule.integrate(
        [](const Point& x, double s) { return (1.0 + x[0]) * std::exp(-s); });
    const double exact = 1.5 * (std::exp(-0.5) - std::exp(-2.5));
    CHECK(got == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("checked integration reports small deviation on smooth integrands") {
    const auto checked = integrate_hat_checked(
        Box::unit(1), Interval{0.2, 3.0}, 12,
        [](const Point& x, double s) { return std::cos(3.0 * x[0]) * std::exp(-s); });
    const double exact = std::sin(3.0) / 3.0 * (std::exp(-0.2) - std::exp(-3.0));
    CHECK(checked.value == doctest::Approx(exact).epsilon(1e-10));
    CHECK(checked.deviation < 1e-10);

    // The 1/s weight over [0.2, 3] needs a higher degree; the deviation
    // estimate sees that.
    const auto rough = integrate_hat_checked(
        Box::unit(1), Interval{0.2, 3.0}, 12,
        [](const Point& x, double s) { return std::cos(3.0 * x[0]) / s; });
    CHECK(rough.deviation > 1e-10);
}
