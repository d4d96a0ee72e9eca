#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kgamma/special.hpp"
#include "oracles.hpp"

using namespace kgamma;

TEST_CASE("E1 against the adaptive quadrature oracle") {
    // Frozen from the oracle: int_1^inf e^{-s}/s ds.
    const double quad = oracles::adaptive_simpson(
        [](double s) { return std::exp(-s) / s; }, 1.0, 45.0, 1e-14);
    CHECK(exp_integral_e1(1.0) == doctest::Approx(0.21938393439552027).epsilon(1e-12));
    CHECK(exp_integral_e1(1.0) == doctest::Approx(quad).epsilon(1e-11));

    for (double x : {0.05, 0.3, 0.8, 1.5, 3.0, 7.0, 20.0}) {
        const double oracle = oracles::adaptive_simpson(
            [](double s) { return std::exp(-s) / s; }, x, x + 50.0, 1e-15);
        CHECK(exp_integral_e1(x) == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("E1 small-argument expansion") {
    // E1(eps) = -gamma - ln(eps) + O(eps)
    const double eps = 1e-6;
    CHECK(std::fabs(exp_integral_e1(eps) - (-kEulerGamma - std::log(eps))) < 1e-5);
}

TEST_CASE("E1 is strictly decreasing and rejects nonpositive arguments") {
    CHECK(exp_integral_e1(0.1) > exp_integral_e1(1.0));
    CHECK(exp_integral_e1(1.0) > exp_integral_e1(2.0));
    CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
    CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
}

TEST_CASE("regularized incomplete gamma") {
    // P(1, x) = 1 - e^{-x}
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0})
        CHECK(regularized_gamma_p(1.0, x) ==
              doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
    // P(a, x) + Q(a, x) = 1
    for (double a : {0.5, 2.0, 7.5})
        for (double x : {0.2, 1.0, 4.0, 12.0})
            CHECK(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) ==
                  doctest::Approx(1.0).epsilon(1e-12));
    // Gamma(2,1) CDF against the quadrature oracle.
    const double oracle = oracles::adaptive_simpson(
        [](double s) { return s * std::exp(-s); }, 0.0, 2.5, 1e-14);
    CHECK(gamma_cdf(2.0, 2.5) == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("kolmogorov tail") {
    CHECK(kolmogorov_tail(0.0) == 1.0);
    CHECK(kolmogorov_tail(3.0) < 1e-7);
    CHECK(kolmogorov_tail(0.5) > kolmogorov_tail(1.0));
    // Known value Q(1) ~ 0.26999967...
    CHECK(kolmogorov_tail(1.0) == doctest::Approx(0.2699996717).epsilon(1e-6));
}
