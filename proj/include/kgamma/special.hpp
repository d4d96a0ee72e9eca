#pragma once

namespace kgamma {

// Exponential integral E1(x) = \int_x^\infty s^{-1} e^{-s} ds, x > 0.
// Relative error <= 1e-12 (power series for x < 1, modified Lentz continued
// fraction for x >= 1). Throws std::domain_error for x <= 0.
double exp_integral_e1(double x);

// Regularized incomplete gamma functions, P(a,x) + Q(a,x) = 1.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// CDF of Gamma(shape, rate 1) at x.
inline double gamma_cdf(double shape, double x) {
    return x <= 0.0 ? 0.0 : regularized_gamma_p(shape, x);
}

// Asymptotic Kolmogorov-Smirnov tail Q_KS(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
double kolmogorov_tail(double lambda);

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

}  // namespace kgamma
