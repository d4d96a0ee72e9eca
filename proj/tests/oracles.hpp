// Test-side oracles, independent of the library's numerical paths: adaptive
// Simpson quadrature and Richardson finite differences.
#pragma once

#include <cmath>
#include <functional>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 28) {
    const double m = 0.5 * (a + b);
    const double whole = simpson(f, a, b);
    const double left = simpson(f, a, m);
    const double right = simpson(f, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) < 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, 0.5 * tol, depth - 1);
}

// Central difference with one Richardson level.
inline double derivative(const std::function<double(double)>& f, double x,
                         double h = 1e-4) {
    auto d = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

inline double second_derivative(const std::function<double(double)>& f, double x,
                                double h = 1e-3) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace oracles
