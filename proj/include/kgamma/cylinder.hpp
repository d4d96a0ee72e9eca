#pragma once

#include <vector>

#include "kgamma/bump.hpp"
#include "kgamma/mass_coefficient.hpp"
#include "kgamma/measure.hpp"
#include "kgamma/outer.hpp"

namespace kgamma {

enum class FormKind { intrinsic, extrinsic, full };

const char* to_string(FormKind kind);

// Pairing <<phi, eta>> = sum over atoms of phi(x, s(x)).
double pairing_hat(const HatTestFunction& phi, const WeightedConfiguration& eta);

// Pairing <f, eta> = sum over atoms of s(x) f(x).
double pairing_plain(const SpatialBump& f, const WeightedConfiguration& eta);

// Cylinder function F(eta) = g(<<phi_1,eta>>, ..., <<phi_N,eta>>) on the hat
// class. All pointwise derivative operators below are analytic.
class CylinderFunctionHat {
  public:
    CylinderFunctionHat() = default;
    CylinderFunctionHat(OuterFunction outer, std::vector<HatTestFunction> tests);

    int arity() const { return int(tests_.size()); }
    const OuterFunction& outer() const { return outer_; }
    const std::vector<HatTestFunction>& tests() const { return tests_; }

    std::vector<double> pairings(const WeightedConfiguration& eta) const;
    double operator()(const WeightedConfiguration& eta) const;

    // Intrinsic gradient at atom `idx`: sum_i d_i g * (1/s) grad_x phi_i(x,s).
    Point intrinsic_gradient(const WeightedConfiguration& eta, std::size_t idx) const;
    // Extrinsic gradient at atom `idx`: sum_i d_i g * d/ds phi_i(x,s).
    double extrinsic_gradient(const WeightedConfiguration& eta, std::size_t idx) const;

    // Second-order difference operators at an atom: the Hessian-of-g term
    // plus the first-order term with the spatial Laplacian, and the
    // (d^2/du^2 - d/du) analog in the mark.
    double delta_space(const WeightedConfiguration& eta, std::size_t idx) const;
    double delta_mark(const WeightedConfiguration& eta, std::size_t idx) const;

    // --- added-atom calculus (Mecke representations) ----------------------
    // Arguments of g for F(eta + s delta_x) given the base pairings of eta.
    std::vector<double> augmented_args(const std::vector<double>& base,
                                       const Point& x, double s) const;
    double value_added(const std::vector<double>& base, const Point& x, double s) const;
    Point grad_x_added(const std::vector<double>& base, const Point& x, double s) const;
    double d_mark_added(const std::vector<double>& base, const Point& x, double s) const;

    int dim() const { return tests_.empty() ? 1 : tests_.front().dim(); }
    Box spatial_support() const;    // hull over tests
    Interval mark_support() const;  // hull over tests

  private:
    void check_atom(const WeightedConfiguration& eta, std::size_t idx) const;

    OuterFunction outer_;
    std::vector<HatTestFunction> tests_;
};

// Cylinder function F(eta) = g(<f_1,eta>, ..., <f_N,eta>) on the plain class.
class CylinderFunctionPlain {
  public:
    CylinderFunctionPlain() = default;
    CylinderFunctionPlain(OuterFunction outer, std::vector<SpatialBump> tests);

    int arity() const { return int(tests_.size()); }
    const OuterFunction& outer() const { return outer_; }
    const std::vector<SpatialBump>& tests() const { return tests_; }

    std::vector<double> pairings(const WeightedConfiguration& eta) const;
    double operator()(const WeightedConfiguration& eta) const;

    // sum_i d_i g * grad f_i(x)  /  sum_i d_i g * f_i(x).
    Point intrinsic_gradient(const WeightedConfiguration& eta, std::size_t idx) const;
    double extrinsic_gradient(const WeightedConfiguration& eta, std::size_t idx) const;

  private:
    OuterFunction outer_;
    std::vector<SpatialBump> tests_;
};

// Pointwise generator L# F(eta) as the atom sum; integration d eta(x) carries
// the weight s(x):
//   int:  sum s(x) (c(s)/s^2) Delta^X F,  ext:  sum s(x) Delta^mark F.
double generator(FormKind kind, const MassCoefficient& c,
                 const CylinderFunctionHat& F, const WeightedConfiguration& eta);

// Atom transport along the flow of v: fixed-step RK4 with 64 substeps,
// masses unchanged.
WeightedConfiguration flow_pushforward(const VectorField& v, double t,
                                       const WeightedConfiguration& eta);

// Mass scaling d M_{th}(eta) = e^{t h(x)} d eta: masses scale, positions fixed.
WeightedConfiguration mass_scaling(const SpatialBump& h, double t,
                                   const WeightedConfiguration& eta);

// Richardson-extrapolated central difference (d/dt)|_0 F(transform_t eta).
// Contract: equals the tangent pairings below within 1e-6.
template <class F>
double directional_derivative_intrinsic(F&& f, const VectorField& v,
                                        const WeightedConfiguration& eta,
                                        double step = 1e-4) {
    auto diff = [&](double h) {
        return (f(flow_pushforward(v, h, eta)) - f(flow_pushforward(v, -h, eta))) /
               (2.0 * h);
    };
    const double d1 = diff(step);
    const double d2 = diff(0.5 * step);
    return (4.0 * d2 - d1) / 3.0;
}

template <class F>
double directional_derivative_extrinsic(F&& f, const SpatialBump& h,
                                        const WeightedConfiguration& eta,
                                        double step = 1e-4) {
    auto diff = [&](double t) {
        return (f(mass_scaling(h, t, eta)) - f(mass_scaling(h, -t, eta))) / (2.0 * t);
    };
    const double d1 = diff(step);
    const double d2 = diff(0.5 * step);
    return (4.0 * d2 - d1) / 3.0;
}

// Tangent pairings sum_atoms s(x) <grad^int F(eta,x), v(x)> and
// sum_atoms s(x) grad^ext F(eta,x) h(x).
double tangent_pairing_intrinsic(const CylinderFunctionHat& F, const VectorField& v,
                                 const WeightedConfiguration& eta);
double tangent_pairing_intrinsic(const CylinderFunctionPlain& F, const VectorField& v,
                                 const WeightedConfiguration& eta);
double tangent_pairing_extrinsic(const CylinderFunctionHat& F, const SpatialBump& h,
                                 const WeightedConfiguration& eta);
double tangent_pairing_extrinsic(const CylinderFunctionPlain& F, const SpatialBump& h,
                                 const WeightedConfiguration& eta);

}  // namespace kgamma
