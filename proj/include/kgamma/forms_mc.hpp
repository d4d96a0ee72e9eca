#pragma once

#include <functional>

#include "kgamma/cylinder.hpp"
#include "kgamma/stats.hpp"

namespace kgamma {

// Monte Carlo configuration shared by the form estimators. The window's mass
// floor must sit at or below the lower mark-support bound of every test
// function involved (then the truncation is exact for the hat class).
struct FormsConfig {
    Window window;
    std::uint64_t n = 100000;
    int shards = 1;
    int quad_degree = 16;  // per axis and panel, Mecke inner integrals
    int quad_panels = 4;   // composite panels per axis
};

// Per-sample atom-sum integrand of the form:
//   sum over atoms of s(x) [ c(s) <grad^int F, grad^int G>  and/or
//                            grad^ext F grad^ext G ]  per kind.
double form_atom_sum(FormKind kind, const MassCoefficient& c,
                     const CylinderFunctionHat& F, const CylinderFunctionHat& G,
                     const WeightedConfiguration& eta);
double form_atom_sum(FormKind kind, const MassCoefficient& c,
                     const CylinderFunctionPlain& F, const CylinderFunctionPlain& G,
                     const WeightedConfiguration& eta);

// E_G of the atom-sum integrand. Rejects windows whose mass floor exceeds a
// test-function lower support bound.
EstimateReport estimate_form_atoms(FormKind kind, const MassCoefficient& c,
                                   const CylinderFunctionHat& F,
                                   const CylinderFunctionHat& G,
                                   const FormsConfig& cfg, const RandomStream& stream);

// Plain-class variant; requires an exp-integrable coefficient (the module
// refuses to run estimators whose variance the coefficient cannot control).
EstimateReport estimate_form_atoms_plain(FormKind kind, const MassCoefficient& c,
                                         const CylinderFunctionPlain& F,
                                         const CylinderFunctionPlain& G,
                                         const FormsConfig& cfg,
                                         const RandomStream& stream);

// Mecke representation: per sample, the inner integral
//   int dx ds e^{-s} (c(s)/s^2) <grad_x F(eta+s d_x), grad_x G(eta+s d_x)>   (int)
//   int dx ds e^{-s} (d/ds F(eta+s d_x)) (d/ds G(eta+s d_x))                 (ext)
// over the common support, by tensor Gauss-Legendre with a degree +4 self
// check (deviation > 1e-6 * scale raises).
EstimateReport estimate_form_mecke(FormKind kind, const MassCoefficient& c,
                                   const CylinderFunctionHat& F,
                                   const CylinderFunctionHat& G,
                                   const FormsConfig& cfg, const RandomStream& stream);

// E[ (-L# F)(eta) G(eta) ].
EstimateReport estimate_generator_pairing(FormKind kind, const MassCoefficient& c,
                                          const CylinderFunctionHat& F,
                                          const CylinderFunctionHat& G,
                                          const FormsConfig& cfg,
                                          const RandomStream& stream);

// Same-stream coupled comparisons (both sides on each sample).
IdentityVerdict compare_form_representations(FormKind kind, const MassCoefficient& c,
                                             const CylinderFunctionHat& F,
                                             const CylinderFunctionHat& G,
                                             const FormsConfig& cfg,
                                             const RandomStream& stream);
IdentityVerdict compare_form_generator(FormKind kind, const MassCoefficient& c,
                                       const CylinderFunctionHat& F,
                                       const CylinderFunctionHat& G,
                                       const FormsConfig& cfg,
                                       const RandomStream& stream);
IdentityVerdict compare_generator_symmetry(FormKind kind, const MassCoefficient& c,
                                           const CylinderFunctionHat& F,
                                           const CylinderFunctionHat& G,
                                           const FormsConfig& cfg,
                                           const RandomStream& stream);

// Bounded measurable compactly supported integrand of the Laplace transform;
// indicator-type functions are admissible (piecewise constant on `support`).
struct BoundedSpatialFunction {
    std::function<double(const Point&)> fn;
    Box support;
    double sup_bound = 0.0;
    bool piecewise_constant = false;

    static BoundedSpatialFunction indicator(const Box& box, double scale);
    static BoundedSpatialFunction from_bump(const SpatialBump& bump);
};

// MC mean of exp<phi, eta> against exp[-int log(1 - phi) dx]; the exact side
// by quadrature (tolerance 1e-8 plus the measured quadrature deviation and
// the mass-floor bias, folded into the verdict).
IdentityVerdict verify_laplace_transform(const BoundedSpatialFunction& phi,
                                         const FormsConfig& cfg,
                                         const RandomStream& stream);

// Mecke/gamma identity for integrands F(eta, x) = phi(x, s(x)) G(eta):
//   E int d eta(x) F(eta,x) = E int dx ds e^{-s} F(eta + s d_x, x).
IdentityVerdict verify_mecke_gamma(const HatTestFunction& phi,
                                   const CylinderFunctionHat& G,
                                   const FormsConfig& cfg, const RandomStream& stream);

// E sum_atoms chi_box(x) s^l = vol(box) (l-1)!  for 1 <= l <= 6.
IdentityVerdict verify_moments(const Box& box, int l, const FormsConfig& cfg,
                               const RandomStream& stream);

// KS of eta(box) against Gamma(vol(box), 1); skipped below volume 0.05 where
// the atom at zero dominates.
IdentityVerdict distribution_check_gamma(const Box& box, const FormsConfig& cfg,
                                         const RandomStream& stream);

}  // namespace kgamma
