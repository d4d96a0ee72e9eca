#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "kgamma/bump.hpp"
#include "kgamma/cylinder.hpp"
#include "kgamma/mass_coefficient.hpp"
#include "kgamma/stats.hpp"

namespace kgamma {

// Function on X x (0, inf): either a hat test function or the monomial type
// f(x) s^k with k >= 1 (s^0 is not square integrable against s^{-1} e^{-s}).
// Monomial mark powers are kept symbolic so generator actions are exact.
class OneParticleFunction {
  public:
    struct Monomial {
        SpatialBump f;
        int k = 1;
    };

    static OneParticleFunction hat(HatTestFunction phi);
    static OneParticleFunction monomial(SpatialBump f, int k);

    bool is_monomial() const { return std::holds_alternative<Monomial>(u_); }
    const Monomial& as_monomial() const { return std::get<Monomial>(u_); }
    const HatTestFunction& as_hat() const { return std::get<HatTestFunction>(u_); }

    double value(const Point& x, double s) const;
    Point gradient_x(const Point& x, double s) const;
    double laplacian_x(const Point& x, double s) const;
    double d_mark(const Point& x, double s) const;
    double dd_mark(const Point& x, double s) const;

  private:
    explicit OneParticleFunction(std::variant<HatTestFunction, Monomial> u)
        : u_(std::move(u)) {}
    std::variant<HatTestFunction, Monomial> u_;
};

// Pointwise one-particle generator:
//   int:  (c(s)/s) Lap_x u,   ext:  s (d^2/ds^2 - d/ds) u,   full: sum.
// For monomials the ext action is evaluated from the exact coefficient form
// (k(k-1) s^{k-1} - k s^k) f(x).
double apply_generator_pointwise(FormKind kind, const MassCoefficient& c,
                                 const OneParticleFunction& u, const Point& x,
                                 double s);

// Quadrature of the one-particle form over the common support,
//   int dx dlambda(s) [ (c(s)/s) <grad_x u, grad_x v>  and/or  s du dv ],
// with a degree +4 self-check to 1e-8 * scale.
double form_quadrature(FormKind kind, const MassCoefficient& c,
                       const HatTestFunction& u, const HatTestFunction& v,
                       int degree = 24);

// |E#(u,v) + (L# u, v)_kappa| <= 1e-6 * scale.
IdentityVerdict duality_check(FormKind kind, const MassCoefficient& c,
                              const HatTestFunction& u, const HatTestFunction& v,
                              int degree = 24);

// --- structure-preserving discretization ------------------------------------

// Closure at the artificial mark boundaries. The s^{-1} e^{-s} measure forces
// functions in the form domain to vanish at s = 0; absorbing_left carries
// that constraint to the truncated boundary (no_flux leaves a spurious
// near-constant mode whose presence shifts the whole spectrum by
// ~1/log(1/s_min)).
enum class MarkClosure { no_flux, absorbing_left };

// Tensor grid on A x [s_min, s_max] (the spatial part optional), uniform
// cell-centered axes; node weight = product of cell lengths times the exact
// lambda-mass E1(lo) - E1(hi) of the mark cell. Refinement halves spacing.
struct WeightedGrid {
    std::optional<Box> spatial_box;
    int spatial_nodes_per_axis = 0;
    Interval mark_range{1e-3, 30.0};
    int mark_nodes = 400;

    static WeightedGrid mark_only(const Interval& range, int nodes);
    static WeightedGrid tensor(const Box& box, int nodes_per_axis,
                               const Interval& range, int mark_nodes);

    std::size_t total_nodes() const;
};

// Generator matrix in divergence form: M = -W^{-1} A with A the face-assembled
// stiffness of the form. By construction W M is symmetric, the spectrum is
// <= 0 and off-diagonal entries are >= 0 (sub-Markov structure).
struct DiscreteOperator {
    Eigen::MatrixXd matrix;   // M
    Eigen::VectorXd weights;  // node kappa-masses, all > 0

    struct Invariants {
        double symmetry_defect = 0.0;   // max |(WM)_ij - (WM)_ji| / max |WM|
        double max_eigenvalue = 0.0;
        double min_offdiagonal = 0.0;
    };
    Invariants check_invariants() const;

    // Eigenvalues of the weighted-symmetric pencil, descending.
    Eigen::VectorXd eigenvalues() const;
};

DiscreteOperator discretize_generator(FormKind kind, const MassCoefficient& c,
                                      const WeightedGrid& grid,
                                      MarkClosure closure = MarkClosure::absorbing_left);

// e^{tM} by scaling and squaring; t >= 0.
Eigen::MatrixXd heat_semigroup(const DiscreteOperator& op, double t);

// max |(W T)_ij - (W T)_ji| / max |W T| for a computed semigroup matrix.
double w_symmetry_defect(const DiscreteOperator& op, const Eigen::MatrixXd& T);

// --- Laguerre diagnostic (derived oracle, not a paper-reproduction claim) ----

struct Rational {
    long long num = 0;
    long long den = 1;
    double to_double() const { return double(num) / double(den); }
};

// Coefficients (degree 0..n) of the generalized Laguerre polynomial of order
// -1 and degree n, as exact rationals; the constant term vanishes for n >= 1.
std::vector<Rational> laguerre_minus1_coefficients(int n);

// max over a sample grid of |s (e_n'' - e_n') + n e_n| relative to the local
// term scale; exact zero up to rounding (<= 1e-10).
double laguerre_eigen_residual(int n);

// --- refinement study --------------------------------------------------------

struct RefinementRow {
    double spacing = 0.0;
    int eigenvalue_index = 0;  // 1-based among leading nontrivial ones
    double value = 0.0;
    double order_estimate = 0.0;  // vs the Laguerre limit; 0 when undefined
};

// Leading eigenvalues of the ext discretization on [1e-3, 30] across the
// given node counts, with observed convergence orders against -1, -2, -3.
std::vector<RefinementRow> spectrum_refinement_study(
    const std::vector<int>& node_counts, int n_eigenvalues = 3,
    MarkClosure closure = MarkClosure::absorbing_left);

}  // namespace kgamma
