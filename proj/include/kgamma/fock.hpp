#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kgamma/bump.hpp"
#include "kgamma/forms_mc.hpp"
#include "kgamma/stats.hpp"

namespace kgamma {

// Finite-dimensional model of the one-particle space: R^n with the weighted
// inner product <u,v> = sum w_i u_i v_i (w_i the kappa-masses of grid cells).
struct WeightedSpace {
    Eigen::VectorXd weights;

    explicit WeightedSpace(Eigen::VectorXd w);
    int dim() const { return int(weights.size()); }
    double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
        return (u.array() * weights.array() * v.array()).sum();
    }
    // Operator norm of B on the weighted space (largest singular value of
    // W^{1/2} B W^{-1/2}).
    double operator_norm(const Eigen::MatrixXd& B) const;
};

// Sorted multisets of size `degree` over {0..dim-1}, lexicographic; the
// coefficient storage order of SymTensor.
const std::vector<std::vector<int>>& multiset_basis(int dim, int degree);
std::size_t multiset_rank(int dim, int degree, const std::vector<int>& sorted);
// degree! / prod(count_i!) - the number of distinct orderings.
double multiset_multiplicity(const std::vector<int>& sorted);

// Element of the degree-k symmetric tensor power, stored as one coefficient
// per index multiset (the common value of all permuted entries). The Fock
// inner product of degree-k tensors carries the factor k!.
class SymTensor {
  public:
    SymTensor() = default;
    SymTensor(int dim, int degree);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    std::size_t size() const { return coef_.size(); }
    double& operator[](std::size_t r) { return coef_[r]; }
    double operator[](std::size_t r) const { return coef_[r]; }

    double coefficient(const std::vector<int>& sorted_index) const;

  private:
    int dim_ = 0;
    int degree_ = 0;
    std::vector<double> coef_;
};

// Symmetrized product u_1 (.) u_2 (.) ... (.) u_k.
SymTensor sym_product(const std::vector<Eigen::VectorXd>& factors);

// <f, g> on degree-k components: k! * sum_m mult(m) W_m f_m g_m.
double fock_inner(const WeightedSpace& space, const SymTensor& f, const SymTensor& g);

// Truncated Fock vector: components of degrees 0..K; degree 0 is the vacuum
// direction (a scalar).
class FockVector {
  public:
    FockVector() = default;
    FockVector(int dim, int truncation);

    static FockVector vacuum(int dim, int truncation);

    int dim() const { return dim_; }
    int truncation() const { return truncation_; }
    double& scalar() { return scalar_; }
    double scalar() const { return scalar_; }
    SymTensor& component(int degree);
    const SymTensor& component(int degree) const;

  private:
    int dim_ = 0;
    int truncation_ = 0;
    double scalar_ = 0.0;
    std::vector<SymTensor> components_;  // degrees 1..K
};

double fock_inner(const WeightedSpace& space, const FockVector& f, const FockVector& g);
double fock_norm(const WeightedSpace& space, const FockVector& f);

// Annihilation at basis node i: degree-k components map to degree k-1 by
// point evaluation in one slot ((d_i T)[j..] = k T[i, j..]); the vacuum maps
// to zero.
FockVector annihilation(int i, const FockVector& f);

// Differential second quantization: A applied in one slot, summed over slots;
// dExp(A) Psi = 0.
FockVector dexp_apply(const Eigen::MatrixXd& A, const FockVector& f);

// Second quantization: B applied in every slot (B tensor-power per degree),
// Exp(B) Psi = Psi. Requires the weighted operator norm of B <= 1 + 1e-12.
FockVector exp_apply(const Eigen::MatrixXd& B, const WeightedSpace& space,
                     const FockVector& f);

// Dense coordinate matrices on the truncated Fock coordinates (degrees 0..K
// concatenated), for the intertwining check.
std::size_t fock_dense_dim(int dim, int truncation);
// Diagonal of the Fock Gram matrix in multiset coordinates: the inner
// product is diagonal there with entries k! mult(m) prod w_i.
Eigen::VectorXd fock_gram_diagonal(const WeightedSpace& space, int truncation);
Eigen::MatrixXd dense_dexp(const Eigen::MatrixXd& A, int truncation);
Eigen::MatrixXd dense_exp_lift(const Eigen::MatrixXd& B, int truncation);

// exp(t dExp(A)) == Exp(exp(tA)) as dense matrices; pass at max-entry
// difference <= 1e-8. A must be W-symmetric negative semidefinite.
IdentityVerdict verify_intertwining(const Eigen::MatrixXd& A,
                                    const WeightedSpace& space, double t,
                                    int truncation);

// First-chaos consequence of the chaos isomorphism:
// Cov(<<phi,eta>>, <<psi,eta>>) = (phi, psi)_{L^2(kappa)} at 4 sigma.
IdentityVerdict first_chaos_isometry(const HatTestFunction& phi,
                                     const HatTestFunction& psi,
                                     const FormsConfig& cfg,
                                     const RandomStream& stream);

}  // namespace kgamma
