#include "kgamma/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "kgamma/quadrature.hpp"

namespace kgamma {

WeightedSpace::WeightedSpace(Eigen::VectorXd w) : weights(std::move(w)) {
    if (weights.size() < 1 || (weights.array() <= 0.0).any())
        throw std::invalid_argument("WeightedSpace: needs >= 1 strictly positive weight");
}

double WeightedSpace::operator_norm(const Eigen::MatrixXd& B) const {
    const Eigen::ArrayXd sq = weights.array().sqrt();
    Eigen::MatrixXd S = B;
    for (Eigen::Index i = 0; i < S.rows(); ++i)
        for (Eigen::Index j = 0; j < S.cols(); ++j) S(i, j) *= sq(i) / sq(j);
    return S.jacobiSvd().singularValues()(0);
}

const std::vector<std::vector<int>>& multiset_basis(int dim, int degree) {
    static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({dim, degree});
    if (it != cache.end()) return it->second;

    std::vector<std::vector<int>> basis;
    std::vector<int> current(degree, 0);
    if (degree == 0) {
        basis.push_back({});
    } else {
        for (;;) {
            basis.push_back(current);
            int p = degree - 1;
            while (p >= 0 && current[p] == dim - 1) --p;
            if (p < 0) break;
            const int v = current[p] + 1;
            for (int q = p; q < degree; ++q) current[q] = v;
        }
    }
    return cache.emplace(std::make_pair(dim, degree), std::move(basis)).first->second;
}

std::size_t multiset_rank(int dim, int degree, const std::vector<int>& sorted) {
    const auto& basis = multiset_basis(dim, degree);
    const auto it = std::lower_bound(basis.begin(), basis.end(), sorted);
    if (it == basis.end() || *it != sorted)
        throw std::out_of_range("multiset_rank: index not in basis");
    return std::size_t(it - basis.begin());
}

double multiset_multiplicity(const std::vector<int>& sorted) {
    double fact = 1.0;
    for (std::size_t i = 2; i <= sorted.size(); ++i) fact *= double(i);
    double denom = 1.0;
    int run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
            denom *= run;
        } else {
            run = 1;
        }
    }
    return fact / denom;
}

SymTensor::SymTensor(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1 || degree < 1)
        throw std::invalid_argument("SymTensor: dim >= 1, degree >= 1");
    coef_.assign(multiset_basis(dim, degree).size(), 0.0);
}

double SymTensor::coefficient(const std::vector<int>& sorted_index) const {
    return coef_[multiset_rank(dim_, degree_, sorted_index)];
}

SymTensor sym_product(const std::vector<Eigen::VectorXd>& factors) {
    if (factors.empty()) throw std::invalid_argument("sym_product: needs >= 1 factor");
    const int k = int(factors.size());
    const int n = int(factors.front().size());
    for (const auto& f : factors)
        if (int(f.size()) != n) throw std::invalid_argument("sym_product: dim mismatch");

    SymTensor out(n, k);
    const auto& basis = multiset_basis(n, k);
    std::vector<int> perm(k);
    for (std::size_t r = 0; r < basis.size(); ++r) {
        const auto& idx = basis[r];
        // (1/k!) sum over factor permutations of prod_j u_{perm[j]}(idx[j]).
        for (int j = 0; j < k; ++j) perm[j] = j;
        double sum = 0.0;
        double count = 0.0;
        do {
            double p = 1.0;
            for (int j = 0; j < k; ++j) p *= factors[perm[j]](idx[j]);
            sum += p;
            count += 1.0;
        } while (std::next_permutation(perm.begin(), perm.end()));
        out[r] = sum / count;
    }
    return out;
}

double fock_inner(const WeightedSpace& space, const SymTensor& f, const SymTensor& g) {
    if (f.dim() != g.dim() || f.degree() != g.degree())
        throw std::invalid_argument("fock_inner: shape mismatch");
    const auto& basis = multiset_basis(f.dim(), f.degree());
    double kfact = 1.0;
    for (int j = 2; j <= f.degree(); ++j) kfact *= j;
    double sum = 0.0;
    for (std::size_t r = 0; r < basis.size(); ++r) {
        double wprod = 1.0;
        for (int i : basis[r]) wprod *= space.weights(i);
        sum += multiset_multiplicity(basis[r]) * wprod * f[r] * g[r];
    }
    return kfact * sum;
}

FockVector::FockVector(int dim, int truncation)
    : dim_(dim), truncation_(truncation) {
    if (truncation < 0) throw std::invalid_argument("FockVector: truncation >= 0");
    for (int k = 1; k <= truncation; ++k) components_.emplace_back(dim, k);
}

FockVector FockVector::vacuum(int dim, int truncation) {
    FockVector v(dim, truncation);
    v.scalar_ = 1.0;
    return v;
}

SymTensor& FockVector::component(int degree) {
    if (degree < 1 || degree > truncation_)
        throw std::out_of_range("FockVector::component: degree out of range");
    return components_[degree - 1];
}

const SymTensor& FockVector::component(int degree) const {
    if (degree < 1 || degree > truncation_)
        throw std::out_of_range("FockVector::component: degree out of range");
    return components_[degree - 1];
}

double fock_inner(const WeightedSpace& space, const FockVector& f, const FockVector& g) {
    if (f.dim() != g.dim() || f.truncation() != g.truncation())
        throw std::invalid_argument("fock_inner: shape mismatch");
    double sum = f.scalar() * g.scalar();
    for (int k = 1; k <= f.truncation(); ++k)
        sum += fock_inner(space, f.component(k), g.component(k));
    return sum;
}

double fock_norm(const WeightedSpace& space, const FockVector& f) {
    return std::sqrt(fock_inner(space, f, f));
}

FockVector annihilation(int i, const FockVector& f) {
    FockVector out(f.dim(), f.truncation());
    out.scalar() = 0.0;
    if (f.truncation() >= 1) {
        // Degree 1 -> vacuum direction: d_i u = u(i).
        std::vector<int> one(1);
        one[0] = i;
        out.scalar() = f.component(1).coefficient(one);
    }
    for (int k = 2; k <= f.truncation(); ++k) {
        const auto& src = f.component(k);
        auto& dst = out.component(k - 1);
        const auto& basis = multiset_basis(f.dim(), k - 1);
        std::vector<int> extended(k);
        for (std::size_t r = 0; r < basis.size(); ++r) {
            extended.assign(basis[r].begin(), basis[r].end());
            extended.push_back(i);
            std::sort(extended.begin(), extended.end());
            dst[r] = double(k) * src.coefficient(extended);
        }
    }
    return out;
}

FockVector dexp_apply(const Eigen::MatrixXd& A, const FockVector& f) {
    const int n = f.dim();
    if (A.rows() != n || A.cols() != n)
        throw std::invalid_argument("dexp_apply: matrix dimension mismatch");
    FockVector out(n, f.truncation());
    out.scalar() = 0.0;  // dExp(A) annihilates the vacuum direction
    for (int k = 1; k <= f.truncation(); ++k) {
        const auto& src = f.component(k);
        auto& dst = out.component(k);
        const auto& basis = multiset_basis(n, k);
        std::vector<int> modified(k);
        for (std::size_t r = 0; r < basis.size(); ++r) {
            const auto& idx = basis[r];
            double acc = 0.0;
            for (int pos = 0; pos < k; ++pos) {
                if (pos > 0 && idx[pos] == idx[pos - 1]) continue;  // group equal slots
                int mu = 0;
                for (int q = 0; q < k; ++q) mu += idx[q] == idx[pos];
                for (int b = 0; b < n; ++b) {
                    const double a = A(idx[pos], b);
                    if (a == 0.0) continue;
                    modified.assign(idx.begin(), idx.end());
                    modified[pos] = b;
                    std::sort(modified.begin(), modified.end());
                    acc += double(mu) * a * src.coefficient(modified);
                }
            }
            dst[r] = acc;
        }
    }
    return out;
}

FockVector exp_apply(const Eigen::MatrixXd& B, const WeightedSpace& space,
                     const FockVector& f) {
    const int n = f.dim();
    if (B.rows() != n || B.cols() != n)
        throw std::invalid_argument("exp_apply: matrix dimension mismatch");
    if (space.operator_norm(B) > 1.0 + 1e-12)
        throw std::invalid_argument("exp_apply: weighted operator norm of B exceeds 1");

    FockVector out(n, f.truncation());
    out.scalar() = f.scalar();  // Exp(B) Psi = Psi
    for (int k = 1; k <= f.truncation(); ++k) {
        const auto& src = f.component(k);
        auto& dst = out.component(k);
        const auto& basis = multiset_basis(n, k);
        std::vector<int> q(k, 0), sorted(k);
        for (std::size_t r = 0; r < basis.size(); ++r) {
            const auto& idx = basis[r];
            double acc = 0.0;
            std::fill(q.begin(), q.end(), 0);
            for (;;) {
                double p = 1.0;
                for (int l = 0; l < k; ++l) p *= B(idx[l], q[l]);
                if (p != 0.0) {
                    sorted.assign(q.begin(), q.end());
                    std::sort(sorted.begin(), sorted.end());
                    acc += p * src.coefficient(sorted);
                }
                int l = 0;
                while (l < k && ++q[l] == n) q[l++] = 0;
                if (l == k) break;
            }
            dst[r] = acc;
        }
    }
    return out;
}

std::size_t fock_dense_dim(int dim, int truncation) {
    std::size_t total = 1;
    for (int k = 1; k <= truncation; ++k) total += multiset_basis(dim, k).size();
    return total;
}

Eigen::VectorXd fock_gram_diagonal(const WeightedSpace& space, int truncation) {
    const int n = space.dim();
    Eigen::VectorXd g(fock_dense_dim(n, truncation));
    g(0) = 1.0;
    std::size_t off = 1;
    double kfact = 1.0;
    for (int k = 1; k <= truncation; ++k) {
        kfact *= k;
        const auto& basis = multiset_basis(n, k);
        for (std::size_t r = 0; r < basis.size(); ++r) {
            double wprod = 1.0;
            for (int i : basis[r]) wprod *= space.weights(i);
            g(off + r) = kfact * multiset_multiplicity(basis[r]) * wprod;
        }
        off += basis.size();
    }
    return g;
}

namespace {

Eigen::VectorXd flatten(const FockVector& f) {
    Eigen::VectorXd v(fock_dense_dim(f.dim(), f.truncation()));
    v(0) = f.scalar();
    std::size_t off = 1;
    for (int k = 1; k <= f.truncation(); ++k) {
        const auto& comp = f.component(k);
        for (std::size_t r = 0; r < comp.size(); ++r) v(off + r) = comp[r];
        off += comp.size();
    }
    return v;
}

FockVector unflatten(const Eigen::VectorXd& v, int dim, int truncation) {
    FockVector f(dim, truncation);
    f.scalar() = v(0);
    std::size_t off = 1;
    for (int k = 1; k <= truncation; ++k) {
        auto& comp = f.component(k);
        for (std::size_t r = 0; r < comp.size(); ++r) comp[r] = v(off + r);
        off += comp.size();
    }
    return f;
}

template <class Apply>
Eigen::MatrixXd dense_of(int dim, int truncation, Apply&& apply) {
    const std::size_t total = fock_dense_dim(dim, truncation);
    Eigen::MatrixXd M(total, total);
    for (std::size_t col = 0; col < total; ++col) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(total);
        e(col) = 1.0;
        M.col(col) = flatten(apply(unflatten(e, dim, truncation)));
    }
    return M;
}

}  // namespace

Eigen::MatrixXd dense_dexp(const Eigen::MatrixXd& A, int truncation) {
    return dense_of(int(A.rows()), truncation,
                    [&](const FockVector& f) { return dexp_apply(A, f); });
}

Eigen::MatrixXd dense_exp_lift(const Eigen::MatrixXd& B, int truncation) {
    // Norm checking is the caller's concern here; the dense lift is used with
    // exp(tA) which is a contraction by construction.
    const int n = int(B.rows());
    return dense_of(n, truncation, [&](const FockVector& f) {
        FockVector out(n, f.truncation());
        out.scalar() = f.scalar();
        for (int k = 1; k <= f.truncation(); ++k) {
            const auto& src = f.component(k);
            auto& dst = out.component(k);
            const auto& basis = multiset_basis(n, k);
            std::vector<int> q(k, 0), sorted(k);
            for (std::size_t r = 0; r < basis.size(); ++r) {
                const auto& idx = basis[r];
                double acc = 0.0;
                std::fill(q.begin(), q.end(), 0);
                for (;;) {
                    double p = 1.0;
                    for (int l = 0; l < k; ++l) p *= B(idx[l], q[l]);
                    if (p != 0.0) {
                        sorted.assign(q.begin(), q.end());
                        std::sort(sorted.begin(), sorted.end());
                        acc += p * src.coefficient(sorted);
                    }
                    int l = 0;
                    while (l < k && ++q[l] == n) q[l++] = 0;
                    if (l == k) break;
                }
                dst[r] = acc;
            }
        }
        return out;
    });
}

IdentityVerdict verify_intertwining(const Eigen::MatrixXd& A,
                                    const WeightedSpace& space, double t,
                                    int truncation) {
    if (t < 0.0) throw std::domain_error("verify_intertwining: t >= 0");
    const Eigen::MatrixXd wa = space.weights.asDiagonal() * A;
    if ((wa - wa.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, wa.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("verify_intertwining: A must be W-symmetric");

    const Eigen::MatrixXd lhs = (t * dense_dexp(A, truncation)).exp();
    const Eigen::MatrixXd rhs = dense_exp_lift((t * A).exp(), truncation);
    const double max_diff = (lhs - rhs).cwiseAbs().maxCoeff();

    auto v = make_verdict_abs("fock-intertwining",
                              "t=" + std::to_string(t) +
                                  " K=" + std::to_string(truncation) +
                                  " n=" + std::to_string(A.rows()),
                              max_diff, 0.0, 1e-8);
    return v;
}

IdentityVerdict first_chaos_isometry(const HatTestFunction& phi,
                                     const HatTestFunction& psi,
                                     const FormsConfig& cfg,
                                     const RandomStream& stream) {
    const double eps = cfg.window.mass_floor;
    if (eps > phi.mark_support().lo || eps > psi.mark_support().lo)
        throw std::invalid_argument("first_chaos_isometry: mass floor too large");
    if (!cfg.window.box.contains(phi.spatial_support()) ||
        !cfg.window.box.contains(psi.spatial_support()))
        throw std::invalid_argument("first_chaos_isometry: supports escape the window");

    // Exact side: (phi, psi)_{L^2(kappa)} over the common support.
    double exact = 0.0;
    const auto box = intersect(phi.spatial_support(), psi.spatial_support());
    const auto mark = intersect(phi.mark_support(), psi.mark_support());
    double quad_dev = 0.0;
    if (box && mark) {
        const auto checked = integrate_hat_checked(
            *box, *mark, 16,
            [&](const Point& x, double s) {
                return std::exp(-s) / s * phi.value(x, s) * psi.value(x, s);
            },
            4);
        exact = checked.value;
        quad_dev = checked.deviation;
    }

    // Two passes on the same stream: means first, then central products.
    const McConfig mc{cfg.n, cfg.shards};
    auto mean_x = mc_accumulate(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        return pairing_hat(phi, eta);
    });
    auto mean_y = mc_accumulate(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        return pairing_hat(psi, eta);
    });
    const double mx = mean_x.mean(), my = mean_y.mean();
    auto stat = mc_accumulate(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        return (pairing_hat(phi, eta) - mx) * (pairing_hat(psi, eta) - my);
    });

    const double cov = stat.mean() * double(cfg.n) / double(cfg.n - 1);
    return make_verdict_sigma("first-chaos-isometry", "", cov, stat.std_error(),
                              exact, 0.0, stat.std_error(),
                              std::max(1e-8, quad_dev), cfg.n, stream.seed());
}

}  // namespace kgamma
