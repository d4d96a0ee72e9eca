#include "kgamma/one_particle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kgamma/quadrature.hpp"
#include "kgamma/special.hpp"

namespace kgamma {

OneParticleFunction OneParticleFunction::hat(HatTestFunction phi) {
    return OneParticleFunction(std::variant<HatTestFunction, Monomial>(std::move(phi)));
}

OneParticleFunction OneParticleFunction::monomial(SpatialBump f, int k) {
    if (k < 1)
        throw std::invalid_argument(
            "OneParticleFunction::monomial: k >= 1 (s^0 is not square integrable "
            "against s^{-1} e^{-s})");
    return OneParticleFunction(
        std::variant<HatTestFunction, Monomial>(Monomial{std::move(f), k}));
}

double OneParticleFunction::value(const Point& x, double s) const {
    if (is_monomial()) {
        const auto& m = as_monomial();
        return m.f.value(x) * std::pow(s, m.k);
    }
    return as_hat().value(x, s);
}

Point OneParticleFunction::gradient_x(const Point& x, double s) const {
    if (is_monomial()) {
        const auto& m = as_monomial();
        Point g = m.f.gradient(x);
        const double sk = std::pow(s, m.k);
        for (auto& gi : g) gi *= sk;
        return g;
    }
    return as_hat().gradient_x(x, s);
}

double OneParticleFunction::laplacian_x(const Point& x, double s) const {
    if (is_monomial()) {
        const auto& m = as_monomial();
        return m.f.laplacian(x) * std::pow(s, m.k);
    }
    return as_hat().laplacian_x(x, s);
}

double OneParticleFunction::d_mark(const Point& x, double s) const {
    if (is_monomial()) {
        const auto& m = as_monomial();
        return m.f.value(x) * m.k * std::pow(s, m.k - 1);
    }
    return as_hat().d_mark(x, s);
}

double OneParticleFunction::dd_mark(const Point& x, double s) const {
    if (is_monomial()) {
        const auto& m = as_monomial();
        if (m.k == 1) return 0.0;
        return m.f.value(x) * m.k * (m.k - 1) * std::pow(s, m.k - 2);
    }
    return as_hat().dd_mark(x, s);
}

double apply_generator_pointwise(FormKind kind, const MassCoefficient& c,
                                 const OneParticleFunction& u, const Point& x,
                                 double s) {
    if (!(s > 0.0)) throw std::domain_error("apply_generator_pointwise: s > 0");
    double val = 0.0;
    if (kind != FormKind::extrinsic)
        val += (c(s) / s) * u.laplacian_x(x, s);
    if (kind != FormKind::intrinsic)
        val += s * (u.dd_mark(x, s) - u.d_mark(x, s));
    return val;
}

namespace {

double levy_weight(double s) { return std::exp(-s) / s; }

struct FormIntegrals {
    double form = 0.0;       // E#(u, v)
    double pairing = 0.0;    // (L# u, v)_kappa
};

FormIntegrals integrate_pair(FormKind kind, const MassCoefficient& c,
                             const HatTestFunction& u, const HatTestFunction& v,
                             int degree, bool with_pairing) {
    const auto box = intersect(u.spatial_support(), v.spatial_support());
    const auto mark = intersect(u.mark_support(), v.mark_support());
    if (!box || !mark) return {};

    // Panel edges at the bump-support boundaries keep panels analytic.
    std::vector<std::vector<double>> x_breaks(u.dim());
    std::vector<double> s_breaks;
    for (const auto* fn : {&u, &v})
        for (const auto& term : fn->terms()) {
            for (int k = 0; k < u.dim(); ++k) {
                const Interval sup = term.space.axis(k).support();
                x_breaks[k].push_back(sup.lo);
                x_breaks[k].push_back(sup.hi);
            }
            const Interval msup = term.mark.support();
            s_breaks.push_back(msup.lo);
            s_breaks.push_back(msup.hi);
        }
    auto make_rule = [&](int deg) {
        return TensorRule::hat_adapted(*box, *mark, deg, x_breaks, s_breaks);
    };

    auto form_integrand = [&](const Point& x, double s) {
        const double w = levy_weight(s);
        double val = 0.0;
        if (kind != FormKind::extrinsic) {
            const Point gu = u.gradient_x(x, s);
            const Point gv = v.gradient_x(x, s);
            double dot = 0.0;
            for (int k = 0; k < u.dim(); ++k) dot += gu[k] * gv[k];
            val += w * (c(s) / s) * dot;
        }
        if (kind != FormKind::intrinsic)
            val += w * s * u.d_mark(x, s) * v.d_mark(x, s);
        return val;
    };

    const double coarse_val = make_rule(degree).integrate(form_integrand);
    const double fine_val = make_rule(degree + 4).integrate(form_integrand);
    if (std::fabs(fine_val - coarse_val) >
        1e-8 * std::max(1.0, std::fabs(fine_val)))
        throw std::runtime_error(
            "form_quadrature: degree-doubling self-check failed");

    FormIntegrals out;
    out.form = fine_val;
    if (with_pairing) {
        const TensorRule rule = make_rule(degree + 4);
        auto up = OneParticleFunction::hat(u);
        out.pairing = rule.integrate([&](const Point& x, double s) {
            return levy_weight(s) * apply_generator_pointwise(kind, c, up, x, s) *
                   v.value(x, s);
        });
    }
    return out;
}

}  // namespace

double form_quadrature(FormKind kind, const MassCoefficient& c,
                       const HatTestFunction& u, const HatTestFunction& v,
                       int degree) {
    return integrate_pair(kind, c, u, v, degree, false).form;
}

IdentityVerdict duality_check(FormKind kind, const MassCoefficient& c,
                              const HatTestFunction& u, const HatTestFunction& v,
                              int degree) {
    const FormIntegrals fi = integrate_pair(kind, c, u, v, degree, true);
    const double scale = std::max({1.0, std::fabs(fi.form), std::fabs(fi.pairing)});
    auto verdict = make_verdict_abs("one-particle-duality", "", fi.form, -fi.pairing,
                                    1e-6 * scale);
    verdict.kind = to_string(kind);
    verdict.coefficient = c.label();
    return verdict;
}

WeightedGrid WeightedGrid::mark_only(const Interval& range, int nodes) {
    if (!(range.lo > 0.0) || range.hi <= range.lo || nodes < 1)
        throw std::invalid_argument("WeightedGrid: need 0 < s_min < s_max, nodes >= 1");
    WeightedGrid g;
    g.mark_range = range;
    g.mark_nodes = nodes;
    return g;
}

WeightedGrid WeightedGrid::tensor(const Box& box, int nodes_per_axis,
                                  const Interval& range, int mark_nodes) {
    WeightedGrid g = mark_only(range, mark_nodes);
    if (nodes_per_axis < 1)
        throw std::invalid_argument("WeightedGrid: nodes_per_axis >= 1");
    g.spatial_box = box;
    g.spatial_nodes_per_axis = nodes_per_axis;
    return g;
}

std::size_t WeightedGrid::total_nodes() const {
    std::size_t n = std::size_t(mark_nodes);
    if (spatial_box)
        for (int i = 0; i < spatial_box->dim(); ++i) n *= spatial_nodes_per_axis;
    return n;
}

DiscreteOperator discretize_generator(FormKind kind, const MassCoefficient& c,
                                      const WeightedGrid& grid, MarkClosure closure) {
    const int ms = grid.mark_nodes;
    const double s_lo = grid.mark_range.lo;
    const double hs = grid.mark_range.length() / ms;

    // Mark cells [s_lo + j hs, s_lo + (j+1) hs], nodes at centers, weights the
    // exact lambda-mass of the cell.
    std::vector<double> s_node(ms), mark_mass(ms);
    for (int j = 0; j < ms; ++j) {
        const double a = s_lo + j * hs;
        const double b = a + hs;
        s_node[j] = 0.5 * (a + b);
        mark_mass[j] = exp_integral_e1(a) - exp_integral_e1(b);
        if (!(mark_mass[j] > 0.0))
            throw std::invalid_argument("discretize_generator: nonpositive weight");
    }

    const int dim_x = grid.spatial_box ? grid.spatial_box->dim() : 0;
    const int nx = grid.spatial_nodes_per_axis;
    std::array<double, kMaxDim> hx{};
    double cell_volume = 1.0;
    for (int a = 0; a < dim_x; ++a) {
        hx[a] = grid.spatial_box->axis(a).length() / nx;
        cell_volume *= hx[a];
    }

    // Flattened index: mark fastest, then spatial axes.
    std::size_t total = grid.total_nodes();
    auto flat = [&](const std::array<int, kMaxDim>& ix, int j) {
        std::size_t id = 0;
        for (int a = dim_x - 1; a >= 0; --a) id = id * nx + ix[a];
        return id * ms + j;
    };

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, total);
    Eigen::VectorXd w(total);

    std::array<int, kMaxDim> ix{};
    for (;;) {
        for (int j = 0; j < ms; ++j) {
            const std::size_t id = flat(ix, j);
            w[id] = cell_volume * mark_mass[j];

            // Mark-direction faces (extrinsic part), conductance e^{-s_face}.
            if (kind != FormKind::intrinsic) {
                if (j + 1 < ms) {
                    const double s_face = s_lo + (j + 1) * hs;
                    const double K = cell_volume * std::exp(-s_face) / hs;
                    const std::size_t nb = flat(ix, j + 1);
                    A(id, id) += K;
                    A(nb, nb) += K;
                    A(id, nb) -= K;
                    A(nb, id) -= K;
                }
                if (j == 0 && closure == MarkClosure::absorbing_left) {
                    // Flux to the boundary value 0 at s_min.
                    const double K =
                        cell_volume * std::exp(-s_lo) / (s_node[0] - s_lo);
                    A(id, id) += K;
                }
            }

            // Spatial faces (intrinsic part), conductance (c(s)/s) per cell
            // lambda-mass; always no-flux at the spatial boundary.
            if (kind != FormKind::extrinsic && dim_x > 0) {
                const double coef = (c(s_node[j]) / s_node[j]) * mark_mass[j];
                for (int a = 0; a < dim_x; ++a) {
                    if (ix[a] + 1 >= nx) continue;
                    auto jx = ix;
                    jx[a] += 1;
                    const std::size_t nb = flat(jx, j);
                    const double K = coef * cell_volume / (hx[a] * hx[a]);
                    A(id, id) += K;
                    A(nb, nb) += K;
                    A(id, nb) -= K;
                    A(nb, id) -= K;
                }
            }
        }
        int a = 0;
        while (a < dim_x && ++ix[a] == nx) ix[a++] = 0;
        if (a == dim_x) break;
    }

    DiscreteOperator op;
    op.weights = w;
    op.matrix = -(A.array().colwise() / w.array()).matrix();
    return op;
}

DiscreteOperator::Invariants DiscreteOperator::check_invariants() const {
    Invariants inv;
    const Eigen::MatrixXd wm = weights.asDiagonal() * matrix;
    const double scale = std::max(1.0, wm.cwiseAbs().maxCoeff());
    inv.symmetry_defect = (wm - wm.transpose()).cwiseAbs().maxCoeff() / scale;
    inv.max_eigenvalue = eigenvalues().maxCoeff();
    inv.min_offdiagonal = 0.0;
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
            if (i != j) inv.min_offdiagonal = std::min(inv.min_offdiagonal, matrix(i, j));
    return inv;
}

Eigen::VectorXd DiscreteOperator::eigenvalues() const {
    // Similarity to the symmetric form: S_ij = sqrt(w_i / w_j) M_ij.
    const Eigen::ArrayXd sq = weights.array().sqrt();
    Eigen::MatrixXd S = matrix;
    for (Eigen::Index i = 0; i < S.rows(); ++i)
        for (Eigen::Index j = 0; j < S.cols(); ++j) S(i, j) *= sq(i) / sq(j);
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    return solver.eigenvalues().reverse();
}

Eigen::MatrixXd heat_semigroup(const DiscreteOperator& op, double t) {
    if (t < 0.0) throw std::domain_error("heat_semigroup: t >= 0");
    return (t * op.matrix).exp();
}

double w_symmetry_defect(const DiscreteOperator& op, const Eigen::MatrixXd& T) {
    const Eigen::MatrixXd wt = op.weights.asDiagonal() * T;
    const double scale = std::max(1.0, wt.cwiseAbs().maxCoeff());
    return (wt - wt.transpose()).cwiseAbs().maxCoeff() / scale;
}

namespace {

long long gcd_ll(long long a, long long b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b != 0) {
        const long long t = a % b;
        a = b;
        b = t;
    }
    return a == 0 ? 1 : a;
}

Rational make_rational(long long num, long long den) {
    const long long g = gcd_ll(num, den);
    long long n = num / g, d = den / g;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    return {n, d};
}

long long binomial_ll(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

std::vector<Rational> laguerre_minus1_coefficients(int n) {
    if (n < 1 || n > 6)
        throw std::invalid_argument("laguerre_minus1_coefficients: n must be 1..6");
    // L_n^{(-1)}(s) = sum_j (-1)^j C(n-1, n-j) s^j / j!
    std::vector<Rational> coefs(n + 1);
    long long fact = 1;
    for (int j = 0; j <= n; ++j) {
        if (j > 0) fact *= j;
        const long long sign = (j % 2 == 0) ? 1 : -1;
        coefs[j] = make_rational(sign * binomial_ll(n - 1, n - j), fact);
    }
    return coefs;
}

double laguerre_eigen_residual(int n) {
    const auto coefs = laguerre_minus1_coefficients(n);
    std::vector<double> e(coefs.size());
    for (std::size_t j = 0; j < coefs.size(); ++j) e[j] = coefs[j].to_double();

    auto horner = [](const std::vector<double>& p, double s) {
        double v = 0.0;
        for (std::size_t j = p.size(); j-- > 0;) v = v * s + p[j];
        return v;
    };
    std::vector<double> d1(e.size() > 1 ? e.size() - 1 : 0);
    for (std::size_t j = 1; j < e.size(); ++j) d1[j - 1] = double(j) * e[j];
    std::vector<double> d2(d1.size() > 1 ? d1.size() - 1 : 0);
    for (std::size_t j = 1; j < d1.size(); ++j) d2[j - 1] = double(j) * d1[j];

    double worst = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double s = 0.05 + i * 0.25;
        const double t_dd = s * horner(d2, s);
        const double t_d = s * horner(d1, s);
        const double t_e = double(n) * horner(e, s);
        const double scale =
            std::max(1.0, std::fabs(t_dd) + std::fabs(t_d) + std::fabs(t_e));
        worst = std::max(worst, std::fabs(t_dd - t_d + t_e) / scale);
    }
    return worst;
}

std::vector<RefinementRow> spectrum_refinement_study(
    const std::vector<int>& node_counts, int n_eigenvalues, MarkClosure closure) {
    const Interval range{1e-3, 30.0};
    const MassCoefficient c = MassCoefficient::one();

    std::vector<Eigen::VectorXd> spectra;
    std::vector<double> spacings;
    for (int m : node_counts) {
        const auto op = discretize_generator(
            FormKind::extrinsic, c, WeightedGrid::mark_only(range, m), closure);
        spectra.push_back(op.eigenvalues());
        spacings.push_back(range.length() / m);
    }

    // With no-flux closure the constant mode sits at 0; skip it.
    const int skip = closure == MarkClosure::no_flux ? 1 : 0;

    std::vector<RefinementRow> rows;
    for (std::size_t g = 0; g < spectra.size(); ++g) {
        for (int k = 0; k < n_eigenvalues; ++k) {
            RefinementRow row;
            row.spacing = spacings[g];
            row.eigenvalue_index = k + 1;
            row.value = spectra[g](k + skip);
            if (g > 0) {
                const double target = -double(k + 1);
                const double err_coarse = std::fabs(spectra[g - 1](k + skip) - target);
                const double err_fine = std::fabs(row.value - target);
                if (err_fine > 0.0 && err_coarse > 0.0)
                    row.order_estimate = std::log2(err_coarse / err_fine);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace kgamma
