#include "kgamma/forms_mc.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kgamma/quadrature.hpp"
#include "kgamma/special.hpp"

namespace kgamma {

namespace {

// Weighted test-derivative sums at one point for a hat cylinder with outer
// partials already evaluated: sum_i d_i g * grad phi_i and sum_i d_i g * ds phi_i.
void weighted_derivs(const CylinderFunctionHat& F, const OuterFunction::Gradient& e,
                     const Point& x, double s, Point& grad, double& dmark) {
    grad = Point{};
    dmark = 0.0;
    for (std::size_t i = 0; i < F.tests().size(); ++i) {
        const double gi = e.d(int(i));
        const Point gp = F.tests()[i].gradient_x(x, s);
        for (int k = 0; k < F.dim(); ++k) grad[k] += gi * gp[k];
        dmark += gi * F.tests()[i].d_mark(x, s);
    }
}

void check_exactness(const FormsConfig& cfg, const CylinderFunctionHat& F,
                     const CylinderFunctionHat& G) {
    const double eps = cfg.window.mass_floor;
    const double a = std::min(F.mark_support().lo, G.mark_support().lo);
    if (eps > a) {
        std::ostringstream os;
        os << "mass floor " << eps << " exceeds the lower mark-support bound " << a
           << "; truncation would bias the hat-class estimate";
        throw std::invalid_argument(os.str());
    }
    if (!cfg.window.box.contains(F.spatial_support()) ||
        !cfg.window.box.contains(G.spatial_support()))
        throw std::invalid_argument(
            "sampling window does not cover the test-function supports");
}

EstimateReport to_report(const RunningStat& s, const FormsConfig& cfg,
                         const RandomStream& stream) {
    return {s.mean(), s.std_error(), s.count(), cfg.shards, stream.seed()};
}

// Inner Mecke integrand machinery shared by the representation estimator and
// its coupled comparison. The bump-derived factors at the quadrature nodes do
// not depend on the sample, so they are tabulated once; per sample only the
// outer partials vary. The degree +4 self-check runs on a deterministic
// subsample of configurations (every 64th per shard) since the quadrature
// error is dominated by the fixed factors.
class MeckeIntegrator {
  public:
    static constexpr std::uint64_t kCheckStride = 64;

    MeckeIntegrator(FormKind kind, const MassCoefficient& c,
                    const CylinderFunctionHat& F, const CylinderFunctionHat& G,
                    int degree)
        : kind_(kind), F_(&F), G_(&G) {
        const auto box = intersect(F.spatial_support(), G.spatial_support());
        const auto mark = intersect(F.mark_support(), G.mark_support());
        empty_ = !box || !mark;
        const auto taF = F.outer().as_tanh_affine();
        const auto taG = G.outer().as_tanh_affine();
        if (taF && taG) {
            specialized_ = true;
            taF_ = *taF;
            taG_ = *taG;
        }
        if (!empty_) {
            // Panel edges at every bump-support boundary keep each panel's
            // integrand analytic.
            std::vector<std::vector<double>> x_breaks(F.dim());
            std::vector<double> s_breaks;
            for (const auto* cyl : {&F, &G})
                for (const auto& test : cyl->tests())
                    for (const auto& term : test.terms()) {
                        for (int k = 0; k < F.dim(); ++k) {
                            const Interval sup = term.space.axis(k).support();
                            x_breaks[k].push_back(sup.lo);
                            x_breaks[k].push_back(sup.hi);
                        }
                        const Interval msup = term.mark.support();
                        s_breaks.push_back(msup.lo);
                        s_breaks.push_back(msup.hi);
                    }
            const int deg_x = std::max(10, degree - 6);
            build(coarse_,
                  TensorRule::hat_adapted(*box, *mark, deg_x, x_breaks, s_breaks, 1,
                                          degree),
                  c);
            build(fine_,
                  TensorRule::hat_adapted(*box, *mark, deg_x + 4, x_breaks, s_breaks,
                                          1, degree + 4),
                  c);
        }
    }

    // Inner integral for one sample; `index` drives the self-check cadence.
    double operator()(const std::vector<double>& baseF,
                      const std::vector<double>& baseG,
                      std::uint64_t index) const {
        if (empty_) return 0.0;
        const double value = integrate(coarse_, baseF, baseG);
        if (index % kCheckStride == 0) {
            const double refined = integrate(fine_, baseF, baseG);
            const double scale = std::max(1.0, std::fabs(refined));
            if (std::fabs(refined - value) > 1e-6 * scale)
                throw std::runtime_error(
                    "estimate_form_mecke: quadrature self-check failed (raise the "
                    "degree or panel count)");
        }
        return value;
    }

  private:
    struct Table {
        std::size_t n_nodes = 0;
        std::vector<double> weight_int;  // w * e^{-s} c(s) / s^2
        std::vector<double> weight_ext;  // w * e^{-s}
        // per node x per test function
        std::vector<double> valF, dmarkF, valG, dmarkG;
        std::vector<double> gradF, gradG;  // extra kMaxDim stride
        // tanh-affine fast path: node part of each tanh argument and the
        // fully contracted weight sum_{ij} betaF_i betaG_j (...)
        std::vector<double> spec_uF, spec_uG, spec_T;
    };

    void build(Table& t, const TensorRule& rule, const MassCoefficient& c) {
        const auto& nodes = rule.hat_nodes();
        const std::size_t nf = F_->tests().size(), ng = G_->tests().size();
        t.n_nodes = nodes.size();
        t.weight_int.resize(t.n_nodes);
        t.weight_ext.resize(t.n_nodes);
        t.valF.resize(t.n_nodes * nf);
        t.dmarkF.resize(t.n_nodes * nf);
        t.gradF.resize(t.n_nodes * nf * kMaxDim);
        t.valG.resize(t.n_nodes * ng);
        t.dmarkG.resize(t.n_nodes * ng);
        t.gradG.resize(t.n_nodes * ng * kMaxDim);
        for (std::size_t n = 0; n < t.n_nodes; ++n) {
            const auto& node = nodes[n];
            const double ws = std::exp(-node.s) * node.w;
            t.weight_int[n] = ws * c(node.s) / (node.s * node.s);
            t.weight_ext[n] = ws;
            for (std::size_t i = 0; i < nf; ++i) {
                const auto& phi = F_->tests()[i];
                t.valF[n * nf + i] = phi.value(node.x, node.s);
                t.dmarkF[n * nf + i] = phi.d_mark(node.x, node.s);
                const Point g = phi.gradient_x(node.x, node.s);
                for (int k = 0; k < kMaxDim; ++k)
                    t.gradF[(n * nf + i) * kMaxDim + k] = g[k];
            }
            for (std::size_t j = 0; j < ng; ++j) {
                const auto& psi = G_->tests()[j];
                t.valG[n * ng + j] = psi.value(node.x, node.s);
                t.dmarkG[n * ng + j] = psi.d_mark(node.x, node.s);
                const Point g = psi.gradient_x(node.x, node.s);
                for (int k = 0; k < kMaxDim; ++k)
                    t.gradG[(n * ng + j) * kMaxDim + k] = g[k];
            }
        }
        if (specialized_) {
            t.spec_uF.resize(t.n_nodes);
            t.spec_uG.resize(t.n_nodes);
            t.spec_T.resize(t.n_nodes);
            for (std::size_t n = 0; n < t.n_nodes; ++n) {
                double uF = 0.0, uG = 0.0;
                for (std::size_t i = 0; i < nf; ++i)
                    uF += taF_.beta[i] * t.valF[n * nf + i];
                for (std::size_t j = 0; j < ng; ++j)
                    uG += taG_.beta[j] * t.valG[n * ng + j];
                t.spec_uF[n] = uF;
                t.spec_uG[n] = uG;
                double contracted = 0.0;
                for (std::size_t i = 0; i < nf; ++i)
                    for (std::size_t j = 0; j < ng; ++j) {
                        const double bb = taF_.beta[i] * taG_.beta[j];
                        if (bb == 0.0) continue;
                        double term = 0.0;
                        if (kind_ != FormKind::extrinsic) {
                            double dot = 0.0;
                            for (int k = 0; k < kMaxDim; ++k)
                                dot += t.gradF[(n * nf + i) * kMaxDim + k] *
                                       t.gradG[(n * ng + j) * kMaxDim + k];
                            term += t.weight_int[n] * dot;
                        }
                        if (kind_ != FormKind::intrinsic)
                            term += t.weight_ext[n] * t.dmarkF[n * nf + i] *
                                    t.dmarkG[n * ng + j];
                        contracted += bb * term;
                    }
                t.spec_T[n] = contracted;
            }
        }
    }

    double integrate(const Table& t, const std::vector<double>& baseF,
                     const std::vector<double>& baseG) const {
        if (specialized_) {
            // sum_n dgF(u) dgG(u) T(n) with dg = alpha sech^2 for tanh shapes
            // (alpha alone for affine ones); the sample enters only through
            // the scalar base shifts.
            double shiftF = taF_.gamma, shiftG = taG_.gamma;
            for (std::size_t i = 0; i < baseF.size(); ++i)
                shiftF += taF_.beta[i] * baseF[i];
            for (std::size_t j = 0; j < baseG.size(); ++j)
                shiftG += taG_.beta[j] * baseG[j];
            double sum = 0.0;
            for (std::size_t n = 0; n < t.n_nodes; ++n) {
                double dF = 1.0, dG = 1.0;
                if (taF_.has_tanh) {
                    const double u = std::tanh(shiftF + t.spec_uF[n]);
                    dF = 1.0 - u * u;
                }
                if (taG_.has_tanh) {
                    const double u = std::tanh(shiftG + t.spec_uG[n]);
                    dG = 1.0 - u * u;
                }
                sum += dF * dG * t.spec_T[n];
            }
            return taF_.alpha * taG_.alpha * sum;
        }
        const std::size_t nf = F_->tests().size(), ng = G_->tests().size();
        const int d = F_->dim();
        std::array<double, OuterFunction::kMaxArity> argsF{}, argsG{};
        double sum = 0.0;
        for (std::size_t n = 0; n < t.n_nodes; ++n) {
            for (std::size_t i = 0; i < nf; ++i)
                argsF[i] = baseF[i] + t.valF[n * nf + i];
            for (std::size_t j = 0; j < ng; ++j)
                argsG[j] = baseG[j] + t.valG[n * ng + j];
            const auto eF = F_->outer().gradient({argsF.data(), nf});
            const auto eG = G_->outer().gradient({argsG.data(), ng});
            if (kind_ != FormKind::extrinsic) {
                std::array<double, kMaxDim> gF{}, gG{};
                for (std::size_t i = 0; i < nf; ++i) {
                    const double a = eF.d(int(i));
                    for (int k = 0; k < d; ++k)
                        gF[k] += a * t.gradF[(n * nf + i) * kMaxDim + k];
                }
                for (std::size_t j = 0; j < ng; ++j) {
                    const double b = eG.d(int(j));
                    for (int k = 0; k < d; ++k)
                        gG[k] += b * t.gradG[(n * ng + j) * kMaxDim + k];
                }
                double dot = 0.0;
                for (int k = 0; k < d; ++k) dot += gF[k] * gG[k];
                sum += t.weight_int[n] * dot;
            }
            if (kind_ != FormKind::intrinsic) {
                double mF = 0.0, mG = 0.0;
                for (std::size_t i = 0; i < nf; ++i)
                    mF += eF.d(int(i)) * t.dmarkF[n * nf + i];
                for (std::size_t j = 0; j < ng; ++j)
                    mG += eG.d(int(j)) * t.dmarkG[n * ng + j];
                sum += t.weight_ext[n] * mF * mG;
            }
        }
        return sum;
    }

    FormKind kind_;
    const CylinderFunctionHat* F_;
    const CylinderFunctionHat* G_;
    bool empty_ = false;
    bool specialized_ = false;
    OuterFunction::TanhAffine taF_{}, taG_{};
    Table coarse_, fine_;
};

}  // namespace

double form_atom_sum(FormKind kind, const MassCoefficient& c,
                     const CylinderFunctionHat& F, const CylinderFunctionHat& G,
                     const WeightedConfiguration& eta) {
    if (eta.empty()) return 0.0;
    const auto eF = F.outer().gradient(F.pairings(eta));
    const auto eG = G.outer().gradient(G.pairings(eta));
    double sum = 0.0;
    Point aF, aG;
    double bF, bG;
    for (const auto& atom : eta.atoms()) {
        weighted_derivs(F, eF, atom.position, atom.mass, aF, bF);
        weighted_derivs(G, eG, atom.position, atom.mass, aG, bG);
        const double s = atom.mass;
        if (kind != FormKind::extrinsic) {
            double dot = 0.0;
            for (int k = 0; k < F.dim(); ++k) dot += aF[k] * aG[k];
            // s * c(s) * (1/s)^2 from the intrinsic gradients' 1/s factors.
            sum += (c(s) / s) * dot;
        }
        if (kind != FormKind::intrinsic) sum += s * bF * bG;
    }
    return sum;
}

double form_atom_sum(FormKind kind, const MassCoefficient& c,
                     const CylinderFunctionPlain& F, const CylinderFunctionPlain& G,
                     const WeightedConfiguration& eta) {
    if (eta.empty()) return 0.0;
    const auto eF = F.outer().gradient(F.pairings(eta));
    const auto eG = G.outer().gradient(G.pairings(eta));
    double sum = 0.0;
    for (const auto& atom : eta.atoms()) {
        const double s = atom.mass;
        Point aF{}, aG{};
        double bF = 0.0, bG = 0.0;
        for (std::size_t i = 0; i < F.tests().size(); ++i) {
            const Point gp = F.tests()[i].gradient(atom.position);
            for (int k = 0; k < F.tests()[i].dim(); ++k) aF[k] += eF.d(int(i)) * gp[k];
            bF += eF.d(int(i)) * F.tests()[i].value(atom.position);
        }
        for (std::size_t i = 0; i < G.tests().size(); ++i) {
            const Point gp = G.tests()[i].gradient(atom.position);
            for (int k = 0; k < G.tests()[i].dim(); ++k) aG[k] += eG.d(int(i)) * gp[k];
            bG += eG.d(int(i)) * G.tests()[i].value(atom.position);
        }
        if (kind != FormKind::extrinsic) {
            double dot = 0.0;
            for (int k = 0; k < kMaxDim; ++k) dot += aF[k] * aG[k];
            sum += s * c(s) * dot;
        }
        if (kind != FormKind::intrinsic) sum += s * bF * bG;
    }
    return sum;
}

EstimateReport estimate_form_atoms(FormKind kind, const MassCoefficient& c,
                                   const CylinderFunctionHat& F,
                                   const CylinderFunctionHat& G,
                                   const FormsConfig& cfg, const RandomStream& stream) {
    check_exactness(cfg, F, G);
    const McConfig mc{cfg.n, cfg.shards};
    auto stat = mc_accumulate(mc, stream, [&](RandomStream& rs) {
        return form_atom_sum(kind, c, F, G, sample_gamma_configuration(cfg.window, rs));
    });
    return to_report(stat, cfg, stream);
}

EstimateReport estimate_form_atoms_plain(FormKind kind, const MassCoefficient& c,
                                         const CylinderFunctionPlain& F,
                                         const CylinderFunctionPlain& G,
                                         const FormsConfig& cfg,
                                         const RandomStream& stream) {
    if (kind != FormKind::extrinsic && !c.integrable_exp())
        throw std::invalid_argument(
            "estimate_form_atoms_plain: coefficient with non-integrable c(s)e^{-s} "
            "is rejected on the plain class");
    const McConfig mc{cfg.n, cfg.shards};
    auto stat = mc_accumulate(mc, stream, [&](RandomStream& rs) {
        return form_atom_sum(kind, c, F, G, sample_gamma_configuration(cfg.window, rs));
    });
    return to_report(stat, cfg, stream);
}

EstimateReport estimate_form_mecke(FormKind kind, const MassCoefficient& c,
                                   const CylinderFunctionHat& F,
                                   const CylinderFunctionHat& G,
                                   const FormsConfig& cfg, const RandomStream& stream) {
    check_exactness(cfg, F, G);
    if (cfg.quad_degree < 8)
        throw std::invalid_argument("estimate_form_mecke: quadrature degree >= 8");
    const MeckeIntegrator inner(kind, c, F, G, cfg.quad_degree);
    const McConfig mc{cfg.n, cfg.shards};
    std::uint64_t index = 0;
    auto stat = mc_accumulate(mc, stream, [&, index](RandomStream& rs) mutable {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        return inner(F.pairings(eta), G.pairings(eta), index++);
    });
    return to_report(stat, cfg, stream);
}

EstimateReport estimate_generator_pairing(FormKind kind, const MassCoefficient& c,
                                          const CylinderFunctionHat& F,
                                          const CylinderFunctionHat& G,
                                          const FormsConfig& cfg,
                                          const RandomStream& stream) {
    check_exactness(cfg, F, G);
    const McConfig mc{cfg.n, cfg.shards};
    auto stat = mc_accumulate(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        return -generator(kind, c, F, eta) * G(eta);
    });
    return to_report(stat, cfg, stream);
}

IdentityVerdict compare_form_representations(FormKind kind, const MassCoefficient& c,
                                             const CylinderFunctionHat& F,
                                             const CylinderFunctionHat& G,
                                             const FormsConfig& cfg,
                                             const RandomStream& stream) {
    check_exactness(cfg, F, G);
    if (cfg.quad_degree < 8)
        throw std::invalid_argument("compare_form_representations: degree >= 8");
    const MeckeIntegrator inner(kind, c, F, G, cfg.quad_degree);
    const McConfig mc{cfg.n, cfg.shards};
    std::uint64_t index = 0;
    auto stats = mc_accumulate_paired(mc, stream, [&, index](RandomStream& rs) mutable {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        const double atoms = form_atom_sum(kind, c, F, G, eta);
        const double mecke = inner(F.pairings(eta), G.pairings(eta), index++);
        return std::pair{atoms, mecke};
    });
    const double quad_tol = 1e-6 * std::max(1.0, std::fabs(stats.rhs.mean()));
    auto v = make_verdict_sigma("form-representation-equivalence", "",
                                stats.lhs.mean(), stats.lhs.std_error(),
                                stats.rhs.mean(), stats.rhs.std_error(),
                                stats.diff.std_error(), quad_tol, cfg.n, stream.seed());
    v.kind = to_string(kind);
    v.coefficient = c.label();
    return v;
}

IdentityVerdict compare_form_generator(FormKind kind, const MassCoefficient& c,
                                       const CylinderFunctionHat& F,
                                       const CylinderFunctionHat& G,
                                       const FormsConfig& cfg,
                                       const RandomStream& stream) {
    check_exactness(cfg, F, G);
    const McConfig mc{cfg.n, cfg.shards};
    auto stats = mc_accumulate_paired(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        return std::pair{form_atom_sum(kind, c, F, G, eta),
                         -generator(kind, c, F, eta) * G(eta)};
    });
    auto v = make_verdict_sigma("form-generator-duality", "", stats.lhs.mean(),
                                stats.lhs.std_error(), stats.rhs.mean(),
                                stats.rhs.std_error(), stats.diff.std_error(), 0.0,
                                cfg.n, stream.seed());
    v.kind = to_string(kind);
    v.coefficient = c.label();
    return v;
}

IdentityVerdict compare_generator_symmetry(FormKind kind, const MassCoefficient& c,
                                           const CylinderFunctionHat& F,
                                           const CylinderFunctionHat& G,
                                           const FormsConfig& cfg,
                                           const RandomStream& stream) {
    check_exactness(cfg, F, G);
    const McConfig mc{cfg.n, cfg.shards};
    auto stats = mc_accumulate_paired(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        return std::pair{-generator(kind, c, F, eta) * G(eta),
                         -generator(kind, c, G, eta) * F(eta)};
    });
    auto v = make_verdict_sigma("generator-symmetry", "", stats.lhs.mean(),
                                stats.lhs.std_error(), stats.rhs.mean(),
                                stats.rhs.std_error(), stats.diff.std_error(), 0.0,
                                cfg.n, stream.seed());
    v.kind = to_string(kind);
    v.coefficient = c.label();
    return v;
}

BoundedSpatialFunction BoundedSpatialFunction::indicator(const Box& box, double scale) {
    BoundedSpatialFunction f;
    f.fn = [box, scale](const Point& x) { return box.contains(x) ? scale : 0.0; };
    f.support = box;
    f.sup_bound = std::max(scale, 0.0);
    f.piecewise_constant = true;
    return f;
}

BoundedSpatialFunction BoundedSpatialFunction::from_bump(const SpatialBump& bump) {
    BoundedSpatialFunction f;
    f.fn = [bump](const Point& x) { return bump.value(x); };
    f.support = bump.support();
    // sup of the profile is e^{-1} at the center, times the coefficient.
    f.sup_bound = std::max(0.0, bump.coefficient()) * std::exp(-double(bump.dim()));
    f.piecewise_constant = false;
    return f;
}

IdentityVerdict verify_laplace_transform(const BoundedSpatialFunction& phi,
                                         const FormsConfig& cfg,
                                         const RandomStream& stream) {
    if (!(phi.sup_bound < 1.0))
        throw std::domain_error("verify_laplace_transform: requires sup phi < 1");
    if (!cfg.window.box.contains(phi.support))
        throw std::invalid_argument(
            "verify_laplace_transform: support must lie inside the window");

    // Exact side exp[-int log(1 - phi) dx]; the integrand vanishes off the
    // support box.
    double integral = 0.0, deviation = 0.0;
    if (phi.piecewise_constant) {
        Point mid{};
        for (int i = 0; i < phi.support.dim(); ++i)
            mid[i] = phi.support.axis(i).midpoint();
        integral = phi.support.volume() * std::log1p(-phi.fn(mid));
    } else {
        const auto checked = integrate_spatial_checked(
            phi.support, 16, [&](const Point& x) { return std::log1p(-phi.fn(x)); },
            4);
        integral = checked.value;
        deviation = checked.deviation;
    }
    const double rhs = std::exp(-integral);

    const McConfig mc{cfg.n, cfg.shards};
    auto stat = mc_accumulate(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        double pairing = 0.0;
        for (const auto& a : eta.atoms()) pairing += a.mass * phi.fn(a.position);
        return std::exp(pairing);
    });

    // Mass-floor bias of the truncated sampler folded into the tolerance.
    const double bias = truncation_bias_bound(
        {phi.support, cfg.window.mass_floor},
        phi.sup_bound / (1.0 - phi.sup_bound) * rhs);
    const double tol = std::max(1e-8, deviation) + bias;
    return make_verdict_sigma("laplace-transform", "", stat.mean(), stat.std_error(),
                              rhs, 0.0, stat.std_error(), tol, cfg.n, stream.seed());
}

IdentityVerdict verify_mecke_gamma(const HatTestFunction& phi,
                                   const CylinderFunctionHat& G,
                                   const FormsConfig& cfg, const RandomStream& stream) {
    check_exactness(cfg, G, G);
    if (cfg.window.mass_floor > phi.mark_support().lo ||
        !cfg.window.box.contains(phi.spatial_support()))
        throw std::invalid_argument("verify_mecke_gamma: phi escapes the window");

    // Tabulate the sample-independent factors: e^{-s} phi(x,s) w at the
    // nodes, and the hat-test values that augment G's arguments. The
    // integrand involves bump values only (no derivative peaks), so two
    // panels suffice.
    const TensorRule rule = TensorRule::hat(phi.spatial_support(),
                                            phi.mark_support(), cfg.quad_degree, 2);
    const auto& nodes = rule.hat_nodes();
    const std::size_t ng = G.tests().size();
    std::vector<double> node_weight(nodes.size());
    std::vector<double> valG(nodes.size() * ng);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        node_weight[n] =
            nodes[n].w * std::exp(-nodes[n].s) * phi.value(nodes[n].x, nodes[n].s);
        for (std::size_t j = 0; j < ng; ++j)
            valG[n * ng + j] = G.tests()[j].value(nodes[n].x, nodes[n].s);
    }

    const McConfig mc{cfg.n, cfg.shards};
    auto stats = mc_accumulate_paired(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        const double g_eta = G(eta);
        double lhs = 0.0;
        for (const auto& a : eta.atoms())
            lhs += a.mass * phi.value(a.position, a.mass) * g_eta;
        const auto base = G.pairings(eta);
        std::array<double, OuterFunction::kMaxArity> args{};
        double rhs = 0.0;
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            if (node_weight[n] == 0.0) continue;
            for (std::size_t j = 0; j < ng; ++j) args[j] = base[j] + valG[n * ng + j];
            rhs += node_weight[n] * G.outer().value({args.data(), ng});
        }
        return std::pair{lhs, rhs};
    });
    return make_verdict_sigma("mecke-gamma", "", stats.lhs.mean(),
                              stats.lhs.std_error(), stats.rhs.mean(),
                              stats.rhs.std_error(), stats.diff.std_error(), 1e-8,
                              cfg.n, stream.seed());
}

IdentityVerdict verify_moments(const Box& box, int l, const FormsConfig& cfg,
                               const RandomStream& stream) {
    if (l < 1 || l > 6)
        throw std::invalid_argument("verify_moments: l must be 1..6");
    if (!cfg.window.box.contains(box))
        throw std::invalid_argument("verify_moments: box escapes the window");
    const McConfig mc{cfg.n, cfg.shards};
    auto stat = mc_accumulate(mc, stream, [&](RandomStream& rs) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        double sum = 0.0;
        for (const auto& a : eta.atoms())
            if (box.contains(a.position)) sum += std::pow(a.mass, l);
        return sum;
    });
    const double rhs = box.volume() * std::tgamma(double(l));
    // Truncated lower tail: int_0^eps s^{l-1} e^{-s} ds <= eps^l / l.
    const double bias = box.volume() * std::pow(cfg.window.mass_floor, l) / l;
    std::string detail = "l=" + std::to_string(l);
    return make_verdict_sigma("moments", detail, stat.mean(), stat.std_error(), rhs,
                              0.0, stat.std_error(), bias, cfg.n, stream.seed());
}

IdentityVerdict distribution_check_gamma(const Box& box, const FormsConfig& cfg,
                                         const RandomStream& stream) {
    if (cfg.window.mass_floor > 1e-6)
        throw std::invalid_argument("distribution_check_gamma: needs eps <= 1e-6");
    const double vol = box.volume();
    if (vol < 0.05) {
        IdentityVerdict v;
        v.identity = "gamma-marginal";
        v.detail = "skipped: volume below 0.05 (atom at zero dominates)";
        v.criterion = "skipped";
        v.pass = true;
        v.n = cfg.n;
        v.seed = stream.seed();
        return v;
    }
    // Plain sequential sampling; KS needs the pooled sample anyway.
    RandomStream rs = stream.split(0);
    std::vector<double> samples;
    samples.reserve(cfg.n);
    for (std::uint64_t i = 0; i < cfg.n; ++i) {
        const auto eta = sample_gamma_configuration(cfg.window, rs);
        samples.push_back(local_mass(eta, box));
    }
    const auto ks = ks_test(std::move(samples),
                            [vol](double x) { return gamma_cdf(vol, x); });
    auto v = make_verdict_pvalue("gamma-marginal", "vol=" + std::to_string(vol),
                                 ks.statistic, ks.p_value, cfg.n, stream.seed());
    return v;
}

}  // namespace kgamma
