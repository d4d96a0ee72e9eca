#include "kgamma/cylinder.hpp"

#include <cmath>
#include <stdexcept>

namespace kgamma {

const char* to_string(FormKind kind) {
    switch (kind) {
        case FormKind::intrinsic: return "int";
        case FormKind::extrinsic: return "ext";
        case FormKind::full: return "full";
    }
    return "?";
}

double pairing_hat(const HatTestFunction& phi, const WeightedConfiguration& eta) {
    double sum = 0.0;
    for (const auto& a : eta.atoms()) sum += phi.value(a.position, a.mass);
    return sum;
}

double pairing_plain(const SpatialBump& f, const WeightedConfiguration& eta) {
    double sum = 0.0;
    for (const auto& a : eta.atoms()) sum += a.mass * f.value(a.position);
    return sum;
}

CylinderFunctionHat::CylinderFunctionHat(OuterFunction outer,
                                         std::vector<HatTestFunction> tests)
    : outer_(std::move(outer)), tests_(std::move(tests)) {
    if (outer_.arity() != int(tests_.size()))
        throw std::invalid_argument("CylinderFunctionHat: arity/test count mismatch");
}

std::vector<double> CylinderFunctionHat::pairings(
    const WeightedConfiguration& eta) const {
    std::vector<double> p(tests_.size(), 0.0);
    for (const auto& a : eta.atoms())
        for (std::size_t i = 0; i < tests_.size(); ++i)
            p[i] += tests_[i].value(a.position, a.mass);
    return p;
}

double CylinderFunctionHat::operator()(const WeightedConfiguration& eta) const {
    return outer_.value(pairings(eta));
}

void CylinderFunctionHat::check_atom(const WeightedConfiguration& eta,
                                     std::size_t idx) const {
    if (idx >= eta.size())
        throw std::out_of_range("CylinderFunctionHat: atom index out of range");
}

Point CylinderFunctionHat::intrinsic_gradient(const WeightedConfiguration& eta,
                                              std::size_t idx) const {
    check_atom(eta, idx);
    const auto e = outer_.eval(pairings(eta));
    const Atom& a = eta.atoms()[idx];
    Point g{};
    for (std::size_t i = 0; i < tests_.size(); ++i) {
        const Point gp = tests_[i].gradient_x(a.position, a.mass);
        for (int k = 0; k < dim(); ++k) g[k] += e.d(int(i)) * gp[k] / a.mass;
    }
    return g;
}

double CylinderFunctionHat::extrinsic_gradient(const WeightedConfiguration& eta,
                                               std::size_t idx) const {
    check_atom(eta, idx);
    const auto e = outer_.eval(pairings(eta));
    const Atom& a = eta.atoms()[idx];
    double g = 0.0;
    for (std::size_t i = 0; i < tests_.size(); ++i)
        g += e.d(int(i)) * tests_[i].d_mark(a.position, a.mass);
    return g;
}

double CylinderFunctionHat::delta_space(const WeightedConfiguration& eta,
                                        std::size_t idx) const {
    check_atom(eta, idx);
    const auto e = outer_.eval(pairings(eta));
    const Atom& a = eta.atoms()[idx];
    const std::size_t n = tests_.size();
    std::vector<Point> grads(n);
    for (std::size_t i = 0; i < n; ++i)
        grads[i] = tests_[i].gradient_x(a.position, a.mass);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int k = 0; k < dim(); ++k) dot += grads[i][k] * grads[j][k];
            sum += e.dd(int(i), int(j)) * dot;
        }
    for (std::size_t i = 0; i < n; ++i)
        sum += e.d(int(i)) * tests_[i].laplacian_x(a.position, a.mass);
    return sum;
}

double CylinderFunctionHat::delta_mark(const WeightedConfiguration& eta,
                                       std::size_t idx) const {
    check_atom(eta, idx);
    const auto e = outer_.eval(pairings(eta));
    const Atom& a = eta.atoms()[idx];
    const std::size_t n = tests_.size();
    std::vector<double> ds(n);
    for (std::size_t i = 0; i < n; ++i) ds[i] = tests_[i].d_mark(a.position, a.mass);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sum += e.dd(int(i), int(j)) * ds[i] * ds[j];
    for (std::size_t i = 0; i < n; ++i)
        sum += e.d(int(i)) * (tests_[i].dd_mark(a.position, a.mass) - ds[i]);
    return sum;
}

std::vector<double> CylinderFunctionHat::augmented_args(
    const std::vector<double>& base, const Point& x, double s) const {
    std::vector<double> args(base);
    for (std::size_t i = 0; i < tests_.size(); ++i) args[i] += tests_[i].value(x, s);
    return args;
}

double CylinderFunctionHat::value_added(const std::vector<double>& base,
                                        const Point& x, double s) const {
    return outer_.value(augmented_args(base, x, s));
}

Point CylinderFunctionHat::grad_x_added(const std::vector<double>& base,
                                        const Point& x, double s) const {
    const auto e = outer_.eval(augmented_args(base, x, s));
    Point g{};
    for (std::size_t i = 0; i < tests_.size(); ++i) {
        const Point gp = tests_[i].gradient_x(x, s);
        for (int k = 0; k < dim(); ++k) g[k] += e.d(int(i)) * gp[k];
    }
    return g;
}

double CylinderFunctionHat::d_mark_added(const std::vector<double>& base,
                                         const Point& x, double s) const {
    const auto e = outer_.eval(augmented_args(base, x, s));
    double v = 0.0;
    for (std::size_t i = 0; i < tests_.size(); ++i)
        v += e.d(int(i)) * tests_[i].d_mark(x, s);
    return v;
}

Box CylinderFunctionHat::spatial_support() const {
    Box b = tests_.front().spatial_support();
    for (std::size_t i = 1; i < tests_.size(); ++i)
        b = Box::hull(b, tests_[i].spatial_support());
    return b;
}

Interval CylinderFunctionHat::mark_support() const {
    Interval m = tests_.front().mark_support();
    for (std::size_t i = 1; i < tests_.size(); ++i) {
        const Interval mi = tests_[i].mark_support();
        m.lo = std::min(m.lo, mi.lo);
        m.hi = std::max(m.hi, mi.hi);
    }
    return m;
}

CylinderFunctionPlain::CylinderFunctionPlain(OuterFunction outer,
                                             std::vector<SpatialBump> tests)
    : outer_(std::move(outer)), tests_(std::move(tests)) {
    if (outer_.arity() != int(tests_.size()))
        throw std::invalid_argument("CylinderFunctionPlain: arity/test count mismatch");
}

std::vector<double> CylinderFunctionPlain::pairings(
    const WeightedConfiguration& eta) const {
    std::vector<double> p(tests_.size(), 0.0);
    for (const auto& a : eta.atoms())
        for (std::size_t i = 0; i < tests_.size(); ++i)
            p[i] += a.mass * tests_[i].value(a.position);
    return p;
}

double CylinderFunctionPlain::operator()(const WeightedConfiguration& eta) const {
    return outer_.value(pairings(eta));
}

Point CylinderFunctionPlain::intrinsic_gradient(const WeightedConfiguration& eta,
                                                std::size_t idx) const {
    if (idx >= eta.size())
        throw std::out_of_range("CylinderFunctionPlain: atom index out of range");
    const auto e = outer_.eval(pairings(eta));
    const Atom& a = eta.atoms()[idx];
    Point g{};
    for (std::size_t i = 0; i < tests_.size(); ++i) {
        const Point gp = tests_[i].gradient(a.position);
        for (int k = 0; k < tests_[i].dim(); ++k) g[k] += e.d(int(i)) * gp[k];
    }
    return g;
}

double CylinderFunctionPlain::extrinsic_gradient(const WeightedConfiguration& eta,
                                                 std::size_t idx) const {
    if (idx >= eta.size())
        throw std::out_of_range("CylinderFunctionPlain: atom index out of range");
    const auto e = outer_.eval(pairings(eta));
    const Atom& a = eta.atoms()[idx];
    double g = 0.0;
    for (std::size_t i = 0; i < tests_.size(); ++i)
        g += e.d(int(i)) * tests_[i].value(a.position);
    return g;
}

double generator(FormKind kind, const MassCoefficient& c,
                 const CylinderFunctionHat& F, const WeightedConfiguration& eta) {
    if (eta.empty()) return 0.0;
    // The outer partials depend on the pairings only, so evaluate them once
    // and reuse across atoms (the per-index delta_* entry points recompute
    // them; this is the hot path of the Monte Carlo estimators).
    const auto e = F.outer().eval(F.pairings(eta));
    const std::size_t n = F.tests().size();
    const int d = F.dim();
    std::vector<Point> grads(n);
    std::vector<double> dmark(n);
    double sum = 0.0;
    for (const Atom& a : eta.atoms()) {
        const double s = a.mass;
        if (kind != FormKind::extrinsic) {
            double delta_space = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                grads[i] = F.tests()[i].gradient_x(a.position, s);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double dot = 0.0;
                    for (int k = 0; k < d; ++k) dot += grads[i][k] * grads[j][k];
                    delta_space += e.dd(int(i), int(j)) * dot;
                }
            for (std::size_t i = 0; i < n; ++i)
                delta_space += e.d(int(i)) * F.tests()[i].laplacian_x(a.position, s);
            sum += s * (c(s) / (s * s)) * delta_space;
        }
        if (kind != FormKind::intrinsic) {
            double delta_m = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                dmark[i] = F.tests()[i].d_mark(a.position, s);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    delta_m += e.dd(int(i), int(j)) * dmark[i] * dmark[j];
            for (std::size_t i = 0; i < n; ++i)
                delta_m += e.d(int(i)) *
                           (F.tests()[i].dd_mark(a.position, s) - dmark[i]);
            sum += s * delta_m;
        }
    }
    return sum;
}

WeightedConfiguration flow_pushforward(const VectorField& v, double t,
                                       const WeightedConfiguration& eta) {
    constexpr int kSubsteps = 64;
    WeightedConfiguration out = eta;
    const double h = t / kSubsteps;
    for (auto& a : out.atoms()) {
        Point x = a.position;
        for (int step = 0; step < kSubsteps; ++step) {
            const Point k1 = v.value(x);
            Point x2{}, x3{}, x4{};
            for (int i = 0; i < v.dim(); ++i) x2[i] = x[i] + 0.5 * h * k1[i];
            const Point k2 = v.value(x2);
            for (int i = 0; i < v.dim(); ++i) x3[i] = x[i] + 0.5 * h * k2[i];
            const Point k3 = v.value(x3);
            for (int i = 0; i < v.dim(); ++i) x4[i] = x[i] + h * k3[i];
            const Point k4 = v.value(x4);
            for (int i = 0; i < v.dim(); ++i)
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        a.position = x;
    }
    return out;
}

WeightedConfiguration mass_scaling(const SpatialBump& h, double t,
                                   const WeightedConfiguration& eta) {
    WeightedConfiguration out = eta;
    for (auto& a : out.atoms()) a.mass *= std::exp(t * h.value(a.position));
    return out;
}

double tangent_pairing_intrinsic(const CylinderFunctionHat& F, const VectorField& v,
                                 const WeightedConfiguration& eta) {
    double sum = 0.0;
    for (std::size_t idx = 0; idx < eta.size(); ++idx) {
        const Atom& a = eta.atoms()[idx];
        const Point g = F.intrinsic_gradient(eta, idx);
        const Point w = v.value(a.position);
        double dot = 0.0;
        for (int k = 0; k < v.dim(); ++k) dot += g[k] * w[k];
        sum += a.mass * dot;
    }
    return sum;
}

double tangent_pairing_intrinsic(const CylinderFunctionPlain& F, const VectorField& v,
                                 const WeightedConfiguration& eta) {
    double sum = 0.0;
    for (std::size_t idx = 0; idx < eta.size(); ++idx) {
        const Atom& a = eta.atoms()[idx];
        const Point g = F.intrinsic_gradient(eta, idx);
        const Point w = v.value(a.position);
        double dot = 0.0;
        for (int k = 0; k < v.dim(); ++k) dot += g[k] * w[k];
        sum += a.mass * dot;
    }
    return sum;
}

double tangent_pairing_extrinsic(const CylinderFunctionHat& F, const SpatialBump& h,
                                 const WeightedConfiguration& eta) {
    double sum = 0.0;
    for (std::size_t idx = 0; idx < eta.size(); ++idx) {
        const Atom& a = eta.atoms()[idx];
        sum += a.mass * F.extrinsic_gradient(eta, idx) * h.value(a.position);
    }
    return sum;
}

double tangent_pairing_extrinsic(const CylinderFunctionPlain& F, const SpatialBump& h,
                                 const WeightedConfiguration& eta) {
    double sum = 0.0;
    for (std::size_t idx = 0; idx < eta.size(); ++idx) {
        const Atom& a = eta.atoms()[idx];
        sum += a.mass * F.extrinsic_gradient(eta, idx) * h.value(a.position);
    }
    return sum;
}

}  // namespace kgamma
