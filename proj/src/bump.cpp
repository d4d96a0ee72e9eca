#include "kgamma/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace kgamma {

namespace {
// Beyond this the profile underflows to an exact 0 in double precision; the
// guard also keeps (1-t^2)^{-k} factors from overflowing first.
constexpr double kInteriorCut = 1.0 - 1e-6;
}  // namespace

BumpFunction::BumpFunction(double center, double radius)
    : center_(center), radius_(radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("BumpFunction: radius must be > 0");
}

double BumpFunction::value(double x) const {
    const double t = (x - center_) / radius_;
    const double t2 = t * t;
    if (t2 >= kInteriorCut) return 0.0;
    return std::exp(-1.0 / (1.0 - t2));
}

double BumpFunction::derivative(double x) const {
    const double t = (x - center_) / radius_;
    const double t2 = t * t;
    if (t2 >= kInteriorCut) return 0.0;
    const double q = 1.0 - t2;
    const double u1 = -2.0 * t / (q * q);  // d/dt of -1/(1-t^2)
    return std::exp(-1.0 / q) * u1 / radius_;
}

double BumpFunction::second_derivative(double x) const {
    const double t = (x - center_) / radius_;
    const double t2 = t * t;
    if (t2 >= kInteriorCut) return 0.0;
    const double q = 1.0 - t2;
    const double u1 = -2.0 * t / (q * q);
    const double u2 = -2.0 / (q * q) - 8.0 * t2 / (q * q * q);
    return std::exp(-1.0 / q) * (u1 * u1 + u2) / (radius_ * radius_);
}

SpatialBump::SpatialBump(int dim, const std::array<BumpFunction, kMaxDim>& axes,
                         double coefficient)
    : dim_(dim), axes_(axes), coefficient_(coefficient) {
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("SpatialBump: dimension must be 1..3");
}

double SpatialBump::value(const Point& x) const {
    double v = coefficient_;
    for (int i = 0; i < dim_; ++i) {
        v *= axes_[i].value(x[i]);
        if (v == 0.0) return 0.0;
    }
    return v;
}

Point SpatialBump::gradient(const Point& x) const {
    std::array<double, kMaxDim> vals{};
    for (int i = 0; i < dim_; ++i) vals[i] = axes_[i].value(x[i]);
    Point g{};
    for (int i = 0; i < dim_; ++i) {
        double gi = coefficient_ * axes_[i].derivative(x[i]);
        for (int j = 0; j < dim_; ++j)
            if (j != i) gi *= vals[j];
        g[i] = gi;
    }
    return g;
}

double SpatialBump::laplacian(const Point& x) const {
    std::array<double, kMaxDim> vals{};
    for (int i = 0; i < dim_; ++i) vals[i] = axes_[i].value(x[i]);
    double sum = 0.0;
    for (int i = 0; i < dim_; ++i) {
        double term = coefficient_ * axes_[i].second_derivative(x[i]);
        for (int j = 0; j < dim_; ++j)
            if (j != i) term *= vals[j];
        sum += term;
    }
    return sum;
}

Box SpatialBump::support() const {
    std::array<Interval, kMaxDim> axes{};
    for (int i = 0; i < dim_; ++i) axes[i] = axes_[i].support();
    return Box(dim_, axes);
}

HatTestFunction::HatTestFunction(std::vector<HatTerm> terms)
    : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("HatTestFunction: needs >= 1 term");
    const int d = terms_.front().space.dim();
    for (const auto& t : terms_) {
        if (t.space.dim() != d)
            throw std::invalid_argument("HatTestFunction: mixed spatial dimensions");
        if (!(t.mark.support().lo > 0.0))
            throw std::invalid_argument(
                "HatTestFunction: mark support must stay inside (0, inf)");
    }
}

double HatTestFunction::value(const Point& x, double s) const {
    double v = 0.0;
    for (const auto& t : terms_) v += t.space.value(x) * t.mark.value(s);
    return v;
}

Point HatTestFunction::gradient_x(const Point& x, double s) const {
    Point g{};
    for (const auto& t : terms_) {
        const double h = t.mark.value(s);
        if (h == 0.0) continue;
        const Point gs = t.space.gradient(x);
        for (int i = 0; i < t.space.dim(); ++i) g[i] += gs[i] * h;
    }
    return g;
}

double HatTestFunction::laplacian_x(const Point& x, double s) const {
    double v = 0.0;
    for (const auto& t : terms_) {
        const double h = t.mark.value(s);
        if (h == 0.0) continue;
        v += t.space.laplacian(x) * h;
    }
    return v;
}

double HatTestFunction::d_mark(const Point& x, double s) const {
    double v = 0.0;
    for (const auto& t : terms_) v += t.space.value(x) * t.mark.derivative(s);
    return v;
}

double HatTestFunction::dd_mark(const Point& x, double s) const {
    double v = 0.0;
    for (const auto& t : terms_) v += t.space.value(x) * t.mark.second_derivative(s);
    return v;
}

Box HatTestFunction::spatial_support() const {
    Box b = terms_.front().space.support();
    for (std::size_t i = 1; i < terms_.size(); ++i)
        b = Box::hull(b, terms_[i].space.support());
    return b;
}

Interval HatTestFunction::mark_support() const {
    Interval m = terms_.front().mark.support();
    for (std::size_t i = 1; i < terms_.size(); ++i) {
        const Interval mi = terms_[i].mark.support();
        m.lo = std::min(m.lo, mi.lo);
        m.hi = std::max(m.hi, mi.hi);
    }
    return m;
}

VectorField::VectorField(int dim, const std::array<SpatialBump, kMaxDim>& components)
    : dim_(dim), components_(components) {
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("VectorField: dimension must be 1..3");
    for (int i = 0; i < dim_; ++i)
        if (components_[i].dim() != dim_)
            throw std::invalid_argument("VectorField: component dimension mismatch");
}

Point VectorField::value(const Point& x) const {
    Point v{};
    for (int i = 0; i < dim_; ++i) v[i] = components_[i].value(x);
    return v;
}

}  // namespace kgamma
