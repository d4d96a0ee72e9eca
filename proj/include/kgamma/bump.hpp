#pragma once

#include <vector>

#include "kgamma/geometry.hpp"

namespace kgamma {

// Standard mollifier profile exp(-1/(1-t^2)) on |t| < 1, zero outside, with
// t = (x - center)/radius. Smooth on all of R; value and the first two
// derivatives are evaluated from closed forms.
class BumpFunction {
  public:
    BumpFunction() : center_(0.0), radius_(1.0) {}
    BumpFunction(double center, double radius);

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    double center() const { return center_; }
    double radius() const { return radius_; }
    Interval support() const { return {center_ - radius_, center_ + radius_}; }

  private:
    double center_, radius_;
};

// Tensor product of d bumps with an overall coefficient: an element of D(X).
class SpatialBump {
  public:
    SpatialBump() : dim_(1), coefficient_(1.0) {}
    SpatialBump(int dim, const std::array<BumpFunction, kMaxDim>& axes,
                double coefficient = 1.0);

    double value(const Point& x) const;
    Point gradient(const Point& x) const;
    double laplacian(const Point& x) const;

    int dim() const { return dim_; }
    double coefficient() const { return coefficient_; }
    const BumpFunction& axis(int i) const { return axes_[i]; }
    Box support() const;

  private:
    int dim_;
    std::array<BumpFunction, kMaxDim> axes_;
    double coefficient_;
};

// One separable term f(x) h(s) of a hat test function; the mark bump h must
// be supported in (0, inf).
struct HatTerm {
    SpatialBump space;
    BumpFunction mark;
};

// Smooth compactly supported test function on X x (0, inf): a finite sum of
// separable terms. Spatial gradient/Laplacian and the first two mark
// derivatives are all analytic.
class HatTestFunction {
  public:
    HatTestFunction() = default;
    explicit HatTestFunction(std::vector<HatTerm> terms);

    double value(const Point& x, double s) const;
    Point gradient_x(const Point& x, double s) const;
    double laplacian_x(const Point& x, double s) const;
    double d_mark(const Point& x, double s) const;
    double dd_mark(const Point& x, double s) const;

    const std::vector<HatTerm>& terms() const { return terms_; }
    int dim() const { return terms_.empty() ? 1 : terms_.front().space.dim(); }
    Box spatial_support() const;
    Interval mark_support() const;  // hull [a, b], a > 0

  private:
    std::vector<HatTerm> terms_;
};

// Smooth compactly supported vector field v : X -> X, one SpatialBump per
// component.
class VectorField {
  public:
    VectorField() : dim_(1) {}
    VectorField(int dim, const std::array<SpatialBump, kMaxDim>& components);

    Point value(const Point& x) const;
    int dim() const { return dim_; }
    const SpatialBump& component(int i) const { return components_[i]; }

  private:
    int dim_;
    std::array<SpatialBump, kMaxDim> components_;
};

}  // namespace kgamma
