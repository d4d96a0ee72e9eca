#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace kgamma {

// Spatial dimension is configurable 1..3; a Point always carries kMaxDim
// coordinates, entries past the active dimension are zero.
inline constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool contains(const Interval& other) const {
        return other.lo >= lo && other.hi <= hi;
    }
};

// Axis-aligned box, the product of dim() closed intervals.
class Box {
  public:
    Box() : dim_(1), axes_{} {}

    Box(int dim, const std::array<Interval, kMaxDim>& axes)
        : dim_(dim), axes_(axes) {
        if (dim < 1 || dim > kMaxDim)
            throw std::invalid_argument("Box: dimension must be 1..3");
        for (int i = 0; i < dim_; ++i) {
            if (!(axes_[i].hi >= axes_[i].lo) || !std::isfinite(axes_[i].lo) ||
                !std::isfinite(axes_[i].hi))
                throw std::invalid_argument("Box: degenerate axis interval");
        }
    }

    static Box unit(int dim) {
        std::array<Interval, kMaxDim> a{};
        for (int i = 0; i < dim; ++i) a[i] = {0.0, 1.0};
        return Box(dim, a);
    }

    static Box cube(int dim, double lo, double hi) {
        std::array<Interval, kMaxDim> a{};
        for (int i = 0; i < dim; ++i) a[i] = {lo, hi};
        return Box(dim, a);
    }

    int dim() const { return dim_; }
    const Interval& axis(int i) const { return axes_[i]; }

    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim_; ++i) v *= axes_[i].length();
        return v;
    }

    bool contains(const Point& p) const {
        for (int i = 0; i < dim_; ++i)
            if (!axes_[i].contains(p[i])) return false;
        return true;
    }

    bool contains(const Box& other) const {
        if (other.dim_ != dim_) return false;
        for (int i = 0; i < dim_; ++i)
            if (!axes_[i].contains(other.axes_[i])) return false;
        return true;
    }

    // Smallest box containing both; dimensions must agree.
    static Box hull(const Box& a, const Box& b) {
        if (a.dim_ != b.dim_) throw std::invalid_argument("Box::hull: dim mismatch");
        std::array<Interval, kMaxDim> axes{};
        for (int i = 0; i < a.dim_; ++i)
            axes[i] = {std::min(a.axes_[i].lo, b.axes_[i].lo),
                       std::max(a.axes_[i].hi, b.axes_[i].hi)};
        return Box(a.dim_, axes);
    }

  private:
    int dim_;
    std::array<Interval, kMaxDim> axes_;
};

// Overlap of two boxes of equal dimension, or nothing when they are disjoint.
inline std::optional<Box> intersect(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("intersect: dim mismatch");
    std::array<Interval, kMaxDim> axes{};
    for (int i = 0; i < a.dim(); ++i) {
        axes[i] = {std::max(a.axis(i).lo, b.axis(i).lo),
                   std::min(a.axis(i).hi, b.axis(i).hi)};
        if (axes[i].lo >= axes[i].hi) return std::nullopt;
    }
    return Box(a.dim(), axes);
}

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
    const Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    if (r.lo >= r.hi) return std::nullopt;
    return r;
}

// Sampling window: a box together with the mass floor eps > 0 that truncates
// the Levy intensity from below.
struct Window {
    Box box;
    double mass_floor = 1e-6;

    Window() = default;
    Window(Box b, double eps) : box(std::move(b)), mass_floor(eps) {
        if (!(eps > 0.0)) throw std::invalid_argument("Window: mass floor must be > 0");
    }
};

}  // namespace kgamma
