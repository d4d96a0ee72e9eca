#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kgamma/geometry.hpp"

namespace kgamma {

struct QuadratureRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule by Newton iteration on the Legendre recurrence;
// nodes accurate to machine precision for n <= 64.
QuadratureRule gauss_legendre(int n);

// Flattened tensor rule over a spatial box, optionally times a mark interval.
// Each axis is a composite rule: `panels` equal panels of Gauss-Legendre
// degree `degree` (bump-type integrands are smooth but not analytic, and
// panelling restores fast convergence). Nodes are precomputed so the hot
// integration loop is a plain scan.
class TensorRule {
  public:
    struct SpatialNode {
        Point x;
        double w;
    };
    struct HatNode {
        Point x;
        double s;
        double w;
    };

    static TensorRule spatial(const Box& box, int degree, int panels = 1);
    static TensorRule hat(const Box& box, const Interval& mark, int degree,
                          int panels = 1);

    // Composite rule with panel edges at the given breakpoints (clipped to
    // the domain). Bump profiles are analytic strictly inside their support,
    // so aligning panels with support edges restores exponential convergence.
    // `grade` >= 1 splits every aligned panel geometrically toward both
    // endpoints (where the profiles vanish to all orders), which is what
    // controls the quadrature error of mollifier-type integrands.
    // mark_degree == 0 uses `degree` on the mark axis as well; the mark axis
    // usually carries the sharper weight and deserves the higher degree.
    static TensorRule hat_adapted(const Box& box, const Interval& mark, int degree,
                                  const std::vector<std::vector<double>>& x_breaks,
                                  const std::vector<double>& s_breaks, int grade = 2,
                                  int mark_degree = 0);

    template <class F>
    double integrate_spatial(F&& f) const {
        double sum = 0.0;
        for (const auto& n : spatial_nodes_) sum += n.w * f(n.x);
        return sum;
    }

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (const auto& n : hat_nodes_) sum += n.w * f(n.x, n.s);
        return sum;
    }

    const std::vector<HatNode>& hat_nodes() const { return hat_nodes_; }
    std::vector<HatNode>& mutable_hat_nodes() { return hat_nodes_; }
    std::size_t size() const {
        return spatial_nodes_.empty() ? hat_nodes_.size() : spatial_nodes_.size();
    }

  private:
    std::vector<SpatialNode> spatial_nodes_;
    std::vector<HatNode> hat_nodes_;
};

// Self check: integrate at `degree` and `degree + 4` (same panels); returns
// the finer value and the deviation between the two.
struct CheckedIntegral {
    double value = 0.0;
    double deviation = 0.0;
};

template <class F>
CheckedIntegral integrate_hat_checked(const Box& box, const Interval& mark,
                                      int degree, F&& f, int panels = 1) {
    const TensorRule coarse = TensorRule::hat(box, mark, degree, panels);
    const TensorRule fine = TensorRule::hat(box, mark, degree + 4, panels);
    const double a = coarse.integrate(f);
    const double b = fine.integrate(f);
    return {b, std::fabs(b - a)};
}

template <class F>
CheckedIntegral integrate_spatial_checked(const Box& box, int degree, F&& f,
                                          int panels = 1) {
    const TensorRule coarse = TensorRule::spatial(box, degree, panels);
    const TensorRule fine = TensorRule::spatial(box, degree + 4, panels);
    const double a = coarse.integrate_spatial(f);
    const double b = fine.integrate_spatial(f);
    return {b, std::fabs(b - a)};
}

}  // namespace kgamma
