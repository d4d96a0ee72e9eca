#include "kgamma/quadrature.hpp"

namespace kgamma {

QuadratureRule gauss_legendre(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: n must be 1..64");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

namespace {

struct Axis {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Axis scaled_axis(const QuadratureRule& base, const Interval& iv, int panels) {
    if (panels < 1) throw std::invalid_argument("TensorRule: panels must be >= 1");
    Axis a;
    a.nodes.reserve(base.nodes.size() * panels);
    a.weights.reserve(base.nodes.size() * panels);
    const double step = iv.length() / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = iv.lo + p * step;
        const double mid = lo + 0.5 * step;
        const double half = 0.5 * step;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            a.nodes.push_back(mid + half * base.nodes[i]);
            a.weights.push_back(half * base.weights[i]);
        }
    }
    return a;
}

}  // namespace

TensorRule TensorRule::spatial(const Box& box, int degree, int panels) {
    const QuadratureRule base = gauss_legendre(degree);
    std::vector<Axis> axes;
    for (int i = 0; i < box.dim(); ++i)
        axes.push_back(scaled_axis(base, box.axis(i), panels));

    TensorRule rule;
    std::vector<std::size_t> idx(box.dim(), 0);
    for (;;) {
        SpatialNode node;
        node.x = Point{};
        node.w = 1.0;
        for (int i = 0; i < box.dim(); ++i) {
            node.x[i] = axes[i].nodes[idx[i]];
            node.w *= axes[i].weights[idx[i]];
        }
        rule.spatial_nodes_.push_back(node);
        int k = 0;
        while (k < box.dim() && ++idx[k] == axes[k].nodes.size()) idx[k++] = 0;
        if (k == box.dim()) break;
    }
    return rule;
}

namespace {

// Axis rule with panel edges at sorted unique breakpoints inside [iv.lo, iv.hi],
// each aligned panel graded geometrically toward its endpoints.
Axis adapted_axis(const QuadratureRule& base, const Interval& iv,
                  std::vector<double> breaks, int grade) {
    std::vector<double> edges{iv.lo, iv.hi};
    for (double b : breaks)
        if (b > iv.lo + 1e-12 && b < iv.hi - 1e-12) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return b - a < 1e-10; }),
                edges.end());

    std::vector<double> refined;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p], hi = edges[p + 1];
        refined.push_back(lo);
        // geometric grading: half-lengths lo + L/2^g, ..., symmetric from hi
        for (int g = grade; g >= 1; --g) refined.push_back(lo + (hi - lo) / (2 << g));
        for (int g = 1; g <= grade; ++g) refined.push_back(hi - (hi - lo) / (2 << g));
    }
    refined.push_back(edges.back());
    std::sort(refined.begin(), refined.end());
    refined.erase(std::unique(refined.begin(), refined.end(),
                              [](double a, double b) { return b - a < 1e-12; }),
                  refined.end());

    Axis a;
    for (std::size_t p = 0; p + 1 < refined.size(); ++p) {
        const double mid = 0.5 * (refined[p] + refined[p + 1]);
        const double half = 0.5 * (refined[p + 1] - refined[p]);
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            a.nodes.push_back(mid + half * base.nodes[i]);
            a.weights.push_back(half * base.weights[i]);
        }
    }
    return a;
}

TensorRule from_axes(const std::vector<Axis>& x_axes, const Axis& mark_axis);

}  // namespace

TensorRule TensorRule::hat_adapted(const Box& box, const Interval& mark, int degree,
                                   const std::vector<std::vector<double>>& x_breaks,
                                   const std::vector<double>& s_breaks, int grade,
                                   int mark_degree) {
    const QuadratureRule base = gauss_legendre(degree);
    const QuadratureRule mark_base =
        mark_degree > 0 ? gauss_legendre(mark_degree) : base;
    std::vector<Axis> axes;
    for (int i = 0; i < box.dim(); ++i)
        axes.push_back(adapted_axis(
            base, box.axis(i),
            i < int(x_breaks.size()) ? x_breaks[i] : std::vector<double>{}, grade));
    return from_axes(axes, adapted_axis(mark_base, mark, s_breaks, grade));
}

namespace {

TensorRule from_axes(const std::vector<Axis>& x_axes, const Axis& mark_axis) {
    // Tensor product over the spatial axes, then the mark axis.
    std::vector<TensorRule::SpatialNode> spatial{{Point{}, 1.0}};
    for (std::size_t ax = 0; ax < x_axes.size(); ++ax) {
        std::vector<TensorRule::SpatialNode> next;
        next.reserve(spatial.size() * x_axes[ax].nodes.size());
        for (const auto& sn : spatial)
            for (std::size_t i = 0; i < x_axes[ax].nodes.size(); ++i) {
                TensorRule::SpatialNode node = sn;
                node.x[ax] = x_axes[ax].nodes[i];
                node.w *= x_axes[ax].weights[i];
                next.push_back(node);
            }
        spatial = std::move(next);
    }
    TensorRule rule;
    auto& sink = rule.mutable_hat_nodes();
    sink.reserve(spatial.size() * mark_axis.nodes.size());
    for (const auto& sn : spatial)
        for (std::size_t j = 0; j < mark_axis.nodes.size(); ++j)
            sink.push_back({sn.x, mark_axis.nodes[j], sn.w * mark_axis.weights[j]});
    return rule;
}

}  // namespace

TensorRule TensorRule::hat(const Box& box, const Interval& mark, int degree,
                           int panels) {
    const TensorRule space = TensorRule::spatial(box, degree, panels);
    const Axis mark_axis = scaled_axis(gauss_legendre(degree), mark, panels);

    TensorRule rule;
    rule.hat_nodes_.reserve(space.spatial_nodes_.size() * mark_axis.nodes.size());
    for (const auto& sn : space.spatial_nodes_)
        for (std::size_t j = 0; j < mark_axis.nodes.size(); ++j)
            rule.hat_nodes_.push_back({sn.x, mark_axis.nodes[j],
                                       sn.w * mark_axis.weights[j]});
    return rule;
}

}  // namespace kgamma
