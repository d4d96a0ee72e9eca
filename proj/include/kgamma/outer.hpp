#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kgamma {

// Outer functions g : R^N -> R of cylinder functions, from a closed
// vocabulary: constants, coordinates, sums, products, integer powers and
// tanh, i.e. polynomials composed with the bounded smoother tanh. Value,
// gradient and Hessian are evaluated from closed forms.
//
// The bounded() predicate is a conservative certificate that g and its
// first two partials are bounded (the C_b^infty class). Plain polynomial
// atoms (coordinate/linear) are deliberately constructible as well: the
// linear-functional reductions and chaos checks need g(t) = t, which lives
// outside C_b^infty but inside the polynomial domain machinery.
class OuterFunction {
  public:
    static constexpr int kMaxArity = 6;

    struct Eval {
        double value = 0.0;
        int n = kMaxArity;  // active arity; loops and storage use it
        std::array<double, kMaxArity> grad{};
        std::array<double, kMaxArity * kMaxArity> hess{};

        double d(int i) const { return grad[i]; }
        double dd(int i, int j) const { return hess[i * kMaxArity + j]; }
    };

    struct Gradient {
        double value = 0.0;
        std::array<double, kMaxArity> grad{};
        double d(int i) const { return grad[i]; }
    };

    OuterFunction() = default;

    int arity() const { return arity_; }
    bool bounded() const;

    double value(std::span<const double> args) const;
    // First partials only; the hot path of the Monte Carlo estimators.
    Gradient gradient(std::span<const double> args) const;
    Eval eval(std::span<const double> args) const;

    // --- vocabulary -------------------------------------------------------
    static OuterFunction constant(int arity, double c);
    static OuterFunction coordinate(int arity, int i);
    // c0 + sum_i coef[i] t_i  (unbounded unless all coefs vanish)
    static OuterFunction linear(std::vector<double> coefs, double c0 = 0.0);
    // alpha * tanh(t_i / alpha): ~ t_i near 0, bounded by alpha.
    static OuterFunction scaled_tanh(int arity, int i, double alpha);
    // tanh(c0 + sum coef[i] t_i)
    static OuterFunction tanh_of_linear(std::vector<double> coefs, double c0 = 0.0);

    OuterFunction operator+(const OuterFunction& other) const;
    OuterFunction operator*(const OuterFunction& other) const;
    OuterFunction scaled(double factor) const;
    OuterFunction shifted(double offset) const;
    OuterFunction pow(int exponent) const;
    static OuterFunction tanh_of(const OuterFunction& inner);

    // Smooth stand-in for the unit contraction min(max(g,0),1):
    // 0.5 + 0.5 tanh(2 g - 1). 1-Lipschitz with range (0,1), so the
    // per-sample energy of the clamped function never exceeds the original.
    static OuterFunction soft_clamp01(const OuterFunction& g);

    // Recognized shape alpha * tanh(gamma + <beta, t>) + delta (or the affine
    // map itself when has_tanh is false). Estimator kernels specialize on it:
    // the partials factor as alpha beta_i sech^2, so sample dependence
    // collapses to a single scalar shift of the tanh argument.
    struct TanhAffine {
        bool has_tanh = false;
        double alpha = 1.0;
        double delta = 0.0;
        double gamma = 0.0;
        std::array<double, kMaxArity> beta{};
    };
    std::optional<TanhAffine> as_tanh_affine() const;

    struct Node;  // exposed for serialization
    std::shared_ptr<const Node> root() const { return root_; }
    static OuterFunction from_root(int arity, std::shared_ptr<const Node> root);

  private:
    OuterFunction(int arity, std::shared_ptr<const Node> root);

    // Postorder program for the stack interpreter behind value()/gradient();
    // the Monte Carlo hot loops run it without recursion.
    struct Op {
        enum class Kind { constant, variable, add, mul, pow, tanh } kind;
        double c = 0.0;
        int i = 0;
    };
    void compile();

    int arity_ = 0;
    std::shared_ptr<const Node> root_;
    std::vector<Op> program_;
};

struct OuterFunction::Node {
    enum class Kind { constant, coordinate, sum, product, power, tanh };

    Kind kind = Kind::constant;
    double constant = 0.0;                                // constant
    int index = 0;                                        // coordinate
    int exponent = 1;                                     // power
    std::vector<std::shared_ptr<const Node>> children;    // sum/product/power/tanh
};

}  // namespace kgamma
