#include "kgamma/outer.hpp"

#include <cmath>
#include <stdexcept>

namespace kgamma {

namespace {

using Node = OuterFunction::Node;
using Kind = Node::Kind;
using Eval = OuterFunction::Eval;
using Gradient = OuterFunction::Gradient;
constexpr int kA = OuterFunction::kMaxArity;

std::shared_ptr<const Node> make_const(double c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->constant = c;
    return n;
}

void eval_node(const Node& node, std::span<const double> t, Eval& out);

void eval_node(const Node& node, std::span<const double> t, int n, Eval& out);

void eval_children_sum(const Node& node, std::span<const double> t, int n, Eval& out) {
    out = Eval{};
    out.n = n;
    Eval tmp;
    for (const auto& ch : node.children) {
        eval_node(*ch, t, n, tmp);
        out.value += tmp.value;
        for (int i = 0; i < n; ++i) out.grad[i] += tmp.grad[i];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out.hess[i * kA + j] += tmp.hess[i * kA + j];
    }
}

// Leibniz fold: combine accumulated (a) with the next factor (b).
void product_combine(Eval& a, const Eval& b, int n) {
    Eval r;
    r.n = n;
    r.value = a.value * b.value;
    for (int i = 0; i < n; ++i)
        r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r.hess[i * kA + j] = a.hess[i * kA + j] * b.value +
                                 a.value * b.hess[i * kA + j] +
                                 a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
    a = r;
}

// Chain rule for scalar outer map phi with phi', phi'' at a.value.
void chain_apply(Eval& a, int n, double phi, double dphi, double ddphi) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a.hess[i * kA + j] =
                dphi * a.hess[i * kA + j] + ddphi * a.grad[i] * a.grad[j];
    for (int i = 0; i < n; ++i) a.grad[i] = dphi * a.grad[i];
    a.value = phi;
}

void eval_node(const Node& node, std::span<const double> t, int n, Eval& out) {
    switch (node.kind) {
        case Kind::constant:
            out = Eval{};
            out.n = n;
            out.value = node.constant;
            return;
        case Kind::coordinate:
            out = Eval{};
            out.n = n;
            out.value = t[node.index];
            out.grad[node.index] = 1.0;
            return;
        case Kind::sum:
            eval_children_sum(node, t, n, out);
            return;
        case Kind::product: {
            out = Eval{};
            out.n = n;
            out.value = 1.0;
            Eval tmp;
            for (const auto& ch : node.children) {
                eval_node(*ch, t, n, tmp);
                product_combine(out, tmp, n);
            }
            return;
        }
        case Kind::power: {
            eval_node(*node.children.front(), t, n, out);
            const int p = node.exponent;
            const double v = out.value;
            const double vp = p >= 1 ? std::pow(v, p - 1) : 0.0;
            const double vpp = p >= 2 ? std::pow(v, p - 2) : 0.0;
            chain_apply(out, n, std::pow(v, p), p * vp, double(p) * (p - 1) * vpp);
            return;
        }
        case Kind::tanh: {
            eval_node(*node.children.front(), t, n, out);
            const double u = std::tanh(out.value);
            const double sech2 = 1.0 - u * u;
            chain_apply(out, n, u, sech2, -2.0 * u * sech2);
            return;
        }
    }
}

// affine: value is c0 + sum b_i t_i. bounded: value and all partials bounded.
struct Shape {
    bool affine = false;
    bool bounded = false;
};

Shape shape_of(const Node& node) {
    switch (node.kind) {
        case Kind::constant:
            return {true, true};
        case Kind::coordinate:
            return {true, false};
        case Kind::sum: {
            Shape s{true, true};
            for (const auto& ch : node.children) {
                const Shape c = shape_of(*ch);
                s.affine = s.affine && c.affine;
                s.bounded = s.bounded && c.bounded;
            }
            return s;
        }
        case Kind::product: {
            // Products of bounded factors stay bounded; a product with a
            // single non-constant factor keeps that factor's shape.
            Shape s{true, true};
            int nonconst = 0;
            for (const auto& ch : node.children) {
                const Shape c = shape_of(*ch);
                if (!(ch->kind == Kind::constant)) ++nonconst;
                s.bounded = s.bounded && c.bounded;
                s.affine = s.affine && c.affine;
            }
            if (nonconst > 1) s.affine = false;
            return s;
        }
        case Kind::power: {
            const Shape c = shape_of(*node.children.front());
            return {node.exponent <= 1 && c.affine, c.bounded};
        }
        case Kind::tanh: {
            const Shape c = shape_of(*node.children.front());
            // tanh of an affine map has all derivatives bounded (sech^2 decay
            // beats the constant slope); tanh of a general polynomial does
            // not (gradients survive along level sets), so stay conservative.
            return {false, c.affine || c.bounded};
        }
    }
    return {};
}

}  // namespace

OuterFunction::OuterFunction(int arity, std::shared_ptr<const Node> root)
    : arity_(arity), root_(std::move(root)) {
    if (arity < 1 || arity > kMaxArity)
        throw std::invalid_argument("OuterFunction: arity must be 1..6");
    compile();
}

void OuterFunction::compile() {
    program_.clear();
    // Postorder walk; add/mul fold their child count from the stack.
    struct Frame {
        const Node* node;
        std::size_t next_child = 0;
    };
    std::vector<Frame> stack{{root_.get()}};
    std::size_t depth = 0, max_depth = 0;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_child < f.node->children.size()) {
            stack.push_back({f.node->children[f.next_child++].get()});
            continue;
        }
        Op op;
        switch (f.node->kind) {
            case Node::Kind::constant:
                op.kind = Op::Kind::constant;
                op.c = f.node->constant;
                ++depth;
                break;
            case Node::Kind::coordinate:
                op.kind = Op::Kind::variable;
                op.i = f.node->index;
                ++depth;
                break;
            case Node::Kind::sum:
                op.kind = Op::Kind::add;
                op.i = int(f.node->children.size());
                depth -= f.node->children.size() - 1;
                break;
            case Node::Kind::product:
                op.kind = Op::Kind::mul;
                op.i = int(f.node->children.size());
                depth -= f.node->children.size() - 1;
                break;
            case Node::Kind::power:
                op.kind = Op::Kind::pow;
                op.i = f.node->exponent;
                break;
            case Node::Kind::tanh:
                op.kind = Op::Kind::tanh;
                break;
        }
        max_depth = std::max(max_depth, depth);
        program_.push_back(op);
        stack.pop_back();
    }
    if (max_depth > 32)
        throw std::invalid_argument("OuterFunction: expression too deep");
}

OuterFunction OuterFunction::from_root(int arity, std::shared_ptr<const Node> root) {
    return OuterFunction(arity, std::move(root));
}

bool OuterFunction::bounded() const { return shape_of(*root_).bounded; }

double OuterFunction::value(std::span<const double> args) const {
    if (int(args.size()) != arity_)
        throw std::invalid_argument("OuterFunction::value: argument count mismatch");
    double stack[32];
    int sp = 0;
    for (const Op& op : program_) {
        switch (op.kind) {
            case Op::Kind::constant:
                stack[sp++] = op.c;
                break;
            case Op::Kind::variable:
                stack[sp++] = args[op.i];
                break;
            case Op::Kind::add: {
                double v = 0.0;
                for (int k = 0; k < op.i; ++k) v += stack[--sp];
                stack[sp++] = v;
                break;
            }
            case Op::Kind::mul: {
                double v = 1.0;
                for (int k = 0; k < op.i; ++k) v *= stack[--sp];
                stack[sp++] = v;
                break;
            }
            case Op::Kind::pow:
                stack[sp - 1] = std::pow(stack[sp - 1], op.i);
                break;
            case Op::Kind::tanh:
                stack[sp - 1] = std::tanh(stack[sp - 1]);
                break;
        }
    }
    return stack[0];
}

Gradient OuterFunction::gradient(std::span<const double> args) const {
    if (int(args.size()) != arity_)
        throw std::invalid_argument("OuterFunction::gradient: argument count mismatch");
    const int n = arity_;
    Gradient stack[32];
    int sp = 0;
    for (const Op& op : program_) {
        switch (op.kind) {
            case Op::Kind::constant: {
                Gradient& g = stack[sp++];
                g = Gradient{};
                g.value = op.c;
                break;
            }
            case Op::Kind::variable: {
                Gradient& g = stack[sp++];
                g = Gradient{};
                g.value = args[op.i];
                g.grad[op.i] = 1.0;
                break;
            }
            case Op::Kind::add: {
                Gradient& acc = stack[sp - op.i];
                for (int k = 1; k < op.i; ++k) {
                    const Gradient& b = stack[sp - op.i + k];
                    acc.value += b.value;
                    for (int i = 0; i < n; ++i) acc.grad[i] += b.grad[i];
                }
                sp -= op.i - 1;
                break;
            }
            case Op::Kind::mul: {
                Gradient& acc = stack[sp - op.i];
                for (int k = 1; k < op.i; ++k) {
                    const Gradient& b = stack[sp - op.i + k];
                    for (int i = 0; i < n; ++i)
                        acc.grad[i] = acc.grad[i] * b.value + acc.value * b.grad[i];
                    acc.value *= b.value;
                }
                sp -= op.i - 1;
                break;
            }
            case Op::Kind::pow: {
                Gradient& g = stack[sp - 1];
                const double dphi = op.i * std::pow(g.value, op.i - 1);
                for (int i = 0; i < n; ++i) g.grad[i] *= dphi;
                g.value = std::pow(g.value, op.i);
                break;
            }
            case Op::Kind::tanh: {
                Gradient& g = stack[sp - 1];
                const double u = std::tanh(g.value);
                const double sech2 = 1.0 - u * u;
                for (int i = 0; i < n; ++i) g.grad[i] *= sech2;
                g.value = u;
                break;
            }
        }
    }
    return stack[0];
}

Eval OuterFunction::eval(std::span<const double> args) const {
    if (int(args.size()) != arity_)
        throw std::invalid_argument("OuterFunction::eval: argument count mismatch");
    Eval out;
    eval_node(*root_, args, arity_, out);
    return out;
}

OuterFunction OuterFunction::constant(int arity, double c) {
    return OuterFunction(arity, make_const(c));
}

OuterFunction OuterFunction::coordinate(int arity, int i) {
    if (i < 0 || i >= arity)
        throw std::invalid_argument("OuterFunction::coordinate: index out of range");
    auto n = std::make_shared<Node>();
    n->kind = Kind::coordinate;
    n->index = i;
    return OuterFunction(arity, n);
}

OuterFunction OuterFunction::linear(std::vector<double> coefs, double c0) {
    const int arity = int(coefs.size());
    auto sum = std::make_shared<Node>();
    sum->kind = Kind::sum;
    sum->children.push_back(make_const(c0));
    for (int i = 0; i < arity; ++i) {
        auto prod = std::make_shared<Node>();
        prod->kind = Kind::product;
        prod->children.push_back(make_const(coefs[i]));
        auto var = std::make_shared<Node>();
        var->kind = Kind::coordinate;
        var->index = i;
        prod->children.push_back(var);
        sum->children.push_back(prod);
    }
    return OuterFunction(arity, sum);
}

OuterFunction OuterFunction::scaled_tanh(int arity, int i, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("scaled_tanh: alpha must be > 0");
    std::vector<double> coefs(arity, 0.0);
    coefs[i] = 1.0 / alpha;
    return tanh_of(linear(std::move(coefs))).scaled(alpha);
}

OuterFunction OuterFunction::tanh_of_linear(std::vector<double> coefs, double c0) {
    return tanh_of(linear(std::move(coefs), c0));
}

OuterFunction OuterFunction::operator+(const OuterFunction& other) const {
    if (arity_ != other.arity_) throw std::invalid_argument("OuterFunction: arity mismatch");
    auto n = std::make_shared<Node>();
    n->kind = Kind::sum;
    n->children = {root_, other.root_};
    return OuterFunction(arity_, n);
}

OuterFunction OuterFunction::operator*(const OuterFunction& other) const {
    if (arity_ != other.arity_) throw std::invalid_argument("OuterFunction: arity mismatch");
    auto n = std::make_shared<Node>();
    n->kind = Kind::product;
    n->children = {root_, other.root_};
    return OuterFunction(arity_, n);
}

OuterFunction OuterFunction::scaled(double factor) const {
    auto n = std::make_shared<Node>();
    n->kind = Kind::product;
    n->children = {make_const(factor), root_};
    return OuterFunction(arity_, n);
}

OuterFunction OuterFunction::shifted(double offset) const {
    auto n = std::make_shared<Node>();
    n->kind = Kind::sum;
    n->children = {make_const(offset), root_};
    return OuterFunction(arity_, n);
}

OuterFunction OuterFunction::pow(int exponent) const {
    if (exponent < 0) throw std::invalid_argument("OuterFunction::pow: exponent >= 0");
    auto n = std::make_shared<Node>();
    n->kind = Kind::power;
    n->exponent = exponent;
    n->children = {root_};
    return OuterFunction(arity_, n);
}

OuterFunction OuterFunction::tanh_of(const OuterFunction& inner) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::tanh;
    n->children = {inner.root_};
    return OuterFunction(inner.arity_, n);
}

OuterFunction OuterFunction::soft_clamp01(const OuterFunction& g) {
    return tanh_of(g.scaled(2.0).shifted(-1.0)).scaled(0.5).shifted(0.5);
}

namespace {

// Affine extraction: gamma + <beta, t>. Returns false on anything else.
bool extract_affine(const Node& node, double& gamma, std::array<double, kA>& beta,
                    double scale) {
    switch (node.kind) {
        case Kind::constant:
            gamma += scale * node.constant;
            return true;
        case Kind::coordinate:
            beta[node.index] += scale;
            return true;
        case Kind::sum:
            for (const auto& ch : node.children)
                if (!extract_affine(*ch, gamma, beta, scale)) return false;
            return true;
        case Kind::product: {
            // admit constant * affine products only
            double c = scale;
            const Node* affine_child = nullptr;
            for (const auto& ch : node.children) {
                if (ch->kind == Kind::constant) {
                    c *= ch->constant;
                } else if (!affine_child) {
                    affine_child = ch.get();
                } else {
                    return false;
                }
            }
            if (!affine_child) {
                gamma += c;
                return true;
            }
            return extract_affine(*affine_child, gamma, beta, c);
        }
        default:
            return false;
    }
}

}  // namespace

std::optional<OuterFunction::TanhAffine> OuterFunction::as_tanh_affine() const {
    TanhAffine out;
    const Node* node = root_.get();
    // Peel affine wrappers alpha * (.) + delta around a possible tanh core.
    for (;;) {
        if (node->kind == Kind::sum) {
            const Node* inner = nullptr;
            double shift = 0.0;
            std::array<double, kA> beta_probe{};
            bool pure_affine = true;
            for (const auto& ch : node->children) {
                if (ch->kind == Kind::constant) {
                    shift += ch->constant;
                } else if (!inner) {
                    inner = ch.get();
                } else {
                    inner = nullptr;
                    pure_affine = false;
                    break;
                }
            }
            (void)beta_probe;
            if (!pure_affine) break;
            out.delta += out.alpha * shift;
            if (!inner) {
                // constant function
                out.has_tanh = false;
                out.gamma = 0.0;
                out.beta = {};
                out.alpha = 0.0;
                return out;
            }
            node = inner;
            continue;
        }
        if (node->kind == Kind::product) {
            double c = 1.0;
            const Node* inner = nullptr;
            bool ok = true;
            for (const auto& ch : node->children) {
                if (ch->kind == Kind::constant) {
                    c *= ch->constant;
                } else if (!inner) {
                    inner = ch.get();
                } else {
                    ok = false;
                    break;
                }
            }
            if (!ok || !inner) break;
            out.alpha *= c;
            node = inner;
            continue;
        }
        break;
    }
    if (node->kind == Kind::tanh) {
        out.has_tanh = true;
        if (!extract_affine(*node->children.front(), out.gamma, out.beta, 1.0))
            return std::nullopt;
        return out;
    }
    // plain affine (covers linear pairings and constants)
    out.has_tanh = false;
    if (!extract_affine(*node, out.gamma, out.beta, 1.0)) return std::nullopt;
    return out;
}

}  // namespace kgamma
