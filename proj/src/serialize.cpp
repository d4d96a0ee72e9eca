#include "kgamma/serialize.hpp"

#include <cmath>
#include <stdexcept>

namespace kgamma {

Json to_json(const BumpFunction& b) {
    return Json{{"profile", "mollifier"}, {"center", b.center()}, {"radius", b.radius()}};
}

BumpFunction bump_from_json(const Json& j) {
    if (j.at("profile").get<std::string>() != "mollifier")
        throw std::invalid_argument("bump_from_json: unknown profile");
    return BumpFunction(j.at("center").get<double>(), j.at("radius").get<double>());
}

Json to_json(const SpatialBump& f) {
    Json axes = Json::array();
    for (int i = 0; i < f.dim(); ++i) axes.push_back(to_json(f.axis(i)));
    return Json{{"dim", f.dim()}, {"coefficient", f.coefficient()}, {"axes", axes}};
}

SpatialBump spatial_bump_from_json(const Json& j) {
    const int dim = j.at("dim").get<int>();
    std::array<BumpFunction, kMaxDim> axes{};
    const auto& ja = j.at("axes");
    for (int i = 0; i < dim; ++i) axes[i] = bump_from_json(ja.at(i));
    return SpatialBump(dim, axes, j.at("coefficient").get<double>());
}

Json to_json(const HatTestFunction& phi) {
    Json terms = Json::array();
    for (const auto& t : phi.terms())
        terms.push_back(Json{{"space", to_json(t.space)}, {"mark", to_json(t.mark)}});
    return Json{{"terms", terms}};
}

HatTestFunction hat_test_from_json(const Json& j) {
    std::vector<HatTerm> terms;
    for (const auto& jt : j.at("terms"))
        terms.push_back({spatial_bump_from_json(jt.at("space")),
                         bump_from_json(jt.at("mark"))});
    return HatTestFunction(std::move(terms));
}

Json to_json(const VectorField& v) {
    Json comps = Json::array();
    for (int i = 0; i < v.dim(); ++i) comps.push_back(to_json(v.component(i)));
    return Json{{"dim", v.dim()}, {"components", comps}};
}

VectorField vector_field_from_json(const Json& j) {
    const int dim = j.at("dim").get<int>();
    std::array<SpatialBump, kMaxDim> comps{};
    for (int i = 0; i < dim; ++i)
        comps[i] = spatial_bump_from_json(j.at("components").at(i));
    return VectorField(dim, comps);
}

namespace {

using Node = OuterFunction::Node;

Json node_to_json(const Node& n) {
    switch (n.kind) {
        case Node::Kind::constant:
            return Json{{"op", "const"}, {"value", n.constant}};
        case Node::Kind::coordinate:
            return Json{{"op", "coord"}, {"index", n.index}};
        case Node::Kind::sum:
        case Node::Kind::product: {
            Json args = Json::array();
            for (const auto& ch : n.children) args.push_back(node_to_json(*ch));
            return Json{{"op", n.kind == Node::Kind::sum ? "sum" : "prod"},
                        {"args", args}};
        }
        case Node::Kind::power:
            return Json{{"op", "pow"},
                        {"exponent", n.exponent},
                        {"arg", node_to_json(*n.children.front())}};
        case Node::Kind::tanh:
            return Json{{"op", "tanh"}, {"arg", node_to_json(*n.children.front())}};
    }
    throw std::logic_error("node_to_json: unreachable");
}

std::shared_ptr<const Node> node_from_json(const Json& j) {
    const auto op = j.at("op").get<std::string>();
    auto n = std::make_shared<Node>();
    if (op == "const") {
        n->kind = Node::Kind::constant;
        n->constant = j.at("value").get<double>();
    } else if (op == "coord") {
        n->kind = Node::Kind::coordinate;
        n->index = j.at("index").get<int>();
    } else if (op == "sum" || op == "prod") {
        n->kind = op == "sum" ? Node::Kind::sum : Node::Kind::product;
        for (const auto& ja : j.at("args")) n->children.push_back(node_from_json(ja));
    } else if (op == "pow") {
        n->kind = Node::Kind::power;
        n->exponent = j.at("exponent").get<int>();
        n->children.push_back(node_from_json(j.at("arg")));
    } else if (op == "tanh") {
        n->kind = Node::Kind::tanh;
        n->children.push_back(node_from_json(j.at("arg")));
    } else {
        throw std::invalid_argument("outer_from_json: unknown op " + op);
    }
    return n;
}

}  // namespace

Json to_json(const OuterFunction& g) {
    return Json{{"arity", g.arity()}, {"expr", node_to_json(*g.root())}};
}

OuterFunction outer_from_json(const Json& j) {
    return OuterFunction::from_root(j.at("arity").get<int>(),
                                    node_from_json(j.at("expr")));
}

Json to_json(const MassCoefficient& c) {
    switch (c.kind()) {
        case MassCoefficient::Kind::one: return Json{{"kind", "one"}};
        case MassCoefficient::Kind::linear: return Json{{"kind", "s"}};
        case MassCoefficient::Kind::quadratic: return Json{{"kind", "s2"}};
        case MassCoefficient::Kind::cubic:
            return Json{{"kind", "cubic"},
                        {"a", {c.cubic_a1(), c.cubic_a2(), c.cubic_a3()}}};
        case MassCoefficient::Kind::custom:
            throw std::invalid_argument("to_json: custom coefficients not serializable");
    }
    throw std::logic_error("to_json(MassCoefficient): unreachable");
}

MassCoefficient mass_coefficient_from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "one") return MassCoefficient::one();
    if (kind == "s") return MassCoefficient::linear();
    if (kind == "s2") return MassCoefficient::quadratic();
    if (kind == "cubic") {
        const auto& a = j.at("a");
        return MassCoefficient::cubic(a.at(0).get<double>(), a.at(1).get<double>(),
                                      a.at(2).get<double>());
    }
    throw std::invalid_argument("mass_coefficient_from_json: unknown kind " + kind);
}

Json to_json(const CylinderFunctionHat& F) {
    Json tests = Json::array();
    for (const auto& t : F.tests()) tests.push_back(to_json(t));
    return Json{{"outer", to_json(F.outer())}, {"tests", tests}};
}

CylinderFunctionHat cylinder_hat_from_json(const Json& j) {
    std::vector<HatTestFunction> tests;
    for (const auto& jt : j.at("tests")) tests.push_back(hat_test_from_json(jt));
    return CylinderFunctionHat(outer_from_json(j.at("outer")), std::move(tests));
}

Json to_json(const IdentityVerdict& v) {
    Json j;
    j["identity"] = v.identity;
    j["kind"] = v.kind;
    j["c"] = v.coefficient;
    j["n"] = v.n;
    j["lhs"] = v.lhs;
    j["rhs"] = v.rhs;
    j["se"] = v.combined_se;
    j["sigma_distance"] = std::isfinite(v.sigma_distance) ? v.sigma_distance : -1.0;
    j["pass"] = v.pass;
    j["seed"] = v.seed;
    j["runtime_ms"] = v.runtime_ms;
    j["criterion"] = v.criterion;
    j["detail"] = v.detail;
    j["lhs_se"] = v.lhs_se;
    j["rhs_se"] = v.rhs_se;
    j["tolerance"] = v.tolerance;
    j["discrepancy"] = v.discrepancy;
    if (!std::isnan(v.p_value)) j["p_value"] = v.p_value;
    return j;
}

}  // namespace kgamma
