#pragma once

// vendored single-header nlohmann/json
#include "json.hpp"

#include "kgamma/cylinder.hpp"
#include "kgamma/stats.hpp"

namespace kgamma {

using Json = nlohmann::ordered_json;

// Test-function definitions as JSON (profile type, centers, radii,
// coefficients) so runs are reproducible from config files.
Json to_json(const BumpFunction& b);
Json to_json(const SpatialBump& f);
Json to_json(const HatTestFunction& phi);
Json to_json(const VectorField& v);
Json to_json(const OuterFunction& g);
Json to_json(const MassCoefficient& c);  // named variants only
Json to_json(const CylinderFunctionHat& F);

BumpFunction bump_from_json(const Json& j);
SpatialBump spatial_bump_from_json(const Json& j);
HatTestFunction hat_test_from_json(const Json& j);
VectorField vector_field_from_json(const Json& j);
OuterFunction outer_from_json(const Json& j);
MassCoefficient mass_coefficient_from_json(const Json& j);
CylinderFunctionHat cylinder_hat_from_json(const Json& j);

// Verdict object of the report schema:
// {identity, kind, c, n, lhs, rhs, se, sigma_distance, pass, seed, runtime_ms}
// plus the extra diagnostic fields this toolkit records.
Json to_json(const IdentityVerdict& v);

}  // namespace kgamma
