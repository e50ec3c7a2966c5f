#pragma once

#include "lyz/body.hpp"
#include "lyz/convex_function.hpp"
#include "lyz/integration.hpp"

#include "json.hpp"

#include <string>

namespace lyz {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

// Parses text; ParseError messages carry the source name and byte offset.
json parse_json(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

Mat matrix_from_json(const json& j, const std::string& what);
Vec vector_from_json(const json& j, const std::string& what);
json to_json(const Mat& m);
json to_json(const Vec& v);

// {"kind": "polytope", "normals": [[..]], "supports": [..]}
// {"kind": "polytope", "vertices": [[..]]}
// {"kind": "regular_polygon", "sides": k, "inradius": r, "phase": t}
// {"kind": "cube" | "cross_polytope", "dim": n, "radius": r}
// {"kind": "ellipsoid", "Q": [[..]]}
// {"kind": "ball", "dim": n, "radius": r}
ConvexBody body_from_json(const json& j);
json to_json(const ConvexBody& K);

// {"dim": n, "kind": ..., ...}; kinds listed in docs/schema.md.
ConvexFunction function_from_json(const json& j);
json to_json(const ConvexFunction& phi);

IntegrationSpec spec_from_json(const json& j, IntegrationSpec base = {});
json to_json(const IntegrationSpec& spec);

}  // namespace lyz
