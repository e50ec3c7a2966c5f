#include "lyz/json_io.hpp"

#include "lyz/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lyz {

namespace {

const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object()) throw ParseError(what + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(what + ": missing field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ParseError(what + ": expected an integer");
  return j.get<int>();
}

std::string string_field(const json& j, const char* key, const std::string& what) {
  const json& v = field(j, key, what);
  if (!v.is_string()) throw ParseError(what + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

// Library precondition failures inside a document are reported as parse
// errors of that document.
template <class Fn>
auto guarded(const std::string& what, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << source << ": malformed JSON at byte " << e.byte << ": " << e.what();
    throw ParseError(os.str());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

Mat matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ParseError(what + ": rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ParseError(what + ": ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = number(j[i][k], what);
  }
  return m;
}

Vec vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], what);
  return v;
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ConvexBody body_from_json(const json& j) {
  const std::string what = "body";
  const std::string kind = string_field(j, "kind", what);
  return guarded(what, [&]() -> ConvexBody {
    if (kind == "polytope") {
      if (j.contains("vertices")) return ConvexBody::from_vertices(matrix_from_json(j["vertices"], "body.vertices"));
      return ConvexBody::from_halfspaces(matrix_from_json(field(j, "normals", what), "body.normals"),
                                         vector_from_json(field(j, "supports", what), "body.supports"));
    }
    if (kind == "regular_polygon") {
      const int sides = integer(field(j, "sides", what), "body.sides");
      const double r = j.contains("inradius") ? number(j["inradius"], "body.inradius") : 1.0;
      const double phase = j.contains("phase") ? number(j["phase"], "body.phase") : 0.0;
      return ConvexBody::regular_polygon(sides, r, phase);
    }
    if (kind == "cube" || kind == "cross_polytope" || kind == "ball") {
      const int n = integer(field(j, "dim", what), "body.dim");
      const double r = j.contains("radius") ? number(j["radius"], "body.radius") : 1.0;
      if (kind == "cube") return ConvexBody::cube(n, r);
      if (kind == "cross_polytope") return ConvexBody::cross_polytope(n, r);
      return ConvexBody::ball(n, r);
    }
    if (kind == "ellipsoid") return ConvexBody::ellipsoid(matrix_from_json(field(j, "Q", what), "body.Q"));
    throw ParseError("body: unknown kind '" + kind + "'");
  });
}

json to_json(const ConvexBody& K) {
  json j;
  switch (K.kind()) {
    case ConvexBody::Kind::kPolytope: {
      const PolytopeData& P = K.polytope();
      j["kind"] = "polytope";
      j["normals"] = to_json(P.normals);
      j["supports"] = to_json(P.supports);
      break;
    }
    case ConvexBody::Kind::kEllipsoid:
      j["kind"] = "ellipsoid";
      j["Q"] = to_json(K.ellipsoid_matrix());
      break;
    case ConvexBody::Kind::kBall:
      j["kind"] = "ball";
      j["dim"] = K.dim();
      j["radius"] = K.radial(Vec::Unit(K.dim(), 0));
      break;
  }
  return j;
}

ConvexFunction function_from_json(const json& j) {
  const std::string what = "function";
  const std::string kind = string_field(j, "kind", what);
  const int n = integer(field(j, "dim", what), "function.dim");
  if (n < 1) throw ParseError("function.dim must be positive");
  auto check_dim = [&](const ConvexFunction& f) {
    if (f.dim() != n) throw ParseError("function: declared dim does not match the data");
    return f;
  };
  return guarded(what, [&]() -> ConvexFunction {
    if (kind == "quadratic") return check_dim(ConvexFunction::quadratic(matrix_from_json(field(j, "A", what), "A")));
    if (kind == "gauge_power")
      return check_dim(ConvexFunction::gauge_power(body_from_json(field(j, "body", what)),
                                                   number(field(j, "p", what), "function.p")));
    if (kind == "composed")
      return check_dim(compose(function_from_json(field(j, "base", what)),
                               matrix_from_json(field(j, "T", what), "function.T")));
    if (kind == "grid") {
      const Vec lo = vector_from_json(field(j, "lower", what), "grid.lower");
      const Vec hi = vector_from_json(field(j, "upper", what), "grid.upper");
      const json& sh = field(j, "shape", what);
      if (!sh.is_array()) throw ParseError("grid.shape: expected an array");
      std::vector<int> shape;
      for (const auto& s : sh) shape.push_back(integer(s, "grid.shape"));
      const json& vals = field(j, "values", what);
      if (!vals.is_array()) throw ParseError("grid.values: expected a flat array (null for +inf)");
      std::vector<double> values;
      for (const auto& v : vals)
        values.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : number(v, "grid.values"));
      return check_dim(ConvexFunction::grid(SampledGrid(lo, hi, shape, values)));
    }
    if (kind == "inf_conv")
      return check_dim(inf_convolution(function_from_json(field(j, "left", what)),
                                       function_from_json(field(j, "right", what))));
    if (kind == "sum")
      return check_dim(sum(function_from_json(field(j, "left", what)), function_from_json(field(j, "right", what))));
    if (kind == "scalar_right")
      return check_dim(scalar_right_mult(function_from_json(field(j, "base", what)),
                                         number(field(j, "alpha", what), "function.alpha")));
    if (kind == "scalar_left")
      return check_dim(scalar_left_mult(function_from_json(field(j, "base", what)),
                                        number(field(j, "alpha", what), "function.alpha")));
    if (kind == "indicator") {
      if (j.contains("body")) return check_dim(ConvexFunction::indicator(body_from_json(j["body"])));
      return ConvexFunction::indicator_origin(n);
    }
    if (kind == "zero") return ConvexFunction::zero(n);
    throw ParseError("function: unknown kind '" + kind + "'");
  });
}

json to_json(const ConvexFunction& phi) {
  using Kind = ConvexFunction::Kind;
  json j;
  j["dim"] = phi.dim();
  switch (phi.kind()) {
    case Kind::kQuadratic:
      j["kind"] = "quadratic";
      j["A"] = to_json(phi.quadratic_matrix());
      break;
    case Kind::kGaugePower:
      j["kind"] = "gauge_power";
      j["body"] = to_json(phi.gauge_body());
      j["p"] = phi.gauge_exponent();
      break;
    case Kind::kLinearComposed:
      j["kind"] = "composed";
      j["base"] = to_json(phi.base());
      j["T"] = to_json(phi.transform());
      break;
    case Kind::kSampledGrid: {
      const SampledGrid& g = phi.grid();
      j["kind"] = "grid";
      j["lower"] = to_json(g.lower());
      j["upper"] = to_json(g.upper());
      j["shape"] = g.shape();
      json vals = json::array();
      for (double v : g.values()) vals.push_back(std::isfinite(v) ? json(v) : json(nullptr));
      j["values"] = vals;
      break;
    }
    case Kind::kInfConv:
    case Kind::kSum:
      j["kind"] = phi.kind() == Kind::kInfConv ? "inf_conv" : "sum";
      j["left"] = to_json(phi.left());
      j["right"] = to_json(phi.right());
      break;
    case Kind::kScalarRight:
    case Kind::kScalarLeft:
      j["kind"] = phi.kind() == Kind::kScalarRight ? "scalar_right" : "scalar_left";
      j["base"] = to_json(phi.base());
      j["alpha"] = phi.scalar();
      break;
    case Kind::kIndicator:
      j["kind"] = "indicator";
      if (phi.indicator_body()) j["body"] = to_json(*phi.indicator_body());
      break;
    case Kind::kZero:
      j["kind"] = "zero";
      break;
  }
  return j;
}

IntegrationSpec spec_from_json(const json& j, IntegrationSpec s) {
  if (!j.is_object()) throw ParseError("spec: expected an object");
  if (j.contains("backend")) {
    if (!j["backend"].is_string()) throw ParseError("spec.backend: expected a string");
    s = j["backend"].get<std::string>() == "quadrature" ? IntegrationSpec::quadrature(s.budget)
                                                         : IntegrationSpec::monte_carlo(s.budget, s.seed);
    s.backend = guarded("spec", [&] { return backend_from_name(j["backend"].get<std::string>()); });
  }
  if (j.contains("budget")) {
    if (!j["budget"].is_number_unsigned()) throw ParseError("spec.budget: expected a positive integer");
    s.budget = j["budget"].get<std::uint64_t>();
  }
  if (j.contains("truncation_radius")) s.truncation_radius = number(j["truncation_radius"], "spec.truncation_radius");
  if (j.contains("target_rel_tol")) s.target_rel_tol = number(j["target_rel_tol"], "spec.target_rel_tol");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ParseError("spec.seed: expected a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("parallel")) {
    if (!j["parallel"].is_boolean()) throw ParseError("spec.parallel: expected a boolean");
    s.parallel = j["parallel"].get<bool>();
  }
  if (j.contains("sphere_points")) s.sphere_points = integer(j["sphere_points"], "spec.sphere_points");
  guarded("spec", [&] {
    s.validate();
    return 0;
  });
  return s;
}

json to_json(const IntegrationSpec& s) {
  json j;
  j["backend"] = backend_name(s.backend);
  j["budget"] = s.budget;
  j["truncation_radius"] = s.truncation_radius;
  j["target_rel_tol"] = s.target_rel_tol;
  j["seed"] = s.seed;
  j["parallel"] = s.parallel;
  j["sphere_points"] = s.sphere_points;
  j["fingerprint"] = s.fingerprint();
  return j;
}

}  // namespace lyz
