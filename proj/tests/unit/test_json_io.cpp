#include "lyz/battery.hpp"
#include "lyz/error.hpp"
#include "lyz/json_io.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

using namespace lyz;

namespace {

std::string data_file(const std::string& name) { return std::string(LYZ_DATA_DIR) + "/" + name; }

// Same values at a spread of points, including +inf agreement.
void expect_same_function(const ConvexFunction& a, const ConvexFunction& b) {
  ASSERT_EQ(a.dim(), b.dim());
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  for (int t = 0; t < 50; ++t) {
    Vec x(a.dim());
    for (int i = 0; i < a.dim(); ++i) x(i) = 2.0 * N(rng);
    const ExtendedReal u = a(x), v = b(x);
    ASSERT_EQ(u.is_infinite(), v.is_infinite());
    if (u.is_finite()) EXPECT_NEAR(u.value(), v.value(), 1e-12 * (1.0 + std::abs(u.value())));
  }
}

void expect_parse_error(const std::string& text, const std::string& fragment) {
  try {
    function_from_json(parse_json(text, "doc"));
    FAIL() << "no error for " << text;
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(JsonIo, MalformedJsonReportsByteOffset) {
  try {
    parse_json("{\"dim\": 2, \"kind\": }", "input.json");
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("input.json"), std::string::npos);
    EXPECT_NE(msg.find("byte 20"), std::string::npos) << msg;
  }
  EXPECT_THROW(read_json_file(data_file("does_not_exist.json")), ParseError);
}

TEST(JsonIo, SchemaViolations) {
  expect_parse_error(R"({"kind": "quadratic", "A": [[1, 0], [0, 1]]})", "dim");
  expect_parse_error(R"({"dim": 2, "kind": "cubic"})", "cubic");
  expect_parse_error(R"({"dim": 3, "kind": "quadratic", "A": [[1, 0], [0, 1]]})", "dim");
  expect_parse_error(R"({"dim": 2, "kind": "quadratic", "A": [[1, 2], [2, 1]]})", "positive definite");
  expect_parse_error(R"({"dim": 2, "kind": "gauge_power", "p": 0.5, "body": {"kind": "cube", "dim": 2}})", "exponent");
}

TEST(JsonIo, MatrixRoundTrip) {
  Mat m(2, 3);
  m << 1.0, -2.5, 1e-17, 3.0, 0.1, 7.0;
  EXPECT_EQ(matrix_from_json(to_json(m), "m"), m);
  EXPECT_THROW(matrix_from_json(json::parse("[[1, 2], [3]]"), "ragged"), ParseError);
}

TEST(JsonIo, BodyRoundTrips) {
  Mat Q(2, 2);
  Q << 2.0, 0.3, 0.3, 1.0;
  Mat V(4, 2);
  V << 1.0, 0.0, 0.0, 2.0, -1.0, 0.0, 0.0, -0.5;
  for (const ConvexBody& K : {ConvexBody::cube(2, 1.5), ConvexBody::regular_polygon(7, 0.8, 0.2),
                              ConvexBody::ellipsoid(Q), ConvexBody::ball(3, 2.0), ConvexBody::from_vertices(V),
                              ConvexBody::cross_polytope(3, 1.0)}) {
    const ConvexBody back = body_from_json(to_json(K));
    for (int t = 0; t < 20; ++t) {
      Vec u = Vec::Zero(K.dim());
      u(t % K.dim()) = 1.0;
      u(0) += 0.1 * t;
      EXPECT_NEAR(back.gauge(u), K.gauge(u), 1e-13);
      EXPECT_NEAR(back.support(u), K.support(u), 1e-13);
    }
  }
}

TEST(JsonIo, FunctionRoundTrips) {
  Mat A(2, 2), T(2, 2);
  A << 2.0, 0.3, 0.3, 1.0;
  T << 1.0, 0.5, -0.2, 1.5;
  const ConvexFunction q = ConvexFunction::quadratic(A);
  const ConvexFunction g = ConvexFunction::gauge_power(ConvexBody::regular_polygon(5), 3.0);
  std::vector<double> vals;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) vals.push_back(0.1 * (i - 2) * (i - 2) + 0.2 * j * j);
  Vec lo(2), hi(2);
  lo << -1.0, 0.0;
  hi << 1.0, 1.0;
  const ConvexFunction grid = ConvexFunction::grid(SampledGrid(lo, hi, {5, 4}, vals));
  for (const ConvexFunction& phi :
       {q, g, compose(g, T), inf_convolution(q, g), sum(q, g), scalar_right_mult(g, 2.0), scalar_left_mult(q, 0.5),
        ConvexFunction::indicator(ConvexBody::cube(2, 1.0)), ConvexFunction::indicator_origin(2),
        ConvexFunction::zero(2), grid}) {
    const json j = to_json(phi);
    expect_same_function(function_from_json(j), phi);
    // Text round trip too.
    expect_same_function(function_from_json(parse_json(j.dump(), "text")), phi);
  }
}

TEST(JsonIo, GridInfinityIsNull) {
  const json j = parse_json(R"({"dim": 1, "kind": "grid", "lower": [-1], "upper": [1], "shape": [3],
                                "values": [null, 0.0, 1.0]})",
                            "grid");
  const ConvexFunction phi = function_from_json(j);
  EXPECT_TRUE(phi(Vec::Constant(1, -0.9)).is_infinite());
  EXPECT_EQ(phi(Vec::Constant(1, 0.0)), ExtendedReal(0.0));
  EXPECT_TRUE(to_json(phi)["values"][0].is_null());
}

TEST(JsonIo, SpecRoundTrip) {
  IntegrationSpec s = IntegrationSpec::monte_carlo(12345, 77);
  s.truncation_radius = 6.5;
  const IntegrationSpec back = spec_from_json(to_json(s));
  EXPECT_EQ(back.fingerprint(), s.fingerprint());
  EXPECT_THROW(spec_from_json(json::parse(R"({"backend": "simpson"})")), ParseError);
}

TEST(JsonIo, BundledInputsParse) {
  const json g = read_json_file(data_file("gaussian.json"));
  EXPECT_EQ(g.at("schema"), kSchemaVersion);
  const ConvexFunction phi = function_from_json(g.at("function"));
  EXPECT_EQ(phi.kind(), ConvexFunction::Kind::kQuadratic);
  for (const char* name : {"square_gauge.json", "hexagon.json"}) {
    const ConvexFunction h = function_from_json(read_json_file(data_file(name)).at("function"));
    EXPECT_EQ(h.kind(), ConvexFunction::Kind::kGaugePower);
  }
}

TEST(JsonIo, BundledBatteryMatchesDefault) {
  const std::vector<BatteryEntry> def = default_battery();
  const json doc = read_json_file(data_file("battery.json"));
  const std::vector<BatteryEntry> file = battery_from_json(doc);
  ASSERT_EQ(file.size(), def.size());
  ASSERT_EQ(def.size(), 12u);
  for (std::size_t i = 0; i < def.size(); ++i) {
    EXPECT_EQ(file[i].id, def[i].id);
    expect_same_function(file[i].f.potential(), def[i].f.potential());
  }
  EXPECT_EQ(battery_id(file), battery_id(def));
  EXPECT_EQ(doc.at("battery_id").get<std::string>(), battery_id(def));
  EXPECT_EQ(battery_to_json(def), doc);
}
