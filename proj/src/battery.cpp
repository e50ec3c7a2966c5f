#include "lyz/battery.hpp"

#include "lyz/constants.hpp"
#include "lyz/error.hpp"
#include "lyz/legendre.hpp"
#include "lyz/lyz_functional.hpp"
#include "lyz/petty.hpp"
#include "lyz/slog.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace lyz {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

IntegrationSpec quad_spec(const VerifyOptions& o) {
  IntegrationSpec s = IntegrationSpec::quadrature(o.quad_budget);
  s.truncation_radius = o.radius;
  return s;
}

IntegrationSpec mc_spec(const VerifyOptions& o, std::uint64_t salt) {
  IntegrationSpec s = IntegrationSpec::monte_carlo(o.mc_budget, mix(o.seed, salt));
  s.truncation_radius = o.radius;
  return s;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

LogConcaveFunction gauge_fn(const ConvexBody& K, double p) {
  return LogConcaveFunction(ConvexFunction::gauge_power(K, p));
}

LogConcaveFunction gaussian2() { return GaussianFunction::standard(2).function(); }

ConvexBody hexagon() { return ConvexBody::regular_polygon(6, 1.0, 0.0); }

// Square, a random ellipse and the hexagon.
std::vector<std::pair<std::string, ConvexBody>> test_bodies(std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, 300));
  return {{"square", ConvexBody::cube(2, 1.0)},
          {"ellipse", ConvexBody::ellipsoid(random_spd(2, 0.3, 3.0, rng))},
          {"hexagon", hexagon()}};
}

double body_volume(const ConvexBody& K) {
  if (K.is_polytope()) return K.volume_from_vertices();
  const Mat Q = K.ellipsoid_matrix();
  return constants::omega(K.dim()) / std::sqrt(Q.determinant());
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

CheckResult gaussian_fixed_point(const VerifyOptions& o) {
  CheckResult r;
  auto t0 = Clock::now();
  const FunctionalEllipsoid q = lyz_matrix(gaussian2(), quad_spec(o));
  const double eq = rel_frobenius(q.A.A, 0.5 * Mat::Identity(2, 2));
  r.timings.push_back({"quadrature n=2", since(t0), 5.0});
  r.data["quadrature_n2"] = {{"A", to_json(q.A.A)}, {"rel_error", eq}};
  bool ok = eq <= 1e-6;
  std::string summary = "quad n=2 err " + fmt("%.2e", eq);
  for (int n : {2, 3}) {
    t0 = Clock::now();
    const FunctionalEllipsoid m = lyz_matrix(GaussianFunction::standard(n).function(), mc_spec(o, 100 + n));
    const double em = rel_frobenius(m.A.A, 0.5 * Mat::Identity(n, n));
    r.timings.push_back({"monte carlo n=" + std::to_string(n), since(t0), 30.0});
    r.data["mc_n" + std::to_string(n)] = {{"A", to_json(m.A.A)}, {"rel_error", em}};
    ok = ok && em <= 1e-2;
    summary += ", mc n=" + std::to_string(n) + " err " + fmt("%.2e", em);
  }
  r.pass = ok;
  r.summary = summary;
  return r;
}

CheckResult equivariance(const VerifyOptions& o) {
  CheckResult r;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(mix(o.seed, 200));
  std::vector<Mat> Ts;
  for (int k = 0; k < 20; ++k) Ts.push_back(random_transform(2, 10.0, rng));
  const std::vector<std::pair<std::string, LogConcaveFunction>> fs = {
      {"gaussian", gaussian2()}, {"square_gauge_squared", gauge_fn(ConvexBody::cube(2, 1.0), 2.0)}};
  bool ok = true;
  double worst = 0.0;
  int within3 = 0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const IntegrationSpec spec = mc_spec(o, 201 + i);
    const FunctionalEllipsoid ef = lyz_matrix(fs[i].second, spec);
    json rows = json::array();
    for (const Mat& T : Ts) {
      const EquivarianceReport e = check_equivariance(ef, fs[i].second, T, spec);
      rows.push_back({{"discrepancy", e.discrepancy}, {"error_bound", e.error_bound}});
      worst = std::max(worst, e.discrepancy);
      ok = ok && e.discrepancy <= 2e-2;
      if (e.pass) ++within3;
    }
    r.data[fs[i].first] = rows;
  }
  r.timings.push_back({"total", since(t0), 300.0});
  r.data["max_discrepancy"] = worst;
  r.data["within_3_sigma"] = within3;
  r.pass = ok;
  r.summary = "40 pairs, max rel discrepancy " + fmt("%.2e", worst) + " (limit 2e-2), " + std::to_string(within3) +
              "/40 within 3 sigma";
  return r;
}

CheckResult geometric_reduction(const VerifyOptions& o) {
  CheckResult r;
  bool ok = true;
  std::string summary;
  const Mat Qsq = lyz_body_ellipsoid(ConvexBody::cube(2, 1.0)).A;
  const double oracle = rel_frobenius(Qsq, Mat::Identity(2, 2));
  ok = ok && oracle <= 1e-12;
  r.data["square_facet_sum_vs_identity"] = oracle;
  for (const auto& [name, K] : test_bodies(o.seed)) {
    const LogConcaveFunction f = gauge_fn(K, 2.0);
    const Mat Q = lyz_body_ellipsoid(K).A;
    const FunctionalEllipsoid q = lyz_matrix(f, quad_spec(o));
    const FunctionalEllipsoid m = lyz_matrix(f, mc_spec(o, 310));
    const double eq = rel_frobenius(q.A.A, 0.5 * Q);
    const double em = rel_frobenius(m.A.A, 0.5 * Q);
    r.data[name] = {{"Q", to_json(Q)}, {"A_quadrature", to_json(q.A.A)}, {"A_mc", to_json(m.A.A)},
                    {"rel_error_quadrature", eq}, {"rel_error_mc", em}};
    ok = ok && eq <= 2e-2 && em <= 2e-2;
    summary += (summary.empty() ? "" : ", ") + name + " " + fmt("%.2e", eq) + "/" + fmt("%.2e", em);
  }
  r.pass = ok;
  r.summary = "rel err quad/mc: " + summary;
  return r;
}

CheckResult mass_identities(const VerifyOptions& o) {
  CheckResult r;
  const double Jg = total_mass(gaussian2(), quad_spec(o)).value;
  const double eg = rel_err(Jg, 2.0 * std::numbers::pi);
  bool ok = eg <= 1e-8;
  r.data["gaussian"] = {{"J", Jg}, {"rel_error", eg}};
  std::string summary = "J(gamma) err " + fmt("%.2e", eg);
  for (const auto& [name, K] : test_bodies(o.seed)) {
    const double J = total_mass(gauge_fn(K, 2.0), quad_spec(o)).value;
    const double expect = 2.0 * std::tgamma(2.0) * body_volume(K);
    const double e = rel_err(J, expect);
    r.data[name] = {{"J", J}, {"expected", expect}, {"rel_error", e}};
    ok = ok && e <= 5e-3;
    summary += ", " + name + " " + fmt("%.2e", e);
  }
  r.pass = ok;
  r.summary = summary;
  return r;
}

CheckResult legendre_check(const VerifyOptions& o) {
  CheckResult r;
  const auto t0 = Clock::now();
  const LegendreSuiteReport s = legendre_suite(mix(o.seed, 500), 1000, 4);
  r.timings.push_back({"suite", since(t0), 60.0});
  r.data = {{"cases", s.cases},
            {"biconjugacy_failures", s.biconjugacy_failures},
            {"fenchel_young_failures", s.fenchel_young_failures},
            {"composition_failures", s.composition_failures},
            {"discrete_failures", s.discrete_failures},
            {"max_biconjugacy_error", s.max_biconjugacy_error},
            {"min_fenchel_young_gap", s.min_fenchel_young_gap},
            {"max_tangent_gap", s.max_tangent_gap},
            {"max_composition_error", s.max_composition_error},
            {"max_discrete_error", s.max_discrete_error}};
  r.pass = s.pass();
  r.summary = std::to_string(s.cases) + " cases; max errors biconj " + fmt("%.1e", s.max_biconjugacy_error) +
              ", tangent gap " + fmt("%.1e", s.max_tangent_gap) + ", composition " +
              fmt("%.1e", s.max_composition_error) + ", discrete " + fmt("%.1e", s.max_discrete_error);
  return r;
}

CheckResult slog_characterization(const VerifyOptions& o) {
  CheckResult r;
  bool ok = true;
  const double cn = constants::gaussian_mass(2);
  const SlogSolution s = solve_slog(gaussian2(), quad_spec(o));
  const double e0 = rel_frobenius(s.M, Mat::Identity(2, 2));
  ok = ok && e0 <= 1e-3;
  r.data["gaussian_quadrature"] = {{"M", to_json(s.M)}, {"rel_error", e0}};

  std::mt19937_64 rng(mix(o.seed, 600));
  double worst = 0.0;
  json rows = json::array();
  for (int k = 0; k < 10; ++k) {
    const Mat T0 = random_transform(2, 5.0, rng);
    const SlogSolution sk = solve_slog(compose(gaussian2(), T0), mc_spec(o, 610 + k));
    const double e = rel_frobenius(sk.M, T0.transpose() * T0);
    worst = std::max(worst, e);
    rows.push_back(e);
  }
  ok = ok && worst <= 2e-2;
  r.data["transformed_mc_rel_errors"] = rows;

  double worst_var = 0.0, worst_mass = 0.0, worst_back = 0.0;
  const std::vector<std::pair<std::string, LogConcaveFunction>> fs = {
      {"gaussian", gaussian2()},
      {"square_gauge_squared", gauge_fn(ConvexBody::cube(2, 1.0), 2.0)},
      {"hexagon_gauge_squared", gauge_fn(hexagon(), 2.0)}};
  for (const auto& [name, f] : fs) {
    const SlogSolution a = solve_slog(f, quad_spec(o));
    const SlogSolution b = slog_to_sbar(f, a.gaussian, quad_spec(o));
    const SlogSolution c = sbar_to_slog(f, b.gaussian, quad_spec(o));
    const double dv = std::max(std::abs(a.normalized_variation - 1.0), std::abs(c.normalized_variation - 1.0));
    const double dm = std::abs(b.objective - cn) / cn;
    const double db = rel_frobenius(c.M, a.M);
    worst_var = std::max(worst_var, dv);
    worst_mass = std::max(worst_mass, dm);
    worst_back = std::max(worst_back, db);
    r.data["round_trip"][name] = {{"slog_variation", a.normalized_variation},
                                  {"sbar_mass", b.objective},
                                  {"back_variation", c.normalized_variation},
                                  {"back_rel_error", db}};
  }
  ok = ok && worst_var <= 1e-2 && worst_mass <= 1e-2 && worst_back <= 1e-2;

  const GaussianFunction g = GaussianFunction::standard(2);
  const OptimalityReport opt = verify_optimality(gaussian2(), g, mc_spec(o, 650), 100, 0.3, mix(o.seed, 651));
  Mat wrong(2, 2);
  wrong << 2.0, 0.0, 0.0, 1.0;
  wrong /= std::sqrt(2.0);
  const OptimalityReport neg = verify_optimality(gaussian2(), GaussianFunction::from_matrix(wrong), mc_spec(o, 650),
                                                 100, 0.3, mix(o.seed, 651));
  ok = ok && opt.violations == 0 && neg.violations > 0;
  r.data["optimality"] = {{"violations", opt.violations}, {"min_gap", opt.min_gap}};
  r.data["negative_control_violations"] = neg.violations;
  r.pass = ok;
  r.summary = "gaussian M err " + fmt("%.1e", e0) + ", transformed max err " + fmt("%.2e", worst) +
              ", |dbarJ-1| " + fmt("%.1e", worst_var) + ", |J-c_n|/c_n " + fmt("%.1e", worst_mass) + ", " +
              std::to_string(opt.violations) + " violations (control " + std::to_string(neg.violations) + ")";
  return r;
}

CheckResult projection_special_case(const VerifyOptions& o) {
  CheckResult r;
  const LogConcaveFunction f = gauge_fn(ConvexBody::cube(2, 1.0), 1.0);
  Mat ys(50, 2);
  for (int k = 0; k < 50; ++k) {
    const double a = 2.0 * std::numbers::pi * (k + 0.37) / 50.0;
    ys(k, 0) = std::cos(a);
    ys(k, 1) = std::sin(a);
  }
  const Estimate h = projection_support_many(f, ys, mc_spec(o, 700));
  double worst = 0.0;
  json rows = json::array();
  for (int k = 0; k < 50; ++k) {
    const double oracle = std::tgamma(2.0) * 2.0 * (std::abs(ys(k, 0)) + std::abs(ys(k, 1)));
    const double e = rel_err(h.value(k), oracle);
    worst = std::max(worst, e);
    rows.push_back({{"u", {ys(k, 0), ys(k, 1)}}, {"h", h.value(k)}, {"oracle", oracle}});
  }
  r.data["directions"] = rows;
  r.data["max_rel_deviation"] = worst;
  r.pass = worst <= 2e-2;
  r.summary = "50 directions, max rel deviation " + fmt("%.2e", worst);
  return r;
}

json chain_json(const PettyChain& c) {
  return {{"L", c.L},       {"L_error", c.L_error},       {"M", c.M},       {"M_error", c.M_error},
          {"R", c.R},       {"R_error", c.R_error},       {"gap1", c.gap1}, {"gap1_error", c.gap1_error},
          {"gap2", c.gap2}, {"gap2_error", c.gap2_error}, {"first_holds", c.first_holds},
          {"second_holds", c.second_holds}};
}

CheckResult petty_chain(const VerifyOptions& o) {
  CheckResult r;
  const auto t0 = Clock::now();
  bool ok = true;
  int holds = 0;
  for (std::size_t i = 0; i < o.battery.size(); ++i) {
    const BatteryEntry& e = o.battery[i];
    const PettyChain q = petty_chain_report(e.f, quad_spec(o));
    const PettyChain m = petty_chain_report(e.f, mc_spec(o, 800 + i));
    const bool both = q.first_holds && q.second_holds && m.first_holds && m.second_holds;
    if (both) ++holds;
    ok = ok && both;
    r.data["battery"][e.id] = {{"quadrature", chain_json(q)}, {"mc", chain_json(m)}};
  }
  std::vector<PettyChain> fam;
  for (double p : {8.0, 16.0, 32.0}) {
    fam.push_back(petty_chain_report(gauge_fn(ConvexBody::ball(2, 1.0), p), quad_spec(o)));
    r.data["ball_family"]["p" + std::to_string(static_cast<int>(p))] = chain_json(fam.back());
  }
  bool first_trend = true, second_trend = true;
  for (std::size_t k = 1; k < fam.size(); ++k) {
    const double tol = 3.0 * (fam[k].gap1_error + fam[k - 1].gap1_error) + 1e-10 * fam[k].L;
    first_trend = first_trend && fam[k].gap1 <= fam[k - 1].gap1 + tol;
    second_trend = second_trend && fam[k].gap2 < fam[k - 1].gap2;
  }
  r.data["ball_family"]["first_gap_non_increasing"] = first_trend;
  r.data["ball_family"]["second_gap_decreasing"] = second_trend;
  r.timings.push_back({"total", since(t0), 600.0});
  ok = ok && first_trend && second_trend;
  r.pass = ok;
  r.summary = std::to_string(holds) + "/" + std::to_string(o.battery.size()) +
              " functions satisfy both inequalities (quad and mc); ball family gap1 " +
              fmt("%.1e", fam[0].gap1) + "," + fmt("%.1e", fam[1].gap1) + "," + fmt("%.1e", fam[2].gap1) +
              " gap2 " + fmt("%.3f", fam[0].gap2) + "," + fmt("%.3f", fam[1].gap2) + "," + fmt("%.3f", fam[2].gap2);
  return r;
}

bool agree(double a, double ea, double b, double eb) { return std::abs(a - b) <= 3.0 * std::hypot(ea, eb); }

// Least-squares slope of log10(RMS error) against log10(budget).
double mc_error_slope(const VerifyOptions& o, json& data) {
  const LogConcaveFunction g = gaussian2();
  const double exact = 2.0 * std::numbers::pi;
  const std::vector<std::uint64_t> budgets = {1000, 10000, 100000, 1000000};
  const int reps = 16;
  std::vector<double> lx, ly;
  for (std::uint64_t N : budgets) {
    double ss = 0.0;
    for (int k = 0; k < reps; ++k) {
      IntegrationSpec s = IntegrationSpec::monte_carlo(N, mix(o.seed, 900 + 16 * lx.size() + k));
      s.truncation_radius = o.radius;
      const double v = total_mass(g, s).value;
      ss += (v - exact) * (v - exact);
    }
    const double rms = std::sqrt(ss / reps) / exact;
    data["rms_rel_error"].push_back({{"budget", N}, {"value", rms}});
    lx.push_back(std::log10(static_cast<double>(N)));
    ly.push_back(std::log10(rms));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / lx.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

CheckResult cross_validation(const VerifyOptions& o) {
  CheckResult r;
  const LogConcaveFunction g = gaussian2();
  Mat ys(2, 2);
  ys << 1.0, 0.0, std::sqrt(0.5), std::sqrt(0.5);
  int compared = 0, agreed = 0;
  std::string failures;
  for (std::size_t i = 0; i < o.battery.size(); ++i) {
    const BatteryEntry& e = o.battery[i];
    const IntegrationSpec q = quad_spec(o), m = mc_spec(o, 1000 + i);
    json row;
    auto record = [&](const std::string& what, double a, double ea, double b, double eb) {
      const bool ok = agree(a, ea, b, eb);
      row[what] = {{"quadrature", a}, {"quadrature_error", ea}, {"mc", b}, {"mc_error", eb}, {"agree", ok}};
      ++compared;
      if (ok) ++agreed;
      else failures += " " + e.id + ":" + what;
    };
    const IntegralResult Jq = total_mass(e.f, q), Jm = total_mass(e.f, m);
    record("J", Jq.value, Jq.stderr_or_bound, Jm.value, Jm.stderr_or_bound);
    const IntegralResult dq = first_variation(e.f, g, q), dm = first_variation(e.f, g, m);
    record("deltaJ", dq.value, dq.stderr_or_bound, dm.value, dm.stderr_or_bound);
    const FunctionalEllipsoid Aq = lyz_matrix(e.f, q), Am = lyz_matrix(e.f, m);
    const double disc = rel_frobenius(Am.A.A, Aq.A.A);
    const double err = combined_relative_error(Aq.A_error, Am.A_error, Aq.A.A);
    const bool a_ok = disc <= 3.0 * err;
    row["A"] = {{"quadrature", to_json(Aq.A.A)}, {"mc", to_json(Am.A.A)}, {"rel_discrepancy", disc},
                {"combined_rel_error", err}, {"agree", a_ok}};
    ++compared;
    if (a_ok) ++agreed;
    else failures += " " + e.id + ":A";
    const Estimate hq = projection_support_many(e.f, ys, q), hm = projection_support_many(e.f, ys, m);
    for (int k = 0; k < ys.rows(); ++k)
      record("h_Pi_u" + std::to_string(k), hq.value(k), hq.error(k), hm.value(k), hm.error(k));
    r.data["battery"][e.id] = row;
  }
  const double slope = mc_error_slope(o, r.data["mc_slope"]);
  r.data["mc_slope"]["slope"] = slope;
  const bool slope_ok = std::abs(slope + 0.5) <= 0.1;
  r.pass = agreed == compared && slope_ok;
  r.summary = std::to_string(agreed) + "/" + std::to_string(compared) + " quantities agree within 3 sigma" +
              (failures.empty() ? "" : " (disagree:" + failures + ")") + ", mc slope " + fmt("%.3f", slope);
  return r;
}

// Legendre suite generators.

ConvexBody random_body(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int kind = static_cast<int>(U(rng) * 5.0);
  if (kind == 0) return ConvexBody::ellipsoid(random_spd(n, 0.3, 3.0, rng));
  if (kind == 1) return ConvexBody::ball(n, 0.5 + 1.5 * U(rng));
  if (kind == 2) return U(rng) < 0.5 ? ConvexBody::cube(n, 0.5 + U(rng)) : ConvexBody::cross_polytope(n, 0.5 + U(rng));
  if (n == 2) {
    const int k = 4 + static_cast<int>(U(rng) * 6.0);
    Mat V(k, 2);
    for (int j = 0; j < k; ++j) {
      const double a = 2.0 * std::numbers::pi * (j + 0.6 * (U(rng) - 0.5)) / k;
      const double rad = 0.5 + 1.5 * U(rng);
      V(j, 0) = rad * std::cos(a);
      V(j, 1) = rad * std::sin(a);
    }
    return ConvexBody::from_vertices(V);
  }
  std::normal_distribution<double> N;
  Mat V(2 * n + 6, n);
  for (int i = 0; i < n; ++i) {
    V.row(2 * i) = (0.5 + U(rng)) * Vec::Unit(n, i).transpose();
    V.row(2 * i + 1) = -(0.5 + U(rng)) * Vec::Unit(n, i).transpose();
  }
  for (int j = 2 * n; j < V.rows(); ++j) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = N(rng);
    V.row(j) = (0.5 + 1.5 * U(rng)) * v.normalized().transpose();
  }
  return ConvexBody::from_vertices(V);
}

struct RandomCase {
  ConvexFunction phi;
  bool smooth;                      // quadratic or p > 1
  std::optional<Mat> quadratic;     // A for quadratic bases
  std::optional<ConvexBody> body;   // K for gauge bases
  double p = 2.0;
};

RandomCase random_base(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  if (U(rng) < 0.3) {
    const Mat A = random_spd(n, 0.2, 5.0, rng);
    return {ConvexFunction::quadratic(A), true, A, std::nullopt, 2.0};
  }
  const ConvexBody K = random_body(n, rng);
  const double p = U(rng) < 0.25 ? 1.0 : 1.2 + 4.8 * U(rng);
  return {ConvexFunction::gauge_power(K, p), p > 1.0, std::nullopt, K, p};
}

Vec random_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Vec x(n);
  for (int i = 0; i < n; ++i) x(i) = N(rng);
  return x.normalized();
}

// Random point along a random ray, placed where the degree-`deg` positively
// homogeneous function psi takes a value in [0.05, 5]; a plain radius in
// [0.2, 3] when psi is not finite and positive there.
Vec moderate_point(const ConvexFunction& psi, double deg, std::mt19937_64& rng) {
  const int n = psi.dim();
  std::uniform_real_distribution<double> V(0.05, 5.0), R(0.2, 3.0);
  const Vec u = random_direction(n, rng);
  const double target = V(rng), radius = R(rng);
  const ExtendedReal v = psi(u);
  if (v.is_infinite() || !(v.value() > 0.0)) return radius * u;
  return std::pow(target / v.value(), 1.0 / deg) * u;
}

// Both infinite, or both finite and within tol.
bool same(ExtendedReal a, ExtendedReal b, double tol, double& err) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  const double d = std::abs(a.value() - b.value());
  err = std::max(err, d);
  return d <= tol;
}

}  // namespace

bool CheckResult::within_time() const {
  for (const Timing& t : timings)
    if (t.limit > 0.0 && t.seconds > t.limit) return false;
  return true;
}

Mat random_transform(int n, double cond_max, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0.0, std::log(cond_max));
  auto orthogonal = [&] {
    Mat G(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = N(rng);
    return Mat(Eigen::HouseholderQR<Mat>(G).householderQ());
  };
  const Mat Q1 = orthogonal(), Q2 = orthogonal();
  Vec s(n);
  for (int i = 0; i < n; ++i) s(i) = std::exp(U(rng));
  s(0) = 1.0;
  return Q1 * s.asDiagonal() * Q2;
}

Mat random_spd(int n, double lo, double hi, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(lo, hi);
  Mat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = N(rng);
  const Mat Q = Eigen::HouseholderQR<Mat>(G).householderQ();
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = U(rng);
  return symmetrize(Q * d.asDiagonal() * Q.transpose());
}

LegendreSuiteReport legendre_suite(std::uint64_t seed, int cases, int discrete_cases) {
  LegendreSuiteReport r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  r.min_fenchel_young_gap = std::numeric_limits<double>::infinity();
  for (int c = 0; c < cases; ++c) {
    const int n = U(rng) < 0.6 ? 2 : 3;
    const RandomCase base = random_base(n, rng);
    const Mat T = random_transform(n, 10.0, rng);
    // Every other case wraps the base in a composition.
    const ConvexFunction phi = c % 2 == 0 ? base.phi : compose(base.phi, T);
    const ConvexFunction conj = legendre_conjugate(phi);
    const ConvexFunction biconj = legendre_conjugate(conj);
    bool bi_ok = true, fy_ok = true, comp_ok = true;
    const double q = base.p > 1.0 ? base.p / (base.p - 1.0) : 1.0;
    for (int k = 0; k < 5; ++k) {
      const Vec x = moderate_point(phi, base.p, rng);
      const Vec y = base.p > 1.0 ? moderate_point(conj, q, rng) : moderate_point(phi, 1.0, rng);
      bi_ok = same(biconj(x), phi(x), 1e-9, r.max_biconjugacy_error) && bi_ok;
      const ExtendedReal fx = phi(x), fy = conj(y);
      if (fx.is_finite() && fy.is_finite()) {
        const double gap = fx.value() + fy.value() - x.dot(y);
        r.min_fenchel_young_gap = std::min(r.min_fenchel_young_gap, gap);
        if (gap < -1e-9) fy_ok = false;
      }
      if (base.smooth) {
        if (const auto g = phi.try_gradient(x)) {
          const double gap = fenchel_young_gap(phi, x, *g);
          r.max_tangent_gap = std::max(r.max_tangent_gap, std::abs(gap));
          if (gap > 1e-7 || gap < -1e-9) fy_ok = false;
        }
      }
      // (base o T)* against base* o T^{-T}, with base o T built directly.
      const ConvexFunction absorbed = base.quadratic
                                          ? ConvexFunction::quadratic(T.transpose() * *base.quadratic * T)
                                          : ConvexFunction::gauge_power(base.body->transformed(T.inverse()), base.p);
      const Vec z = T.transpose().inverse() * y;
      comp_ok = same(legendre_conjugate(absorbed)(y), legendre_conjugate(base.phi)(z), 1e-9,
                     r.max_composition_error) &&
                comp_ok;
      comp_ok = same(legendre_conjugate(compose(base.phi, T))(y), legendre_conjugate(base.phi)(z), 1e-9,
                     r.max_composition_error) &&
                comp_ok;
    }
    if (!bi_ok) ++r.biconjugacy_failures;
    if (!fy_ok) ++r.fenchel_young_failures;
    if (!comp_ok) ++r.composition_failures;
    ++r.cases;
  }
  for (int c = 0; c < discrete_cases; ++c) {
    // Lattice and dual-interpolation errors together scale like
    // tr(A) h^2 / 4, so traces stay below 1.
    const Mat A = c == 0 ? Mat(0.5 * Mat::Identity(2, 2)) : random_spd(2, 0.2, 0.45, rng);
    const int m = 257;
    std::vector<double> values(m * m);
    const double h = 16.0 / (m - 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Vec x(2);
        x << -8.0 + i * h, -8.0 + j * h;
        values[static_cast<std::size_t>(i) * m + j] = 0.5 * x.dot(A * x);
      }
    const ConvexFunction grid = ConvexFunction::grid(SampledGrid(Vec::Constant(2, -8.0), Vec::Constant(2, 8.0),
                                                                 {m, m}, values));
    const SampledGrid dual = legendre_conjugate(grid).grid();
    const Mat Ainv = spd_inverse(A);
    const Vec mid = 0.5 * (dual.lower() + dual.upper());
    const Vec half = 0.25 * (dual.upper() - dual.lower());
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        Vec y(2);
        y << mid(0) - half(0) + i * half(0) / 20.0, mid(1) - half(1) + j * half(1) / 20.0;
        worst = std::max(worst, std::abs(dual.evaluate(y).value_or(1e300) - 0.5 * y.dot(Ainv * y)));
      }
    r.max_discrete_error = std::max(r.max_discrete_error, worst);
    if (worst > 1e-3) ++r.discrete_failures;
  }
  return r;
}

std::vector<BatteryEntry> default_battery() {
  std::vector<BatteryEntry> b;
  std::mt19937_64 rng(20241016);
  for (int k = 1; k <= 3; ++k)
    b.push_back({"gaussian_T" + std::to_string(k), GaussianFunction(random_transform(2, 4.0, rng)).function()});
  for (double p : {1.5, 2.0, 4.0, 8.0})
    b.push_back({"square_p" + fmt("%g", p), gauge_fn(ConvexBody::cube(2, 1.0), p)});
  for (double p : {1.5, 8.0}) b.push_back({"disk_p" + fmt("%g", p), gauge_fn(ConvexBody::ball(2, 1.0), p)});
  for (double p : {2.0, 4.0, 8.0}) b.push_back({"hexagon_p" + fmt("%g", p), gauge_fn(hexagon(), p)});
  return b;
}

std::string battery_id(const std::vector<BatteryEntry>& battery) {
  std::uint64_t h = 1469598103934665603ull;
  for (const BatteryEntry& e : battery)
    for (char ch : e.id + "|" + e.f.fingerprint() + ";") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json battery_to_json(const std::vector<BatteryEntry>& battery) {
  json j;
  j["schema"] = kSchemaVersion;
  j["battery_id"] = battery_id(battery);
  j["functions"] = json::array();
  for (const BatteryEntry& e : battery) j["functions"].push_back({{"id", e.id}, {"function", to_json(e.f.potential())}});
  return j;
}

std::vector<BatteryEntry> battery_from_json(const json& j) {
  if (!j.is_object() || !j.contains("functions") || !j["functions"].is_array())
    throw ParseError("battery: expected {\"functions\": [...]}");
  std::vector<BatteryEntry> b;
  for (const json& e : j["functions"]) {
    if (!e.is_object() || !e.contains("id") || !e["id"].is_string() || !e.contains("function"))
      throw ParseError("battery: each entry needs \"id\" and \"function\"");
    b.push_back({e["id"].get<std::string>(), LogConcaveFunction(function_from_json(e["function"]))});
  }
  if (b.empty()) throw ParseError("battery: no functions");
  return b;
}

CheckResult run_criterion(int id, const VerifyOptions& opts) {
  static const char* titles[] = {"",
                                 "Gaussian fixed point",
                                 "GL(n) equivariance",
                                 "Geometric reduction",
                                 "Mass identities",
                                 "Legendre suite",
                                 "S_log characterization",
                                 "Projection special case",
                                 "Petty chain",
                                 "Backend cross-validation"};
  CheckResult r;
  switch (id) {
    case 1: r = gaussian_fixed_point(opts); break;
    case 2: r = equivariance(opts); break;
    case 3: r = geometric_reduction(opts); break;
    case 4: r = mass_identities(opts); break;
    case 5: r = legendre_check(opts); break;
    case 6: r = slog_characterization(opts); break;
    case 7: r = projection_special_case(opts); break;
    case 8: r = petty_chain(opts); break;
    case 9: r = cross_validation(opts); break;
    default: throw DomainError("run_criterion: id must be in 1..9");
  }
  r.id = id;
  r.title = titles[id];
  return r;
}

}  // namespace lyz
