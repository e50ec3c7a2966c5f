#include "lyz/battery.hpp"
#include "lyz/body.hpp"
#include "lyz/constants.hpp"
#include "lyz/error.hpp"
#include "lyz/json_io.hpp"
#include "lyz/lyz_functional.hpp"
#include "lyz/petty.hpp"
#include "lyz/slog.hpp"
#include "lyz/svg.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lyz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitParse = 2;
constexpr int kExitCompute = 3;

struct Options {
  std::string input;
  std::string output;
  std::string backend = "quadrature";
  std::uint64_t budget = 0;  // 0: backend default
  std::uint64_t seed = 42;
  double radius = 8.0;
  bool plot = false;
  double tolerance = 0.0;  // 0: command default
  bool timestamps = false;
  std::vector<int> only;
};

// Failures surfaced as an exit status plus a structured record.
struct Failure {
  int code;
  std::string kind;
  std::string message;
};

IntegrationSpec make_spec(const Options& o) {
  IntegrationSpec s = o.backend == "mc" ? IntegrationSpec::monte_carlo(o.budget ? o.budget : 1000000, o.seed)
                                        : IntegrationSpec::quadrature(o.budget ? o.budget : (1u << 18));
  s.seed = o.seed;
  s.truncation_radius = o.radius;
  if (o.tolerance > 0.0) s.target_rel_tol = o.tolerance;
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("integration spec: ") + e.what());
  }
  return s;
}

json load_input(const Options& o) {
  if (o.input.empty()) throw ParseError("--input is required");
  json j = read_json_file(o.input);
  if (j.is_object() && j.contains("schema")) {
    if (!j["schema"].is_string() || j["schema"].get<std::string>() != kSchemaVersion)
      throw ParseError(o.input + ": unsupported schema (expected \"" + std::string(kSchemaVersion) + "\")");
  }
  return j;
}

ConvexFunction function_input(const json& j) {
  if (j.is_object() && j.contains("function")) return function_from_json(j["function"]);
  return function_from_json(j);
}

// A body document, or a gauge_power function document (its body is used).
ConvexBody body_input(const json& j) {
  if (j.is_object() && j.contains("body")) return body_from_json(j["body"]);
  if (j.is_object() && j.contains("function")) {
    const ConvexFunction phi = function_from_json(j["function"]);
    if (phi.kind() != ConvexFunction::Kind::kGaugePower) throw ParseError("body-lyz: function input must be a gauge_power");
    return phi.gauge_body();
  }
  return body_from_json(j);
}

std::string svg_path(const Options& o) {
  if (o.output.empty()) return "lyz_plot.svg";
  return std::filesystem::path(o.output).replace_extension(".svg").string();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot write");
  out << text;
}

json ellipsoid_json(const FunctionalEllipsoid& e) {
  return {{"A", to_json(e.A.A)},
          {"A_error", to_json(e.A_error)},
          {"role", "log_density"},
          {"J", e.J},
          {"J_error", e.J_error},
          {"min_eigenvalue", e.min_eig},
          {"rejected_points", e.rejects},
          {"evaluations", e.evaluations},
          {"warnings", e.warnings},
          {"source_fingerprint", e.source_fingerprint}};
}

std::vector<std::string> plots;

bool cmd_ellipsoid(const Options& o, json& out) {
  const LogConcaveFunction f(function_input(load_input(o)));
  const IntegrationSpec spec = make_spec(o);
  out["function"] = f.describe();
  out["spec"] = to_json(spec);
  const FunctionalEllipsoid e = lyz_matrix(f, spec);
  out["result"] = ellipsoid_json(e);
  if (o.plot && f.dim() == 2) {
    const std::string path = svg_path(o);
    write_text(path, svg_level_sets(e.A.A, {std::exp(-0.5), std::exp(-2.0)}, "Gamma_-2 f level sets"));
    plots.push_back(path);
  }
  return true;
}

bool cmd_body_lyz(const Options& o, json& out) {
  const ConvexBody K = body_input(load_input(o));
  const IntegrationSpec spec = make_spec(o);
  out["body"] = K.describe();
  out["spec"] = to_json(spec);
  const QuadraticForm Q = lyz_body_ellipsoid(K);
  out["result"]["Q"] = to_json(Q.A);
  out["result"]["role"] = "gauge_squared";
  out["result"]["volume"] = K.volume();
  // The functional route on e^{-||x||_K^2 / 2} gives Q / 2.
  const FunctionalEllipsoid e = lyz_matrix(LogConcaveFunction(ConvexFunction::gauge_power(K, 2.0)), spec);
  const double rel = rel_frobenius(e.A.A, 0.5 * Q.A);
  const double tol = o.tolerance > 0.0 ? o.tolerance : 2e-2;
  out["result"]["functional_A"] = to_json(e.A.A);
  out["checks"]["functional_matches_half_Q"] = {{"rel_error", rel}, {"tolerance", tol}, {"pass", rel <= tol}};
  if (o.plot && K.dim() == 2) {
    const std::string path = svg_path(o);
    write_text(path, svg_level_sets(0.5 * Q.A, {std::exp(-0.5), std::exp(-2.0)}, "Gamma_-2 K as log-density"));
    plots.push_back(path);
  }
  return rel <= tol;
}

bool cmd_slog(const Options& o, json& out) {
  const LogConcaveFunction f(function_input(load_input(o)));
  const IntegrationSpec spec = make_spec(o);
  const int n = f.dim();
  out["function"] = f.describe();
  out["spec"] = to_json(spec);
  const SlogSolution s = solve_slog(f, spec);
  out["result"] = {{"M", to_json(s.M)},
                   {"T", to_json(s.gaussian.T())},
                   {"J", s.objective},
                   {"J_error", s.objective_error},
                   {"normalized_variation", s.normalized_variation},
                   {"normalized_variation_error", s.normalized_variation_error},
                   {"problem", problem_name(s.problem)}};
  const bool mc = spec.backend == Backend::kMonteCarlo;
  auto within = [&](double dev, double err) {
    return mc ? dev <= 3.0 * err + 1e-12 : dev <= (o.tolerance > 0.0 ? o.tolerance : 1e-3);
  };
  bool ok = true;
  const double dv = std::abs(s.normalized_variation - 1.0);
  const bool v_ok = within(dv, s.normalized_variation_error);
  out["checks"]["slog_normalization"] = {{"deviation", dv}, {"pass", v_ok}};
  ok = ok && v_ok;
  const SlogSolution sb = slog_to_sbar(f, s.gaussian, spec);
  const double cn = constants::gaussian_mass(n);
  const double dm = std::abs(sb.objective - cn) / cn;
  const bool m_ok = within(dm, sb.objective_error / cn);
  out["checks"]["sbar_normalization"] = {{"M", to_json(sb.M)}, {"J", sb.objective}, {"deviation", dm},
                                         {"pass", m_ok}};
  ok = ok && m_ok;
  const OptimalityReport opt = verify_optimality(f, sb.gaussian, spec, 20, 0.3, spec.seed);
  out["checks"]["optimality"] = {{"trials", opt.trials},
                                 {"violations", opt.violations},
                                 {"min_gap", opt.min_gap},
                                 {"min_gap_error", opt.min_gap_error},
                                 {"pass", opt.violations == 0}};
  ok = ok && opt.violations == 0;
  if (o.plot && n == 2) {
    const std::string path = svg_path(o);
    write_text(path, svg_level_sets(0.5 * s.M, {std::exp(-0.5), std::exp(-2.0)}, "S_log Gaussian level sets"));
    plots.push_back(path);
  }
  return ok;
}

json chain_json(const PettyChain& c) {
  return {{"L", c.L},
          {"M", c.M},
          {"R", c.R},
          {"gaps", {c.gap1, c.gap2}},
          {"errors", {{"L", c.L_error}, {"M", c.M_error}, {"R", c.R_error}, {"gap1", c.gap1_error},
                      {"gap2", c.gap2_error}}},
          {"polar_projection_mass", c.polar_mass},
          {"first_holds", c.first_holds},
          {"second_holds", c.second_holds}};
}

bool cmd_petty(const Options& o, json& out) {
  const json in = load_input(o);
  const IntegrationSpec spec = make_spec(o);
  out["spec"] = to_json(spec);
  bool ok = true;
  if (in.is_object() && in.contains("functions")) {
    const std::vector<BatteryEntry> battery = battery_from_json(in);
    out["battery_id"] = battery_id(battery);
    for (const BatteryEntry& e : battery) {
      const PettyChain c = petty_chain_report(e.f, spec);
      out["results"][e.id] = chain_json(c);
      ok = ok && c.first_holds && c.second_holds;
    }
    return ok;
  }
  const LogConcaveFunction f(function_input(in));
  out["function"] = f.describe();
  out["battery_id"] = nullptr;
  const PettyChain c = petty_chain_report(f, spec);
  out["result"] = chain_json(c);
  if (o.plot && f.dim() == 2) {
    const ProjectionFunctional pf = projection_functional(f, spec);
    const std::string path = svg_path(o);
    write_text(path, svg_polar_profile(pf.directions.points, pf.h, "h of Pi f"));
    plots.push_back(path);
  }
  return c.first_holds && c.second_holds;
}

bool cmd_verify(const Options& o, json& out, std::vector<CheckResult>& results) {
  VerifyOptions v;
  v.seed = o.seed;
  v.radius = o.radius;
  if (o.budget) v.mc_budget = o.budget;
  if (!o.input.empty()) v.battery = battery_from_json(load_input(o));
  out["seed"] = v.seed;
  out["mc_budget"] = v.mc_budget;
  out["quad_budget"] = v.quad_budget;
  out["battery_id"] = battery_id(v.battery);
  std::vector<int> ids = o.only;
  if (ids.empty())
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  bool ok = true;
  out["checks"] = json::array();
  for (int id : ids) {
    if (id < 1 || id > kCriterionCount) throw ParseError("--only: criterion ids are 1.." + std::to_string(kCriterionCount));
    CheckResult r = run_criterion(id, v);
    std::cerr << "[" << (r.pass ? "PASS" : "FAIL") << "] " << r.id << ". " << r.title << ": " << r.summary
              << std::endl;
    out["checks"].push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary},
                             {"data", r.data}});
    ok = ok && r.pass;
    results.push_back(std::move(r));
  }
  out["all_pass"] = ok;
  return ok;
}

void emit(const Options& o, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (o.output.empty()) {
    std::cout << text;
  } else {
    write_text(o.output, text);
  }
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.input, "input JSON document");
  sub->add_option("--output", o.output, "report path (stdout when omitted)");
  sub->add_option("--backend", o.backend, "integration backend")->check(CLI::IsMember({"quadrature", "mc"}));
  sub->add_option("--budget", o.budget, "nodes (quadrature) or samples (mc)");
  sub->add_option("--seed", o.seed, "Monte Carlo seed");
  sub->add_option("--radius", o.radius, "truncation radius in standardized units")->check(CLI::PositiveNumber);
  sub->add_flag("--plot", o.plot, "write SVG next to the report (2-D inputs)");
  sub->add_option("--tolerance", o.tolerance, "target relative tolerance / check tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--timestamps", o.timestamps, "add a metadata block with wall times");
}

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional LYZ ellipsoids, optimal Gaussians and Petty-type inequalities"};
  app.require_subcommand(1);
  Options o;
  auto* ellipsoid = app.add_subcommand("ellipsoid", "LYZ matrix of a log-concave function");
  auto* body = app.add_subcommand("body-lyz", "classical LYZ ellipsoid of a polytope or ellipsoid");
  auto* slog = app.add_subcommand("slog", "optimal Gaussian (S_log) with normalization and optimality checks");
  auto* petty = app.add_subcommand("petty", "Petty-type chain L >= M >= R for a function or a battery");
  auto* verify = app.add_subcommand("verify", "run the property battery");
  for (auto* sub : {ellipsoid, body, slog, petty, verify}) add_common(sub, o);
  verify->add_option("--only", o.only, "criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << json{{"schema", kSchemaVersion},
                      {"error", {{"kind", "usage"}, {"message", e.what()}, {"exit_code", kExitParse}}}}
                     .dump()
              << "\n";
    return kExitParse;
  }

  const auto t0 = std::chrono::steady_clock::now();
  json out;
  out["schema"] = kSchemaVersion;
  std::vector<CheckResult> results;
  std::optional<Failure> failure;
  bool ok = false;
  std::string command = app.get_subcommands().front()->get_name();
  out["command"] = command;
  try {
    if (command == "ellipsoid") ok = cmd_ellipsoid(o, out);
    else if (command == "body-lyz") ok = cmd_body_lyz(o, out);
    else if (command == "slog") ok = cmd_slog(o, out);
    else if (command == "petty") ok = cmd_petty(o, out);
    else ok = cmd_verify(o, out, results);
  } catch (const ParseError& e) {
    failure = Failure{kExitParse, "parse", e.what()};
  } catch (const Error& e) {
    failure = Failure{kExitCompute, "computation", e.what()};
  } catch (const std::exception& e) {
    failure = Failure{kExitCompute, "computation", e.what()};
  }
  if (!failure && !ok) failure = Failure{kExitCheck, "check", "one or more checks failed"};

  if (failure) out["error"] = {{"kind", failure->kind}, {"message", failure->message}, {"exit_code", failure->code}};
  if (!plots.empty()) out["plots"] = plots;
  if (o.timestamps) {
    json meta;
    meta["timestamp"] = iso_now();
    meta["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const CheckResult& r : results)
      for (const Timing& t : r.timings)
        meta["timings"].push_back({{"criterion", r.id}, {"label", t.label}, {"seconds", t.seconds}, {"limit", t.limit}});
    out["metadata"] = meta;
  }
  try {
    emit(o, out);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
  if (failure) {
    std::cerr << json{{"schema", kSchemaVersion}, {"error", out["error"]}}.dump() << "\n";
    return failure->code;
  }
  return kExitOk;
}
