#pragma once

#include "lyz/json_io.hpp"
#include "lyz/logconcave.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lyz {

struct BatteryEntry {
  std::string id;
  LogConcaveFunction f;
};

// The 12-function battery: three Gaussians with random T, the squared-style
// gauge powers of [-1,1]^2 (p = 1.5, 2, 4, 8), the disk (p = 1.5, 8) and the
// regular hexagon (p = 2, 4, 8). Fixed; independent of any run seed.
std::vector<BatteryEntry> default_battery();

json battery_to_json(const std::vector<BatteryEntry>& battery);
// {"schema": "1", "battery_id": ..., "functions": [{"id": ..., "function": {...}}]}
std::vector<BatteryEntry> battery_from_json(const json& j);
std::string battery_id(const std::vector<BatteryEntry>& battery);

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::uint64_t mc_budget = 1000000;
  std::uint64_t quad_budget = 1u << 18;
  double radius = 8.0;
  std::vector<BatteryEntry> battery = default_battery();
};

struct Timing {
  std::string label;
  double seconds = 0.0;
  double limit = 0.0;  // 0 for none
};

struct CheckResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;
  json data;
  // Wall times; kept out of reproducible output.
  std::vector<Timing> timings;
  bool within_time() const;
};

inline constexpr int kCriterionCount = 9;

// Runs criterion `id` (1..9). `pass` is the numerical outcome only; time
// budgets are reported through `timings`.
CheckResult run_criterion(int id, const VerifyOptions& opts);

struct LegendreSuiteReport {
  int cases = 0;
  int biconjugacy_failures = 0;
  int fenchel_young_failures = 0;
  int composition_failures = 0;
  int discrete_failures = 0;
  double max_biconjugacy_error = 0.0;
  double min_fenchel_young_gap = 0.0;
  double max_tangent_gap = 0.0;
  double max_composition_error = 0.0;
  double max_discrete_error = 0.0;
  bool pass() const {
    return biconjugacy_failures + fenchel_young_failures + composition_failures + discrete_failures == 0;
  }
};

// Random closed-form functions checked for biconjugacy, Fenchel-Young and
// the composition rule; plus `discrete_cases` quadratic grids against the
// closed-form transform.
LegendreSuiteReport legendre_suite(std::uint64_t seed, int cases, int discrete_cases);

// Uniform cond(T) <= cond_max, random orthogonal factors and signs.
Mat random_transform(int n, double cond_max, std::mt19937_64& rng);
Mat random_spd(int n, double lo, double hi, std::mt19937_64& rng);

}  // namespace lyz
