#pragma once

#include "lyz/logconcave.hpp"

#include <cstdint>
#include <string>

namespace lyz {

enum class SlogProblem { kSlog, kSbarLog };

std::string problem_name(SlogProblem p);

struct SlogSolution {
  GaussianFunction gaussian{Mat::Identity(1, 1)};
  Mat M;                                // T^T T
  double objective = 0.0;               // J(gamma_T)
  double objective_error = 0.0;
  double normalized_variation = 0.0;    // delta-bar J(f, gamma_T)
  double normalized_variation_error = 0.0;
  SlogProblem problem = SlogProblem::kSlog;
  std::string spec_fingerprint;
};

// M = n / (2 J(f)) int grad phi grad phi^T f dx, T = M^{1/2}.
SlogSolution solve_slog(const LogConcaveFunction& f, const IntegrationSpec& spec);

// (J(f) / delta J(f, gamma_T)) . gamma_T, for gamma_T with J = c_n.
SlogSolution sbar_to_slog(const LogConcaveFunction& f, const GaussianFunction& g, const IntegrationSpec& spec);

// (c_n / J(gamma_T))^{2/n} . gamma_T, for gamma_T with delta-bar J = 1.
SlogSolution slog_to_sbar(const LogConcaveFunction& f, const GaussianFunction& g, const IntegrationSpec& spec);

// Right scalar multiple c . gamma_T, again a Gaussian with matrix M / c.
GaussianFunction scale_gaussian(const GaussianFunction& g, double c);

struct OptimalityReport {
  int trials = 0;
  int violations = 0;
  double candidate_value = 0.0;  // delta-bar J(f, candidate)
  double min_gap = 0.0;          // min over trials of value(P) - value(candidate)
  double max_gap = 0.0;
  double min_gap_error = 0.0;
};

// Compares the candidate with `trials` random Gaussians of equal mass:
// M_P = M^{1/2} exp(size * S) M^{1/2}, S symmetric traceless. A violation is
// value(candidate) > value(P) + 3 stderr.
OptimalityReport verify_optimality(const LogConcaveFunction& f, const GaussianFunction& candidate,
                                   const IntegrationSpec& spec, int trials, double size = 0.3,
                                   std::uint64_t seed = 7);

}  // namespace lyz
