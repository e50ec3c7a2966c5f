#pragma once

#include "lyz/convex_function.hpp"
#include "lyz/linalg.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace lyz {

enum class Backend { kQuadrature, kMonteCarlo };

std::string backend_name(Backend b);
Backend backend_from_name(const std::string& name);  // "quadrature" | "mc"

struct IntegrationSpec {
  Backend backend = Backend::kQuadrature;
  // Node count (quadrature) or sample count (Monte Carlo).
  std::uint64_t budget = 1u << 18;
  // Half-width of the standardized box; the truncation region is the
  // sublevel set circumscribing [-R, R]^n in standardized coordinates.
  double truncation_radius = 8.0;
  double target_rel_tol = 1e-6;
  std::uint64_t seed = 42;
  bool parallel = true;
  // Directions on S^{n-1}; 0 picks a per-dimension default.
  int sphere_points = 0;

  static IntegrationSpec quadrature(std::uint64_t budget = 1u << 18);
  static IntegrationSpec monte_carlo(std::uint64_t budget = 1000000, std::uint64_t seed = 42);

  void validate() const;  // throws DomainError
  int workers() const;
  int sphere_points_for(int n) const;
  // Stable hash of (backend, budget, R, seed, worker count) as 16 hex digits.
  std::string fingerprint() const;
};

struct IntegralResult {
  double value = 0.0;
  double stderr_or_bound = 0.0;
  std::string spec_fingerprint;
  bool tolerance_met = true;
  std::uint64_t resampled = 0;
};

// Value and error of a quantity derived from a vector of integrals.
struct Estimate {
  Vec value;
  Vec error;
};

struct VectorIntegral {
  Backend backend = Backend::kQuadrature;
  Vec value;
  Vec error;
  // Monte Carlo: per-batch means (rows). Quadrature: fine and coarse rule.
  Mat replicates;
  Vec replicate_counts;
  std::uint64_t evaluations = 0;
  std::uint64_t rejected = 0;   // integrand declined the point
  std::uint64_t resampled = 0;  // non-differentiable points redrawn or split
  std::string spec_fingerprint;

  // Error propagation through g: jackknife over batches (Monte Carlo) or the
  // fine/coarse difference (quadrature).
  Estimate derive(const std::function<Vec(const Vec&)>& g) const;
  IntegralResult component(int i, double target_rel_tol) const;
};

// A point handed to an integrand. `grad` is meaningful only when gradients
// were requested.
struct PointEval {
  const Vec& x;
  double phi;
  const Vec& grad;
};

// Writes k values into `out`; returning false rejects the point (zero
// contribution, counted).
using VectorIntegrand = std::function<bool(const PointEval&, double* out)>;

// Simultaneous estimates of int g_j(x) e^{-phi(x)} dx, j < k.
VectorIntegral integrate_vector(const ConvexFunction& potential, int k, const VectorIntegrand& integrand,
                                const IntegrationSpec& spec, bool need_gradient = true);

IntegralResult integrate_rn(const std::function<double(const Vec&)>& integrand, const ConvexFunction& potential,
                            const IntegrationSpec& spec);

// Integral over S^{n-1} against the unnormalized surface measure. The error
// is the difference to the rule with half as many points.
IntegralResult integrate_sphere(const std::function<double(const Vec&)>& integrand, int n,
                                const IntegrationSpec& spec);

// Weighted points (y_i, w_i) with sum_i w_i g(y_i) ~ int g d mu_f, where
// mu_f is the image of e^{-phi} dx under grad phi.
struct PushforwardSamples {
  Mat y;  // n x N
  Vec w;
  std::uint64_t resampled = 0;
  std::string spec_fingerprint;
};
PushforwardSamples pushforward_samples(const ConvexFunction& potential, const IntegrationSpec& spec);

// Plain composite Gauss-Legendre product rule over a box, graded
// geometrically toward `focus`. Error bound from the rule with half the
// panels.
IntegralResult integrate_box(const std::function<double(const Vec&)>& integrand, const Vec& lower, const Vec& upper,
                             const Vec& focus, std::uint64_t budget);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace lyz
