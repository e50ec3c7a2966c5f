#include "lyz/slog.hpp"

#include "lyz/constants.hpp"
#include "lyz/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace lyz {

namespace {

int tri_count(int n) { return n * (n + 1) / 2; }

Mat unpack(const Vec& v, int offset, int n) {
  Mat S(n, n);
  int c = offset;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++c) S(i, j) = S(j, i) = v(c);
  return S;
}

// (J, upper triangle of int grad phi grad phi^T f dx).
VectorIntegral second_moments(const LogConcaveFunction& f, const IntegrationSpec& spec) {
  require_class_a(f, "second moments of mu_f");
  const int n = f.dim();
  return integrate_vector(
      f.potential(), 1 + tri_count(n),
      [n](const PointEval& p, double* out) {
        out[0] = 1.0;
        int c = 1;
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) out[c++] = p.grad(i) * p.grad(j);
        return true;
      },
      spec);
}

void fill_variation(SlogSolution& s, const LogConcaveFunction& f, const IntegrationSpec& spec) {
  const IntegralResult v = normalized_first_variation(f, s.gaussian.function(), spec);
  s.normalized_variation = v.value;
  s.normalized_variation_error = v.stderr_or_bound;
}

}  // namespace

std::string problem_name(SlogProblem p) { return p == SlogProblem::kSlog ? "S_log" : "Sbar_log"; }

GaussianFunction scale_gaussian(const GaussianFunction& g, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scale_gaussian: factor must be > 0");
  return GaussianFunction(g.T() / std::sqrt(c));
}

SlogSolution solve_slog(const LogConcaveFunction& f, const IntegrationSpec& spec) {
  const int n = f.dim();
  const VectorIntegral v = second_moments(f, spec);
  const double cn = constants::gaussian_mass(n);
  const Estimate e = v.derive([&](const Vec& s) {
    const Mat M = n / (2.0 * s(0)) * unpack(s, 1, n);
    Vec out(1 + tri_count(n));
    out(0) = cn / std::sqrt(std::max(M.determinant(), 1e-300));
    int c = 1;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out(c++) = M(i, j);
    return out;
  });
  const Mat M = symmetrize(unpack(e.value, 1, n));
  if (!(min_eigenvalue(M) > 1e-12 * std::max(1.0, M.trace())))
    throw DegenerateError("solve_slog: moment matrix is not positive definite (mu_f degenerate)");
  SlogSolution s;
  s.gaussian = GaussianFunction::from_matrix(M);
  s.M = M;
  s.objective = e.value(0);
  s.objective_error = e.error(0);
  s.problem = SlogProblem::kSlog;
  s.spec_fingerprint = v.spec_fingerprint;
  fill_variation(s, f, spec);
  return s;
}

SlogSolution sbar_to_slog(const LogConcaveFunction& f, const GaussianFunction& g, const IntegrationSpec& spec) {
  const int n = f.dim();
  if (g.dim() != n) throw DomainError("sbar_to_slog: dimension mismatch");
  const double cn = constants::gaussian_mass(n);
  if (std::abs(g.mass() - cn) > 1e-9 * cn) throw DomainError("sbar_to_slog: input Gaussian must have mass c_n");
  const IntegralResult nv = normalized_first_variation(f, g.function(), spec);
  if (!(nv.value > 0.0)) throw DegenerateError("sbar_to_slog: first variation is not positive");
  SlogSolution s;
  s.gaussian = scale_gaussian(g, 1.0 / nv.value);  // J(f) / delta J(f, g)
  s.M = s.gaussian.M();
  s.objective = s.gaussian.mass();
  s.objective_error = s.objective * 0.5 * n * nv.stderr_or_bound / nv.value;
  s.problem = SlogProblem::kSlog;
  s.spec_fingerprint = nv.spec_fingerprint;
  fill_variation(s, f, spec);
  return s;
}

SlogSolution slog_to_sbar(const LogConcaveFunction& f, const GaussianFunction& g, const IntegrationSpec& spec) {
  const int n = f.dim();
  if (g.dim() != n) throw DomainError("slog_to_sbar: dimension mismatch");
  const double Jg = total_mass(g.function(), spec).value;
  if (!(Jg > 0.0)) throw DegenerateError("slog_to_sbar: mass of the Gaussian is not positive");
  const double c = std::pow(constants::gaussian_mass(n) / Jg, 2.0 / n);
  SlogSolution s;
  s.gaussian = scale_gaussian(g, c);
  s.M = s.gaussian.M();
  const IntegralResult J = total_mass(s.gaussian.function(), spec);
  s.objective = J.value;
  s.objective_error = J.stderr_or_bound;
  s.problem = SlogProblem::kSbarLog;
  s.spec_fingerprint = J.spec_fingerprint;
  fill_variation(s, f, spec);
  return s;
}

OptimalityReport verify_optimality(const LogConcaveFunction& f, const GaussianFunction& candidate,
                                   const IntegrationSpec& spec, int trials, double size, std::uint64_t seed) {
  const int n = f.dim();
  if (candidate.dim() != n) throw DomainError("verify_optimality: dimension mismatch");
  if (trials < 1) throw DomainError("verify_optimality: need at least one trial");
  const Mat M = candidate.M();
  const Mat R = spd_sqrt(M);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Mat> inverses;
  inverses.push_back(spd_inverse(M));
  for (int t = 0; t < trials; ++t) {
    Mat S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) S(i, j) = S(j, i) = nd(rng);
    S -= (S.trace() / n) * Mat::Identity(n, n);
    S *= size / std::max(S.norm(), 1e-300);
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const Mat E = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                  es.eigenvectors().transpose();
    inverses.push_back(spd_inverse(symmetrize(R * E * R)));
  }
  const VectorIntegral v = second_moments(f, spec);
  // value(P) = tr(M_P^{-1} S) / (2 J); entries 1.. are gaps to the candidate.
  const Estimate e = v.derive([&](const Vec& s) {
    const Mat Smom = unpack(s, 1, n);
    Vec out(trials + 1);
    out(0) = (inverses[0] * Smom).trace() / (2.0 * s(0));
    for (int t = 1; t <= trials; ++t) out(t) = (inverses[t] * Smom).trace() / (2.0 * s(0)) - out(0);
    return out;
  });
  OptimalityReport r;
  r.trials = trials;
  r.candidate_value = e.value(0);
  r.min_gap = std::numeric_limits<double>::infinity();
  r.max_gap = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= trials; ++t) {
    if (e.value(t) < -3.0 * e.error(t)) ++r.violations;
    if (e.value(t) < r.min_gap) {
      r.min_gap = e.value(t);
      r.min_gap_error = e.error(t);
    }
    r.max_gap = std::max(r.max_gap, e.value(t));
  }
  return r;
}

}  // namespace lyz
