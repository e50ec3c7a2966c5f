#include "lyz/constants.hpp"
#include "lyz/error.hpp"
#include "lyz/lyz_functional.hpp"
#include "lyz/slog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lyz;

namespace {

LogConcaveFunction gauge_fn(const ConvexBody& K, double p) {
  return LogConcaveFunction(ConvexFunction::gauge_power(K, p));
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(Slog, GaussianSolutions) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const SlogSolution s2 = solve_slog(GaussianFunction::standard(2).function(), spec);
  EXPECT_LT(rel_frobenius(s2.M, Mat::Identity(2, 2)), 1e-8);
  EXPECT_NEAR(s2.normalized_variation, 1.0, 1e-8);
  EXPECT_NEAR(s2.objective, 2.0 * std::numbers::pi, 1e-7);
  EXPECT_EQ(s2.problem, SlogProblem::kSlog);
  const SlogSolution s3 = solve_slog(GaussianFunction::standard(3).function(), spec);
  EXPECT_LT(rel_frobenius(s3.M, 1.5 * Mat::Identity(3, 3)), 1e-5);
}

TEST(Slog, CovarianceTransform) {
  Mat T0(2, 2);
  T0 << 1.3, 0.2, -0.5, 0.8;
  const LogConcaveFunction f = compose(GaussianFunction::standard(2).function(), T0);
  const SlogSolution s = solve_slog(f, IntegrationSpec::quadrature());
  EXPECT_LT(rel_frobenius(s.M, T0.transpose() * T0), 1e-7);
}

TEST(Slog, MatrixAgainstIndependentMoment) {
  // M = n / (2 J) int grad phi grad phi^T f, evaluated here by a plain
  // tensor rule on a box instead of the library's potential-adapted rule.
  const ConvexBody K = ConvexBody::regular_polygon(6, 1.0, 0.2);
  const LogConcaveFunction f = gauge_fn(K, 2.0);
  Vec lo = Vec::Constant(2, -9.0), hi = Vec::Constant(2, 9.0);
  Mat m = Mat::Zero(2, 2);
  double J = integrate_box([&](const Vec& x) { return f(x); }, lo, hi, Vec::Zero(2), 1u << 18).value;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m(i, j) = integrate_box(
                    [&](const Vec& x) {
                      if (x.norm() < 1e-12) return 0.0;
                      const Vec g = gradient(f.potential(), x);
                      return g(i) * g(j) * f(x);
                    },
                    lo, hi, Vec::Zero(2), 1u << 18)
                    .value;
  const Mat expect = (2.0 / (2.0 * J)) * m;
  EXPECT_LT(rel_frobenius(solve_slog(f, IntegrationSpec::quadrature()).M, expect), 1e-3);
}

TEST(Slog, ScaleGaussian) {
  const GaussianFunction g = GaussianFunction::standard(2);
  const GaussianFunction h = scale_gaussian(g, 2.0);
  EXPECT_LT(rel_frobenius(h.M(), 0.5 * Mat::Identity(2, 2)), 1e-15);
  // Same function as the right scalar multiple of the potential.
  const ConvexFunction r = scalar_right_mult(g.function().potential(), 2.0);
  const Vec x = v2(0.4, -1.2);
  EXPECT_NEAR(h.function().potential()(x).value(), r(x).value(), 1e-14);
  EXPECT_THROW(scale_gaussian(g, 0.0), DomainError);
}

TEST(Slog, SbarToSlogOnGaussian) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const LogConcaveFunction f = GaussianFunction::standard(2).function();
  const SlogSolution s = sbar_to_slog(f, GaussianFunction::standard(2), spec);
  EXPECT_LT(rel_frobenius(s.M, Mat::Identity(2, 2)), 1e-8);
  EXPECT_NEAR(s.normalized_variation, 1.0, 1e-8);
}

TEST(Slog, SlogToSbarOnGaussian) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const LogConcaveFunction f = GaussianFunction::standard(2).function();
  const SlogSolution s = slog_to_sbar(f, GaussianFunction::standard(2), spec);
  EXPECT_LT(rel_frobenius(s.M, Mat::Identity(2, 2)), 1e-8);
  EXPECT_NEAR(s.objective, constants::gaussian_mass(2), 1e-7);
  EXPECT_EQ(s.problem, SlogProblem::kSbarLog);
}

TEST(Slog, RoundTripOnPolygon) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const LogConcaveFunction f = gauge_fn(ConvexBody::regular_polygon(6), 2.0);
  const SlogSolution s = solve_slog(f, spec);
  EXPECT_NEAR(s.normalized_variation, 1.0, 1e-6);
  const SlogSolution bar = slog_to_sbar(f, s.gaussian, spec);
  EXPECT_NEAR(bar.objective, constants::gaussian_mass(2), 1e-6 * constants::gaussian_mass(2));
  // h of the output is (J(f) / delta J) h_{gamma_T}.
  const SlogSolution back = sbar_to_slog(f, bar.gaussian, spec);
  EXPECT_LT(rel_frobenius(back.M, s.M), 1e-6);
  EXPECT_NEAR(back.normalized_variation, 1.0, 1e-6);
}

TEST(Slog, OptimalityAndNegativeControl) {
  const IntegrationSpec spec = IntegrationSpec::quadrature(1u << 14);
  const LogConcaveFunction f = GaussianFunction::standard(2).function();
  const OptimalityReport ok = verify_optimality(f, GaussianFunction::standard(2), spec, 100);
  EXPECT_EQ(ok.trials, 100);
  EXPECT_EQ(ok.violations, 0);
  EXPECT_GE(ok.min_gap, -1e-9);
  Mat wrong = Mat::Identity(2, 2);
  wrong(0, 0) = 2.0;
  wrong /= std::sqrt(2.0);  // det 1: same mass as gamma
  const OptimalityReport bad = verify_optimality(f, GaussianFunction::from_matrix(wrong), spec, 100);
  EXPECT_GT(bad.violations, 0);
}

TEST(Slog, PerturbationGapShrinks) {
  // First-order stationarity: the gap is quadratic in the perturbation size.
  const IntegrationSpec spec = IntegrationSpec::quadrature(1u << 14);
  const LogConcaveFunction f = gauge_fn(ConvexBody::cube(2, 1.0), 2.0);
  const SlogSolution s = solve_slog(f, spec);
  const GaussianFunction cand = slog_to_sbar(f, s.gaussian, spec).gaussian;
  const double big = verify_optimality(f, cand, spec, 20, 0.2).max_gap;
  const double small = verify_optimality(f, cand, spec, 20, 0.02).max_gap;
  EXPECT_GT(big, 0.0);
  EXPECT_LT(small, 0.03 * big);
}
