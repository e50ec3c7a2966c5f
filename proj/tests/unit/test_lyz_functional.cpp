#include "lyz/body.hpp"
#include "lyz/error.hpp"
#include "lyz/lyz_functional.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lyz;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Mat rotation(double a) {
  Mat R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

LogConcaveFunction gauge_fn(const ConvexBody& K, double p) {
  return LogConcaveFunction(ConvexFunction::gauge_power(K, p));
}

const Mat kHalf = 0.5 * Mat::Identity(2, 2);

}  // namespace

TEST(LyzMatrix, GaussianIsFixed) {
  const FunctionalEllipsoid e = lyz_matrix(GaussianFunction::standard(2).function(), IntegrationSpec::quadrature());
  EXPECT_LT(rel_frobenius(e.A.A, kHalf), 1e-6);
  EXPECT_FALSE(e.degenerate);
  EXPECT_NEAR(e.J, 2.0 * std::numbers::pi, 1e-9);
  Mat I3 = 0.5 * Mat::Identity(3, 3);
  EXPECT_LT(rel_frobenius(lyz_matrix(GaussianFunction::standard(3).function(), IntegrationSpec::quadrature()).A.A, I3),
            1e-5);
}

TEST(LyzMatrix, ComposedGaussian) {
  Mat T(2, 2);
  T << 1.2, 0.4, -0.3, 0.9;
  const LogConcaveFunction f = compose(GaussianFunction::standard(2).function(), T);
  const FunctionalEllipsoid e = lyz_matrix(f, IntegrationSpec::quadrature());
  EXPECT_LT(rel_frobenius(e.A.A, 0.5 * T.transpose() * T), 1e-6);
}

TEST(LyzMatrix, ScaledGaussian) {
  // gamma o (c I) has A = c^2 I / 2.
  for (double c : {0.5, 3.0}) {
    const LogConcaveFunction f = compose(GaussianFunction::standard(2).function(), c * Mat::Identity(2, 2));
    EXPECT_LT(rel_frobenius(lyz_matrix(f, IntegrationSpec::quadrature()).A.A, c * c * kHalf), 1e-6);
  }
}

TEST(LyzMatrix, SquaredGaugeMatchesBodyEllipsoid) {
  // A = Q / 2 where Q is the gauge-squared form of the body's LYZ ellipsoid
  // (facet-sum oracle).
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  EXPECT_LT(rel_frobenius(lyz_matrix(gauge_fn(ConvexBody::cube(2, 1.0), 2.0), spec).A.A, kHalf), 1e-6);
  Mat V(5, 2);
  V << 1.0, 0.0, 0.5, 1.2, -0.8, 0.9, -0.7, -0.6, 0.4, -1.1;
  const ConvexBody K = ConvexBody::from_vertices(V);
  const Mat Q = lyz_body_ellipsoid(K).A;
  EXPECT_LT(rel_frobenius(lyz_matrix(gauge_fn(K, 2.0), spec).A.A, 0.5 * Q), 1e-6);
}

TEST(LyzMatrix, MonteCarloWithinStderr) {
  const FunctionalEllipsoid e =
      lyz_matrix(gauge_fn(ConvexBody::regular_polygon(6), 2.0), IntegrationSpec::monte_carlo(400000, 3));
  const Mat Q = 0.5 * lyz_body_ellipsoid(ConvexBody::regular_polygon(6)).A;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EXPECT_GT(e.A_error(i, j), 0.0);
      EXPECT_LT(std::abs(e.A.A(i, j) - Q(i, j)), 4.0 * e.A_error(i, j) + 1e-12);
    }
}

TEST(LyzMatrix, NormPotentialIsDegenerate) {
  // For p = 1 the denominator <x, grad phi> - phi vanishes identically.
  EXPECT_THROW(lyz_matrix(gauge_fn(ConvexBody::cube(2, 1.0), 1.0), IntegrationSpec::quadrature(1u << 12)),
               DegenerateError);
}

TEST(LyzMatrix, RefusesOutsideClassA) {
  const LogConcaveFunction f(ConvexFunction::zero(2));
  EXPECT_THROW(lyz_matrix(f, IntegrationSpec::quadrature(1u << 12)), NotIntegrable);
}

TEST(LyzMatrix, EvaluateAndPolarSupport) {
  FunctionalEllipsoid e;
  e.A.A = kHalf;
  EXPECT_DOUBLE_EQ(evaluate_gamma(e, v2(0.0, 0.0)), 1.0);
  EXPECT_NEAR(evaluate_gamma(e, v2(0.6, 0.8)), std::exp(-0.5), 1e-15);
  double last = 1.0;
  for (int k = 1; k < 20; ++k) {
    const double v = evaluate_gamma(e, 0.2 * k * v2(0.3, -1.0));
    EXPECT_LE(v, last);
    last = v;
  }
  EXPECT_NEAR(support_of_polar(e, v2(1.0, 0.0)), 0.5, 1e-15);
  const Vec x = v2(0.7, -0.2);
  EXPECT_NEAR(support_of_polar(e, 2.0 * x), 4.0 * support_of_polar(e, x), 1e-15);
  EXPECT_GE(support_of_polar(e, x), 0.0);
}

TEST(Equivariance, ClosedFormGaussian) {
  Mat T = Mat::Zero(2, 2);
  T(0, 0) = 2.0;
  T(1, 1) = 1.0;
  const EquivarianceReport r =
      check_equivariance(GaussianFunction::standard(2).function(), T, IntegrationSpec::quadrature());
  Mat expect = Mat::Zero(2, 2);
  expect(0, 0) = 2.0;
  expect(1, 1) = 0.5;
  EXPECT_LT(rel_frobenius(r.lhs, expect), 1e-6);
  EXPECT_LT(rel_frobenius(r.rhs, expect), 1e-6);
  EXPECT_TRUE(r.pass);
}

TEST(Equivariance, IdentityAndRotation) {
  const LogConcaveFunction g = GaussianFunction::standard(2).function();
  const EquivarianceReport id = check_equivariance(g, Mat::Identity(2, 2), IntegrationSpec::quadrature());
  EXPECT_LT(id.discrepancy, 1e-12);
  const EquivarianceReport rot = check_equivariance(g, rotation(0.7), IntegrationSpec::quadrature());
  EXPECT_LT(rel_frobenius(rot.lhs, kHalf), 1e-6);
}

TEST(EquivarianceProperty, RandomTransformsOfPolygonGauge) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> N;
  const LogConcaveFunction f = gauge_fn(ConvexBody::regular_polygon(5, 1.0, 0.3), 3.0);
  const IntegrationSpec spec = IntegrationSpec::quadrature(1u << 16);
  const FunctionalEllipsoid ef = lyz_matrix(f, spec);
  for (int t = 0; t < 6; ++t) {
    Mat T(2, 2);
    do {
      for (int i = 0; i < 4; ++i) T(i / 2, i % 2) = N(rng);
    } while (std::abs(T.determinant()) < 0.3);
    const EquivarianceReport r = check_equivariance(ef, f, T, spec);
    EXPECT_LT(r.discrepancy, 1e-5);
    EXPECT_TRUE(r.pass);
  }
}
