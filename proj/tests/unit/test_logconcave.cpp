#include "lyz/constants.hpp"
#include "lyz/error.hpp"
#include "lyz/legendre.hpp"
#include "lyz/logconcave.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lyz;

namespace {

const double kPi = std::numbers::pi;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Mat random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N;
  Mat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = N(rng);
  return G * G.transpose() / n + 0.5 * Mat::Identity(n, n);
}

LogConcaveFunction gauge_fn(const ConvexBody& K, double p) {
  return LogConcaveFunction(ConvexFunction::gauge_power(K, p));
}

}  // namespace

TEST(LogConcave, SupportFunctionOfGaussians) {
  const LogConcaveFunction g = GaussianFunction::standard(2).function();
  const ConvexFunction h = support_function(g);
  EXPECT_LT(rel_frobenius(h.quadratic_matrix(), Mat::Identity(2, 2)), 1e-15);
  Mat T(2, 2);
  T << 2.0, 1.0, 0.0, 1.0;
  const ConvexFunction hT = support_function(GaussianFunction(T).function());
  EXPECT_LT(rel_frobenius(hT.quadratic_matrix(), (T.transpose() * T).inverse()), 1e-14);
}

TEST(LogConcave, SupportFunctionOfGaugeIsPolarIndicator) {
  const ConvexFunction h = support_function(gauge_fn(ConvexBody::cube(2, 1.0), 1.0));
  EXPECT_EQ(h(v2(0.4, 0.5)), ExtendedReal(0.0));  // inside the cross polytope
  EXPECT_TRUE(h(v2(0.6, 0.5)).is_infinite());
}

TEST(LogConcave, PolarFunction) {
  Mat T(2, 2);
  T << 1.5, 0.2, 0.0, 0.8;
  const LogConcaveFunction f = GaussianFunction(T).function();
  const LogConcaveFunction fp = polar_function(f);
  EXPECT_LT(rel_frobenius(fp.potential().quadratic_matrix(), (T.transpose() * T).inverse()), 1e-14);
  const LogConcaveFunction fpp = polar_function(fp);
  for (const Vec& x : {v2(0.3, 0.1), v2(-1.0, 2.0)}) EXPECT_NEAR(fpp(x), f(x), 1e-14);
  const LogConcaveFunction gp = polar_function(gauge_fn(ConvexBody::cube(2, 1.0), 1.0));
  EXPECT_FALSE(gp.class_a());
  EXPECT_THROW(total_mass(gp, IntegrationSpec::quadrature()), NotIntegrable);
}

TEST(LogConcave, MinkowskiCombineGaussians) {
  const LogConcaveFunction g = GaussianFunction::standard(2).function();
  const LogConcaveFunction s = minkowski_combine(1.0, g, 1.0, g);
  // h = |y|^2, so the potential is |x|^2 / 4.
  for (const Vec& x : {v2(1.0, 0.0), v2(0.3, -2.0)}) EXPECT_NEAR(s.potential()(x).value(), x.squaredNorm() / 4.0, 1e-12);
  EXPECT_THROW(minkowski_combine(0.0, g, 1.0, g), DomainError);
  EXPECT_THROW(minkowski_combine(1.0, g, -1.0, g), DomainError);
}

TEST(LogConcaveProperty, SupportAdditivity) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.1, 4.0);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 2;
    const LogConcaveFunction f = GaussianFunction::from_matrix(random_spd(rng, n)).function();
    const LogConcaveFunction g = GaussianFunction::from_matrix(random_spd(rng, n)).function();
    const double a = U(rng), b = U(rng);
    const ConvexFunction h = support_function(minkowski_combine(a, f, b, g));
    const ConvexFunction hf = support_function(f), hg = support_function(g);
    for (int k = 0; k < 5; ++k) {
      Vec y(n);
      for (int i = 0; i < n; ++i) y(i) = N(rng);
      const double expect = a * hf(y).value() + b * hg(y).value();
      EXPECT_NEAR(h(y).value(), expect, 1e-9 * (1.0 + expect));
    }
  }
}

TEST(LogConcave, TotalMassExamples) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  EXPECT_NEAR(total_mass(GaussianFunction::standard(2).function(), spec).value, 2.0 * kPi, 1e-9);
  EXPECT_NEAR(total_mass(gauge_fn(ConvexBody::cube(2, 1.0), 2.0), spec).value, 8.0, 1e-8);
  Mat T(2, 2);
  T << 1.0, 0.5, 0.0, 2.0;
  EXPECT_NEAR(total_mass(GaussianFunction(T).function(), spec).value, 2.0 * kPi / 2.0, 1e-9);
  EXPECT_NEAR(GaussianFunction(T).mass(), kPi, 1e-14);
}

TEST(LogConcave, GaugeMassFormula) {
  // J = p^{n/p} Gamma(n/p + 1) V(K), with V(K) from an independent vertex
  // triangulation.
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  for (double p : {1.0, 3.0})
    for (const ConvexBody& K : {ConvexBody::regular_polygon(5, 1.0, 0.1), ConvexBody::cross_polytope(3, 1.0)}) {
      const int n = K.dim();
      const double exact = std::pow(p, n / p) * std::tgamma(n / p + 1.0) * K.volume_from_vertices();
      const IntegralResult r = total_mass(gauge_fn(K, p), spec);
      EXPECT_NEAR(r.value / exact, 1.0, n == 2 ? 1e-8 : 1e-5);
    }
}

TEST(LogConcave, MassIsCached) {
  const LogConcaveFunction g = gauge_fn(ConvexBody::regular_polygon(6), 2.0);
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  EXPECT_FALSE(g.cached_mass(spec).has_value());
  const IntegralResult r = total_mass(g, spec);
  ASSERT_TRUE(g.cached_mass(spec).has_value());
  EXPECT_EQ(g.cached_mass(spec)->value, r.value);
  EXPECT_FALSE(g.cached_mass(IntegrationSpec::monte_carlo()).has_value());
}

TEST(LogConcave, FirstVariationExamples) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const LogConcaveFunction g = GaussianFunction::standard(2).function();
  EXPECT_NEAR(first_variation(g, g, spec).value, 2.0 * kPi, 1e-8);
  EXPECT_NEAR(normalized_first_variation(g, g, spec).value, 1.0, 1e-9);
  // T^T T = (n/2) I = I in the plane.
  const LogConcaveFunction gt = GaussianFunction(Mat::Identity(2, 2)).function();
  EXPECT_NEAR(normalized_first_variation(g, gt, spec).value, 1.0, 1e-9);
  // Linear scaling in the second slot.
  const LogConcaveFunction f = gauge_fn(ConvexBody::regular_polygon(6), 2.0);
  const LogConcaveFunction g3 = LogConcaveFunction(scalar_right_mult(g.potential(), 3.0));
  EXPECT_NEAR(normalized_first_variation(f, g3, spec).value, 3.0 * normalized_first_variation(f, g, spec).value,
              1e-7);
}

TEST(LogConcave, FirstVariationAgainstSecondMoment) {
  // h_gamma(grad phi) = |grad phi|^2 / 2 for phi = |x|_K^2 / 2; integrate the
  // gradient directly as an independent route.
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const ConvexBody K = ConvexBody::regular_polygon(5, 1.0, 0.2);
  const LogConcaveFunction f = gauge_fn(K, 2.0);
  const double direct =
      integrate_rn([&](const Vec& x) { return 0.5 * gradient(f.potential(), x).squaredNorm(); }, f, spec).value;
  EXPECT_NEAR(first_variation(f, GaussianFunction::standard(2).function(), spec).value, direct,
              1e-7 * std::abs(direct));
}

TEST(LogConcave, DifferenceQuotientConvergesGaussian) {
  // Gaussian pairs combine in closed form, so the quotient is limited only by
  // its first-order term.
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  Mat A(2, 2), B(2, 2);
  A << 2.0, 0.3, 0.3, 0.7;
  B << 1.5, -0.4, -0.4, 1.0;
  const LogConcaveFunction f = GaussianFunction::from_matrix(A).function();
  const LogConcaveFunction g = GaussianFunction::from_matrix(B).function();
  const DifferenceQuotient q = first_variation_quotient(f, g, spec);
  // Closed form: delta J = J(f) tr(A B^{-1}) / 2.
  const double exact = 2.0 * kPi / std::sqrt(A.determinant()) * 0.5 * (A * B.inverse()).trace();
  EXPECT_NEAR(q.pushforward / exact, 1.0, 1e-9);
  const double e0 = std::abs(q.quotient[0] - exact), e1 = std::abs(q.quotient[1] - exact);
  EXPECT_NEAR(e1 / e0, 0.1, 0.02);
  EXPECT_LT(std::abs(q.richardson - exact), 1e-5 * exact);
}

TEST(LogConcave, DifferenceQuotientConvergesPolygon) {
  // Numerical infimal convolution: coarse budget and larger steps.
  const IntegrationSpec spec = IntegrationSpec::quadrature(1u << 10);
  const LogConcaveFunction f = gauge_fn(ConvexBody::regular_polygon(6), 2.0);
  const LogConcaveFunction g = GaussianFunction::standard(2).function();
  const DifferenceQuotient q = first_variation_quotient(f, g, spec, {0.2, 0.1});
  const double e0 = std::abs(q.quotient[0] - q.pushforward), e1 = std::abs(q.quotient[1] - q.pushforward);
  EXPECT_LT(e1, 0.7 * e0);
  EXPECT_LT(std::abs(q.richardson - q.pushforward), 0.5 * e1);
}

TEST(LogConcave, LinearityOverGaussianFamily) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const LogConcaveFunction f = gauge_fn(ConvexBody::cube(2, 1.0), 3.0);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 5; ++t) {
    const LogConcaveFunction ga = GaussianFunction::from_matrix(random_spd(rng, 2)).function();
    const LogConcaveFunction gb = GaussianFunction::from_matrix(random_spd(rng, 2)).function();
    const double a = 0.5 + t, b = 2.0 / (1 + t);
    const double lhs = first_variation(f, minkowski_combine(a, ga, b, gb), spec).value;
    const double rhs = a * first_variation(f, ga, spec).value + b * first_variation(f, gb, spec).value;
    EXPECT_NEAR(lhs, rhs, 1e-8 * std::abs(rhs));
  }
}

TEST(LogConcave, FirstVariationRefusesUnboundedSupport) {
  // h of e^{-|x|_K} is +inf off K°, while grad phi ranges over the boundary
  // of K°; an indicator of a smaller body cuts into that range.
  const LogConcaveFunction f = GaussianFunction::standard(2).function();
  const LogConcaveFunction g = gauge_fn(ConvexBody::cube(2, 1.0), 1.0);
  EXPECT_THROW(first_variation(f, g, IntegrationSpec::quadrature()), NotIntegrable);
}

TEST(LogConcaveProperty, MassPositivity) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> P(1.0, 6.0);
  for (int t = 0; t < 40; ++t) {
    const LogConcaveFunction f = t % 2 == 0 ? GaussianFunction::from_matrix(random_spd(rng, 2)).function()
                                            : gauge_fn(ConvexBody::regular_polygon(3 + t % 5, 1.0, 0.1 * t), P(rng));
    EXPECT_GT(total_mass(f, IntegrationSpec::quadrature(1u << 14)).value, 0.0);
  }
}
