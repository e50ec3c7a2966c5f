#include "lyz/constants.hpp"
#include "lyz/convex_function.hpp"
#include "lyz/error.hpp"
#include "lyz/integration.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lyz;

namespace {

const double kPi = std::numbers::pi;

ConvexFunction standard_gaussian(int n) { return ConvexFunction::quadratic(Mat::Identity(n, n)); }

}  // namespace

TEST(GaussLegendre, ExactForPolynomials) {
  std::vector<double> x, w;
  gauss_legendre(6, x, w);
  // Degree <= 11 integrates exactly on [-1, 1].
  for (int k = 0; k <= 11; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
    const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(s, exact, 1e-14) << k;
  }
}

TEST(IntegrateBox, SmoothIntegrand) {
  Vec lo(2), hi(2), focus = Vec::Zero(2);
  lo << 0.0, 0.0;
  hi << 1.0, 2.0;
  const IntegralResult r =
      integrate_box([](const Vec& x) { return std::exp(x(0)) * std::cos(x(1)); }, lo, hi, focus, 4096);
  EXPECT_NEAR(r.value, (std::exp(1.0) - 1.0) * std::sin(2.0), 1e-12);
  EXPECT_LT(r.stderr_or_bound, 1e-8);
}

TEST(IntegrateSphere, Moments) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  EXPECT_NEAR(integrate_sphere([](const Vec&) { return 1.0; }, 2, spec).value, 2.0 * kPi, 1e-12);
  EXPECT_NEAR(integrate_sphere([](const Vec& u) { return u(0) * u(0); }, 2, spec).value, kPi, 1e-12);
  EXPECT_NEAR(integrate_sphere([](const Vec&) { return 1.0; }, 3, spec).value, 4.0 * kPi, 1e-3);
  EXPECT_NEAR(integrate_sphere([](const Vec& u) { return u(2) * u(2); }, 3, spec).value, 4.0 * kPi / 3.0, 1e-3);
}

TEST(IntegrateRn, GaussianMassAndMomentsQuadrature) {
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  for (int n : {2, 3}) {
    const auto mass = integrate_rn([](const Vec&) { return 1.0; }, standard_gaussian(n), spec);
    EXPECT_NEAR(mass.value / constants::gaussian_mass(n), 1.0, n == 2 ? 1e-10 : 1e-6);
    EXPECT_FALSE(mass.spec_fingerprint.empty());
    const auto m2 = integrate_rn([](const Vec& x) { return x(0) * x(0); }, standard_gaussian(n), spec);
    EXPECT_NEAR(m2.value / constants::gaussian_mass(n), 1.0, n == 2 ? 1e-10 : 1e-6);
  }
}

TEST(IntegrateRn, GaugePowerMass) {
  // int e^{-|x|_K^p / p} dx = p^{n/p} Gamma(n/p + 1) V(K).
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const ConvexBody H = ConvexBody::regular_polygon(6, 1.0, 0.3);
  for (double p : {1.0, 1.5, 2.0, 5.0}) {
    const auto r = integrate_rn([](const Vec&) { return 1.0; }, ConvexFunction::gauge_power(H, p), spec);
    const double exact = std::pow(p, 2.0 / p) * std::tgamma(2.0 / p + 1.0) * H.volume();
    EXPECT_NEAR(r.value / exact, 1.0, 1e-8) << p;
  }
}

TEST(IntegrateRn, ComposedPotentialChangesVariables) {
  Mat T(2, 2);
  T << 2.0, 0.3, -0.1, 0.7;
  const IntegrationSpec spec = IntegrationSpec::quadrature();
  const auto r = integrate_rn([](const Vec&) { return 1.0; }, compose(standard_gaussian(2), T), spec);
  EXPECT_NEAR(r.value, 2.0 * kPi / std::abs(T.determinant()), 1e-8);
}

TEST(IntegrateRn, MonteCarloErrorIsCalibrated) {
  // z-scores across independent seeds: most within 3 sigma and the spread
  // of order one.
  const ConvexFunction phi = ConvexFunction::gauge_power(ConvexBody::cube(2, 1.0), 2.0);
  int within = 0;
  double sum_z2 = 0.0;
  const int seeds = 40;
  for (int s = 0; s < seeds; ++s) {
    const auto r = integrate_rn([](const Vec& x) { return x(0) * x(0); }, phi,
                                IntegrationSpec::monte_carlo(20000, 1000 + s));
    // Reference from the quadrature backend.
    static const double exact =
        integrate_rn([](const Vec& x) { return x(0) * x(0); }, phi, IntegrationSpec::quadrature()).value;
    const double z = (r.value - exact) / r.stderr_or_bound;
    within += std::abs(z) < 3.0;
    sum_z2 += z * z;
  }
  EXPECT_GE(within, 37);
  const double rms = std::sqrt(sum_z2 / seeds);
  EXPECT_GT(rms, 0.5);
  EXPECT_LT(rms, 1.6);
}

TEST(IntegrateRn, MonteCarloIsReproducible) {
  const IntegrationSpec spec = IntegrationSpec::monte_carlo(50000, 99);
  auto f = [](const Vec& x) { return std::cos(x(0)); };
  const auto a = integrate_rn(f, standard_gaussian(2), spec);
  const auto b = integrate_rn(f, standard_gaussian(2), spec);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.spec_fingerprint, b.spec_fingerprint);
  const auto c = integrate_rn(f, standard_gaussian(2), IntegrationSpec::monte_carlo(50000, 100));
  EXPECT_NE(a.value, c.value);
  EXPECT_NE(a.spec_fingerprint, c.spec_fingerprint);
}

TEST(IntegrateVector, DeriveRatioPropagatesError) {
  // Second moment over mass: exactly 1 for the standard Gaussian.
  const IntegrationSpec spec = IntegrationSpec::monte_carlo(200000, 5);
  const VectorIntegral vi = integrate_vector(
      standard_gaussian(2), 2,
      [](const PointEval& p, double* out) {
        out[0] = 1.0;
        out[1] = p.x(0) * p.x(0);
        return true;
      },
      spec, false);
  const Estimate e = vi.derive([](const Vec& v) { return Vec::Constant(1, v(1) / v(0)); });
  EXPECT_GT(e.error(0), 0.0);
  EXPECT_LT(std::abs(e.value(0) - 1.0), 4.0 * e.error(0));
  EXPECT_LT(e.error(0), 1e-2);
}

TEST(IntegrateVector, GradientMatchesPotential) {
  Mat A(2, 2);
  A << 2.0, 0.4, 0.4, 1.0;
  const ConvexFunction phi = ConvexFunction::quadratic(A);
  double worst = 0.0;
  integrate_vector(
      phi, 1,
      [&](const PointEval& p, double* out) {
        worst = std::max(worst, (p.grad - A * p.x).norm() / (1.0 + p.x.norm()));
        worst = std::max(worst, std::abs(p.phi - 0.5 * p.x.dot(A * p.x)));
        out[0] = 1.0;
        return true;
      },
      IntegrationSpec::monte_carlo(2000, 3));
  EXPECT_LT(worst, 1e-12);
}

TEST(Pushforward, GaussianIsFixed) {
  // grad phi = identity for the standard Gaussian, so mu_f = gamma dx.
  const PushforwardSamples s = pushforward_samples(standard_gaussian(2), IntegrationSpec::monte_carlo(200000, 4));
  double mass = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < s.w.size(); ++i) {
    mass += s.w(i);
    m2 += s.w(i) * s.y.col(i).squaredNorm();
  }
  EXPECT_NEAR(mass / (2.0 * kPi), 1.0, 1e-2);  // weights sum to an estimate of J
  EXPECT_NEAR(m2 / (4.0 * kPi), 1.0, 2e-2);
}

TEST(IntegrationSpec, Validation) {
  IntegrationSpec s;
  s.budget = 0;
  EXPECT_THROW(s.validate(), DomainError);
  s = IntegrationSpec{};
  s.truncation_radius = -1.0;
  EXPECT_THROW(s.validate(), DomainError);
  EXPECT_EQ(backend_from_name("mc"), Backend::kMonteCarlo);
  EXPECT_EQ(backend_name(Backend::kQuadrature), "quadrature");
  EXPECT_THROW(backend_from_name("simpson"), DomainError);
  EXPECT_EQ(IntegrationSpec::quadrature().fingerprint().size(), 16u);
}
