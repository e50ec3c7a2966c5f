#include "lyz/convex_function.hpp"
#include "lyz/error.hpp"
#include "lyz/sampled_grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace lyz;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::vector<double> linspace(double a, double b, int m) {
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = a + (b - a) * i / (m - 1);
  return out;
}

// O(|x| |y|) oracle.
double naive_sup(const std::vector<double>& x, const std::vector<double>& v, double y) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::isfinite(v[i])) best = std::max(best, x[i] * y - v[i]);
  return best;
}

SampledGrid quadratic_grid(const Mat& A, double half, int m) {
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(m) * m);
  const auto ax = linspace(-half, half, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Vec x = v2(ax[i], ax[j]);
      vals.push_back(0.5 * x.dot(A * x));
    }
  return SampledGrid(v2(-half, -half), v2(half, half), {m, m}, vals);
}

}  // namespace

TEST(DiscreteLegendre, OneDimensionalMatchesNaive) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3 + trial % 40;
    std::vector<double> x = linspace(-2.0, 2.0, m), v(m);
    // Arbitrary data, convex or not; some entries infinite.
    for (int i = 0; i < m; ++i) v[i] = (i % 7 == 3 && m > 5) ? std::numeric_limits<double>::infinity() : U(rng);
    std::vector<double> y(25);
    for (auto& t : y) t = U(rng);
    std::sort(y.begin(), y.end());
    const auto out = discrete_legendre_1d(x, v, y);
    for (std::size_t j = 0; j < y.size(); ++j) EXPECT_NEAR(out[j], naive_sup(x, v, y[j]), 1e-12);
  }
}

TEST(DiscreteLegendre, SeparableMatchesNaive) {
  const auto ax = linspace(-1.0, 1.0, 9), ay = linspace(-2.0, 2.0, 7);
  std::vector<double> vals;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 7; ++j) vals.push_back(U(rng));
  const auto dx = linspace(-3.0, 3.0, 9), dy = linspace(-1.0, 1.0, 7);
  const auto out = discrete_legendre_nd({ax, ay}, vals, {dx, dy});
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 7; ++b) {
      double best = -1e300;
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 7; ++j) best = std::max(best, ax[i] * dx[a] + ay[j] * dy[b] - vals[i * 7 + j]);
      EXPECT_NEAR(out[a * 7 + b], best, 1e-12);
    }
}

TEST(SampledGrid, ConvexInputIsKept) {
  const SampledGrid g = quadratic_grid(Mat::Identity(2, 2), 2.0, 21);
  EXPECT_TRUE(g.input_was_convex());
  EXPECT_NEAR(g.evaluate(v2(0.2, 0.4)).value(), 0.5 * (0.04 + 0.16), 1e-2);
  EXPECT_NEAR(g.evaluate(v2(1.0, -1.0)).value(), 1.0, 1e-12);  // lattice node
}

TEST(SampledGrid, NonConvexInputIsConvexified) {
  std::vector<double> vals = {1.0, 3.0, 0.0, 1.0, 2.0};  // bump at index 1
  const SampledGrid g(Vec::Constant(1, -2.0), Vec::Constant(1, 2.0), {5}, vals);
  EXPECT_FALSE(g.input_was_convex());
  EXPECT_NEAR(g.convexity_defect(), 2.5, 1e-12);  // envelope at -1 is 0.5
  EXPECT_NEAR(g.values()[1], 0.5, 1e-12);
  // Result is convex: second differences non-negative.
  for (int i = 1; i + 1 < 5; ++i) EXPECT_GE(g.values()[i - 1] - 2 * g.values()[i] + g.values()[i + 1], -1e-12);
}

TEST(SampledGrid, OutsideBoxIsInfinite) {
  const SampledGrid g = quadratic_grid(Mat::Identity(2, 2), 1.0, 11);
  EXPECT_TRUE(g.evaluate(v2(1.5, 0.0)).is_infinite());
  const ConvexFunction phi = ConvexFunction::grid(g);
  EXPECT_TRUE(phi(v2(0.0, -1.01)).is_infinite());
  EXPECT_TRUE(phi(v2(0.0, 0.0)).is_finite());
}

TEST(SampledGrid, GradientOfQuadratic) {
  Mat A(2, 2);
  A << 2.0, 0.5, 0.5, 1.0;
  const SampledGrid g = quadratic_grid(A, 2.0, 81);
  const Vec x = v2(0.3, -0.45);
  EXPECT_LT((g.gradient(x) - A * x).norm(), 1e-2);
}

TEST(SampledGrid, ConjugateOfQuadraticGrid) {
  // Dense lattice of the quadratic with A = 0.5 I; conjugate is |y|^2.
  const SampledGrid g = quadratic_grid(0.5 * Mat::Identity(2, 2), 8.0, 257);
  const SampledGrid c = g.conjugate();
  for (double a : {-1.5, -0.3, 0.0, 0.7, 1.9})
    for (double b : {-1.0, 0.25, 1.4}) EXPECT_NEAR(c.evaluate(v2(a, b)).value(), a * a + b * b, 1e-3);
}

TEST(SampledGrid, RejectsBadShapes) {
  EXPECT_THROW(SampledGrid(Vec::Constant(1, 0.0), Vec::Constant(1, 1.0), {3}, {1.0, 2.0}), DomainError);
  EXPECT_THROW(SampledGrid(Vec::Constant(1, 1.0), Vec::Constant(1, 0.0), {2}, {1.0, 2.0}), DomainError);
}
