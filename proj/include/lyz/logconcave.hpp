#pragma once

#include "lyz/convex_function.hpp"
#include "lyz/integration.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lyz {

// f = e^{-phi}. Class A membership (proper, convex, coercive potential) is
// declared by the potential's variant; functions outside it are
// representable but refuse mass and variation operations.
class LogConcaveFunction {
 public:
  explicit LogConcaveFunction(ConvexFunction potential);

  const ConvexFunction& potential() const { return phi_; }
  int dim() const { return phi_.dim(); }
  // e^{-phi(x)}; 0 outside dom(phi).
  double operator()(const Vec& x) const;
  bool class_a() const { return class_a_; }
  std::string describe() const { return phi_.describe(); }
  // Hash of the potential's values at fixed probe points.
  std::string fingerprint() const;

  // Write-once mass cache keyed by the spec fingerprint.
  std::optional<IntegralResult> cached_mass(const IntegrationSpec& spec) const;
  void store_mass(const IntegrationSpec& spec, const IntegralResult& r) const;

 private:
  struct Cache;
  ConvexFunction phi_;
  bool class_a_ = true;
  std::shared_ptr<Cache> cache_;
};

// gamma_T(x) = e^{-|T x|^2 / 2}; potential Quadratic(T^T T).
class GaussianFunction {
 public:
  explicit GaussianFunction(Mat T);
  static GaussianFunction standard(int n);
  // Gaussian with T^T T = M, T the principal square root.
  static GaussianFunction from_matrix(const Mat& M);

  int dim() const { return static_cast<int>(T_.rows()); }
  const Mat& T() const { return T_; }
  Mat M() const { return T_.transpose() * T_; }
  // (2 pi)^{n/2} / |det T|.
  double mass() const;
  LogConcaveFunction function() const;

 private:
  Mat T_;
};

// h_f = phi*.
ConvexFunction support_function(const LogConcaveFunction& f);

// f° = e^{-phi*}; flagged outside class A when phi* is not coercive.
LogConcaveFunction polar_function(const LogConcaveFunction& f);

// alpha.f (+) beta.g = e^{-[(phi alpha) box (psi beta)]}.
LogConcaveFunction minkowski_combine(double alpha, const LogConcaveFunction& f, double beta,
                                     const LogConcaveFunction& g);

// f o T.
LogConcaveFunction compose(const LogConcaveFunction& f, const Mat& T);

IntegralResult integrate_rn(const std::function<double(const Vec&)>& integrand, const LogConcaveFunction& weight,
                            const IntegrationSpec& spec);

// J(f) = int f dx.
IntegralResult total_mass(const LogConcaveFunction& f, const IntegrationSpec& spec);

// delta J(f, g) = int h_g(grad phi(x)) f(x) dx. Throws NotIntegrable when
// h_g is infinite on the support of mu_f.
IntegralResult first_variation(const LogConcaveFunction& f, const LogConcaveFunction& g,
                               const IntegrationSpec& spec);

// delta J(f, g) / J(f), error by joint propagation.
IntegralResult normalized_first_variation(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                          const IntegrationSpec& spec);

// (J(f (+) t.g) - J(f)) / t at each t, with the Richardson extrapolation of
// the first two and the pushforward value for comparison.
struct DifferenceQuotient {
  std::vector<double> t;
  std::vector<double> quotient;
  double richardson = 0.0;
  double pushforward = 0.0;
  double pushforward_error = 0.0;
};
DifferenceQuotient first_variation_quotient(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                            const IntegrationSpec& spec,
                                            const std::vector<double>& ts = {1e-2, 1e-3});

void require_class_a(const LogConcaveFunction& f, const std::string& what);

}  // namespace lyz
