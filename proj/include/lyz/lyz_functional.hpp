#pragma once

#include "lyz/body.hpp"
#include "lyz/logconcave.hpp"

#include <string>
#include <vector>

namespace lyz {

// Gamma_{-2} f(x) = e^{-x^T A x}.
struct FunctionalEllipsoid {
  QuadraticForm A;     // role kLogDensity
  Mat A_error;         // entrywise error (stderr or bound)
  double J = 0.0;      // J(f)
  double J_error = 0.0;
  double min_eig = 0.0;
  std::uint64_t rejects = 0;
  std::uint64_t evaluations = 0;
  bool degenerate = false;
  std::string source_fingerprint;
  std::string spec_fingerprint;
  std::vector<std::string> warnings;
};

// A = n / (4 J(f)) int grad phi grad phi^T / (<x, grad phi> - phi) f dx.
// Points where the denominator is below 1e-12 of its terms are rejected;
// more than 0.1% rejected throws DegenerateError, as does a non-positive A.
FunctionalEllipsoid lyz_matrix(const LogConcaveFunction& f, const IntegrationSpec& spec);

double evaluate_gamma(const FunctionalEllipsoid& e, const Vec& x);

// h of the polar of Gamma_{-2} f at x: x^T A x.
double support_of_polar(const FunctionalEllipsoid& e, const Vec& x);

struct EquivarianceReport {
  Mat lhs;  // A_{f o T}
  Mat rhs;  // T^T A_f T
  double discrepancy = 0.0;  // relative Frobenius
  double error_bound = 0.0;  // combined relative error
  bool pass = false;
};

// Computes A_{f o T} and T^T A_f T independently.
EquivarianceReport check_equivariance(const LogConcaveFunction& f, const Mat& T, const IntegrationSpec& spec);
// Same, reusing a computed A_f.
EquivarianceReport check_equivariance(const FunctionalEllipsoid& ef, const LogConcaveFunction& f, const Mat& T,
                                      const IntegrationSpec& spec);

// Relative Frobenius error propagated from entrywise errors of a and b.
double combined_relative_error(const Mat& a_err, const Mat& b_err, const Mat& reference);

}  // namespace lyz
