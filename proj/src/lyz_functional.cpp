#include "lyz/lyz_functional.hpp"

#include "lyz/error.hpp"

#include <cmath>
#include <sstream>

namespace lyz {

namespace {

constexpr double kDenominatorTol = 1e-12;
constexpr double kRejectFraction = 1e-3;

int tri_count(int n) { return n * (n + 1) / 2; }

}  // namespace

FunctionalEllipsoid lyz_matrix(const LogConcaveFunction& f, const IntegrationSpec& spec) {
  require_class_a(f, "lyz_matrix");
  const int n = f.dim();
  const int m = tri_count(n);
  FunctionalEllipsoid e;
  const ExtendedReal at0 = f.potential()(Vec::Zero(n));
  if (at0.is_infinite() || std::abs(at0.value()) > 1e-12) {
    std::ostringstream os;
    os << "potential at the origin is " << at0 << ", not 0; the denominator may change sign";
    e.warnings.push_back(os.str());
  }

  const VectorIntegral v = integrate_vector(
      f.potential(), 1 + m,
      [&](const PointEval& p, double* out) {
        out[0] = 1.0;
        const double xg = p.x.dot(p.grad);
        const double den = xg - p.phi;
        if (!(den > kDenominatorTol * (std::abs(xg) + std::abs(p.phi)))) return false;
        int c = 1;
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) out[c++] = p.grad(i) * p.grad(j) / den;
        return true;
      },
      spec);
  e.rejects = v.rejected;
  e.evaluations = v.evaluations;
  e.spec_fingerprint = v.spec_fingerprint;
  e.source_fingerprint = f.fingerprint();

  const double nodes = static_cast<double>(v.evaluations);
  if (nodes > 0 && static_cast<double>(v.rejected) > kRejectFraction * nodes) {
    std::ostringstream os;
    os << "lyz_matrix: denominator vanished at " << v.rejected << " of " << v.evaluations
       << " points; the support function of f vanishes on a non-negligible part of mu_f";
    throw DegenerateError(os.str());
  }

  const Estimate est = v.derive([&](const Vec& s) {
    Vec out(1 + m);
    out(0) = s(0);
    for (int i = 0; i < m; ++i) out(1 + i) = n / (4.0 * s(0)) * s(1 + i);
    return out;
  });
  e.J = est.value(0);
  e.J_error = est.error(0);
  if (!(e.J > 0.0) || !std::isfinite(e.J)) throw DegenerateError("lyz_matrix: non-positive mass estimate");
  Mat A(n, n), Aerr(n, n);
  int c = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++c) {
      A(i, j) = A(j, i) = est.value(c);
      Aerr(i, j) = Aerr(j, i) = est.error(c);
    }
  e.A.A = symmetrize(A);
  e.A.role = QuadraticForm::Role::kLogDensity;
  e.A_error = Aerr;
  e.min_eig = min_eigenvalue(e.A.A);
  if (!(e.min_eig > 1e-12 * std::max(1.0, e.A.A.trace()))) {
    e.degenerate = true;
    throw DegenerateError("lyz_matrix: A is not positive definite (mu_f concentrated on a subspace)");
  }
  return e;
}

double evaluate_gamma(const FunctionalEllipsoid& e, const Vec& x) {
  require_dim(x, static_cast<int>(e.A.A.rows()), "evaluate_gamma");
  return std::exp(-x.dot(e.A.A * x));
}

double support_of_polar(const FunctionalEllipsoid& e, const Vec& x) {
  require_dim(x, static_cast<int>(e.A.A.rows()), "support_of_polar");
  return x.dot(e.A.A * x);
}

double combined_relative_error(const Mat& a_err, const Mat& b_err, const Mat& reference) {
  return std::sqrt(a_err.squaredNorm() + b_err.squaredNorm()) / reference.norm();
}

EquivarianceReport check_equivariance(const LogConcaveFunction& f, const Mat& T, const IntegrationSpec& spec) {
  return check_equivariance(lyz_matrix(f, spec), f, T, spec);
}

EquivarianceReport check_equivariance(const FunctionalEllipsoid& ef, const LogConcaveFunction& f, const Mat& T,
                                      const IntegrationSpec& spec) {
  require_square(T, f.dim(), "check_equivariance");
  // Independent stream for f o T.
  IntegrationSpec other = spec;
  other.seed = spec.seed ^ 0x9e3779b97f4a7c15ull;
  const FunctionalEllipsoid eft = lyz_matrix(compose(f, T), other);
  EquivarianceReport r;
  r.lhs = eft.A.A;
  r.rhs = T.transpose() * ef.A.A * T;
  r.discrepancy = rel_frobenius(r.lhs, r.rhs);
  // Entrywise errors of A_f pushed through T^T (.) T in absolute value.
  const Mat At = T.cwiseAbs().transpose() * ef.A_error * T.cwiseAbs();
  r.error_bound = combined_relative_error(eft.A_error, At, r.rhs);
  r.pass = r.discrepancy <= 3.0 * r.error_bound + 1e-10;
  return r;
}

}  // namespace lyz
