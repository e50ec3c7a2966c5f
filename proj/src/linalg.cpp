#include "lyz/linalg.hpp"

#include "lyz/error.hpp"
#include "lyz/extended_real.hpp"

#include <cmath>
#include <limits>

namespace lyz {

void require_square(const Mat& m, int n, const std::string& what) {
  if (m.rows() != n || m.cols() != n) {
    throw DomainError(what + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                      " matrix, got " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
  }
}

void require_dim(const Vec& x, int n, const std::string& what) {
  if (x.size() != n) {
    throw DomainError(what + ": dimension mismatch (expected " + std::to_string(n) + ", got " +
                      std::to_string(x.size()) + ")");
  }
}

bool is_symmetric(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

void require_spd(const Mat& m, const std::string& what, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DomainError(what + ": matrix must be square");
  if (!m.allFinite()) throw DomainError(what + ": matrix has non-finite entries");
  if (!is_symmetric(m, tol)) throw DomainError(what + ": matrix is not symmetric");
  if (min_eigenvalue(symmetrize(m)) <= 0.0) {
    throw DomainError(what + ": matrix is not positive definite");
  }
}

double min_eigenvalue(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {
template <typename F>
Mat spd_function(const Mat& m, F f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
  if (es.eigenvalues().minCoeff() <= 0.0) throw DomainError("matrix is not positive definite");
  Vec d = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}
}  // namespace

Mat spd_sqrt(const Mat& m) {
  return spd_function(m, [](double v) { return std::sqrt(v); });
}
Mat spd_inv_sqrt(const Mat& m) {
  return spd_function(m, [](double v) { return 1.0 / std::sqrt(v); });
}
Mat spd_inverse(const Mat& m) {
  return symmetrize(spd_function(m, [](double v) { return 1.0 / v; }));
}

double rel_frobenius(const Mat& a, const Mat& b) { return (a - b).norm() / b.norm(); }

double ExtendedReal::value() const {
  if (infinite_) throw DomainError("value() on +infinity");
  return value_;
}

double ExtendedReal::as_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

std::ostream& operator<<(std::ostream& os, ExtendedReal a) {
  if (a.infinite_) return os << "+inf";
  return os << a.value_;
}

}  // namespace lyz
