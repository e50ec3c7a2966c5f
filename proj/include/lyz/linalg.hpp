#pragma once

#include <Eigen/Dense>

#include <string>

namespace lyz {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Throws DomainError unless m is square, symmetric to `tol` (relative) and
// has strictly positive eigenvalues.
void require_spd(const Mat& m, const std::string& what, double tol = 1e-12);
void require_square(const Mat& m, int n, const std::string& what);
void require_dim(const Vec& x, int n, const std::string& what);

bool is_symmetric(const Mat& m, double rel_tol = 1e-12);
Mat symmetrize(const Mat& m);

// Functions of a symmetric positive-definite matrix via its eigendecomposition.
Mat spd_sqrt(const Mat& m);
Mat spd_inv_sqrt(const Mat& m);
Mat spd_inverse(const Mat& m);
double min_eigenvalue(const Mat& symmetric);

// Relative Frobenius distance ||a - b|| / ||b||.
double rel_frobenius(const Mat& a, const Mat& b);

}  // namespace lyz
