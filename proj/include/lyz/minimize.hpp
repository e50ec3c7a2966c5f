#pragma once

#include "lyz/linalg.hpp"

#include <functional>

namespace lyz {

struct MinimizeResult {
  Vec argmin;
  double value = 0.0;
  int evaluations = 0;
};

// Derivative-free Nelder-Mead on R^n. Non-finite objective values are
// treated as +inf. Stops when the simplex value spread falls below
// f_tol * (1 + |f_best|) and its diameter below x_tol.
MinimizeResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& start, double step,
                           double f_tol = 1e-13, double x_tol = 1e-11, int max_evals = 4000);

}  // namespace lyz
