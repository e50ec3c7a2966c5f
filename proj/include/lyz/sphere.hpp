#pragma once

#include "lyz/linalg.hpp"

namespace lyz {

// Quadrature rule on S^{n-1} for the unnormalized surface measure. n = 2
// uses the periodic trapezoid rule at half-step offsets; n = 3 uses a
// Fibonacci lattice with equal weights.
struct SphereRule {
  Mat points;   // count x n, unit rows
  Vec weights;  // sums to the area of S^{n-1}
};

SphereRule sphere_rule(int n, int count);

}  // namespace lyz
