#pragma once

#include <cmath>
#include <numbers>

namespace lyz::constants {

// Volume of the unit ball in R^n.
inline double omega(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// Surface measure of S^{n-1}: n * omega_n.
inline double sphere_area(int n) { return n * omega(n); }

// Mass of the standard Gaussian e^{-|x|^2/2}: (2 pi)^{n/2}.
inline double gaussian_mass(int n) { return std::pow(2.0 * std::numbers::pi, 0.5 * n); }

inline double gamma_fn(double x) { return std::tgamma(x); }

}  // namespace lyz::constants
