#pragma once

#include "lyz/linalg.hpp"

#include <string>
#include <vector>

namespace lyz {

// Level sets {e^{-x^T A x} = t} of a 2-D Gaussian-type function drawn as
// ellipses, one per level.
std::string svg_level_sets(const Mat& A, const std::vector<double>& levels, const std::string& title);

// Polar profile r(u) = h(u) of a 2-D support function tabulated at
// `directions` (D x 2).
std::string svg_polar_profile(const Mat& directions, const Vec& h, const std::string& title);

}  // namespace lyz
