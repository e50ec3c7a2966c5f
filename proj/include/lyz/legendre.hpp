#pragma once

#include "lyz/convex_function.hpp"

namespace lyz {

// phi*(y) = sup_x <x, y> - phi(x). Closed forms map to closed forms
// (quadratic, gauge power, indicator, composition, scalings, sums and
// infimal convolutions); sampled grids use the discrete transform.
ConvexFunction legendre_conjugate(const ConvexFunction& phi);

// phi(x) + phi*(y) - <x, y> >= 0. Throws DomainError when either value is
// infinite.
double fenchel_young_gap(const ConvexFunction& phi, const Vec& x, const Vec& y);

}  // namespace lyz
