#include "lyz/sphere.hpp"

#include "lyz/constants.hpp"
#include "lyz/error.hpp"

#include <cmath>
#include <numbers>

namespace lyz {

SphereRule sphere_rule(int n, int count) {
  if (count < 3) throw DomainError("sphere_rule: need at least 3 points");
  SphereRule rule;
  rule.points.resize(count, n);
  if (n == 2) {
    const double step = 2.0 * std::numbers::pi / count;
    for (int k = 0; k < count; ++k) {
      const double t = (k + 0.5) * step;
      rule.points(k, 0) = std::cos(t);
      rule.points(k, 1) = std::sin(t);
    }
  } else if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * k;
      rule.points(k, 0) = r * std::cos(t);
      rule.points(k, 1) = r * std::sin(t);
      rule.points(k, 2) = z;
    }
  } else {
    throw DomainError("sphere_rule: only n = 2 and n = 3 are supported");
  }
  rule.weights = Vec::Constant(count, constants::sphere_area(n) / count);
  return rule;
}

}  // namespace lyz
