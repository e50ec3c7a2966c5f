#include "lyz/legendre.hpp"

#include "lyz/error.hpp"

namespace lyz {

ConvexFunction legendre_conjugate(const ConvexFunction& phi) {
  using Kind = ConvexFunction::Kind;
  const int n = phi.dim();
  switch (phi.kind()) {
    case Kind::kQuadratic:
      return ConvexFunction::quadratic(spd_inverse(phi.quadratic_matrix()));
    case Kind::kGaugePower: {
      const double p = phi.gauge_exponent();
      const ConvexBody polar = phi.gauge_body().polar();
      if (p == 1.0) return ConvexFunction::indicator(polar);
      return ConvexFunction::gauge_power(polar, p / (p - 1.0));
    }
    case Kind::kLinearComposed: {
      const Mat tinv_t = phi.transform().inverse().transpose();
      return compose(legendre_conjugate(phi.base()), tinv_t);
    }
    case Kind::kSampledGrid:
      return ConvexFunction::grid(phi.grid().conjugate());
    case Kind::kInfConv:
      return sum(legendre_conjugate(phi.left()), legendre_conjugate(phi.right()));
    case Kind::kScalarRight:
      return scalar_left_mult(legendre_conjugate(phi.base()), phi.scalar());
    case Kind::kScalarLeft:
      return scalar_right_mult(legendre_conjugate(phi.base()), phi.scalar());
    case Kind::kSum:
      return inf_convolution(legendre_conjugate(phi.left()), legendre_conjugate(phi.right()));
    case Kind::kIndicator:
      if (!phi.indicator_body()) return ConvexFunction::zero(n);
      return ConvexFunction::gauge_power(phi.indicator_body()->polar(), 1.0);
    case Kind::kZero:
      return ConvexFunction::indicator_origin(n);
  }
  throw DomainError("legendre_conjugate: unsupported function");
}

double fenchel_young_gap(const ConvexFunction& phi, const Vec& x, const Vec& y) {
  const ExtendedReal fx = phi(x);
  const ExtendedReal fy = legendre_conjugate(phi)(y);
  if (fx.is_infinite() || fy.is_infinite()) throw DomainError("fenchel_young_gap: infinite value");
  return fx.value() + fy.value() - x.dot(y);
}

}  // namespace lyz
