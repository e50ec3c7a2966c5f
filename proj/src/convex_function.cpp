#include "lyz/convex_function.hpp"

#include "lyz/error.hpp"
#include "lyz/legendre.hpp"
#include "lyz/minimize.hpp"
#include "lyz/sphere.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lyz {

namespace detail {

struct Node {
  int n = 0;
  ConvexFunction::Kind kind = ConvexFunction::Kind::kZero;
  Mat A;                               // quadratic
  std::optional<ConvexBody> body;      // gauge power, indicator
  double p = 1.0;                      // gauge power
  std::optional<ConvexFunction> a, b;  // children
  Mat T, T_inv;                        // composition
  double alpha = 1.0;                  // scalings
  std::optional<SampledGrid> grid;
  std::optional<ConvexFunction> closed;  // inf-conv conjugate route
};

}  // namespace detail

using detail::Node;
using Kind = ConvexFunction::Kind;

namespace {

constexpr double kIndicatorTol = 1e-12;

std::shared_ptr<Node> make_node(int n, Kind kind) {
  auto node = std::make_shared<Node>();
  node->n = n;
  node->kind = kind;
  return node;
}

}  // namespace

int ConvexFunction::dim() const { return node_->n; }
ConvexFunction::Kind ConvexFunction::kind() const { return node_->kind; }

const Mat& ConvexFunction::quadratic_matrix() const {
  if (kind() != Kind::kQuadratic) throw DomainError("not a quadratic");
  return node_->A;
}
const ConvexBody& ConvexFunction::gauge_body() const {
  if (kind() != Kind::kGaugePower) throw DomainError("not a gauge power");
  return *node_->body;
}
double ConvexFunction::gauge_exponent() const {
  if (kind() != Kind::kGaugePower) throw DomainError("not a gauge power");
  return node_->p;
}
const ConvexFunction& ConvexFunction::base() const {
  if (kind() != Kind::kLinearComposed && kind() != Kind::kScalarRight && kind() != Kind::kScalarLeft)
    throw DomainError("function has no base");
  return *node_->a;
}
const Mat& ConvexFunction::transform() const {
  if (kind() != Kind::kLinearComposed) throw DomainError("not a composition");
  return node_->T;
}
double ConvexFunction::scalar() const {
  if (kind() != Kind::kScalarRight && kind() != Kind::kScalarLeft) throw DomainError("not a scaling");
  return node_->alpha;
}
const ConvexFunction& ConvexFunction::left() const {
  if (kind() != Kind::kInfConv && kind() != Kind::kSum) throw DomainError("not a binary node");
  return *node_->a;
}
const ConvexFunction& ConvexFunction::right() const {
  if (kind() != Kind::kInfConv && kind() != Kind::kSum) throw DomainError("not a binary node");
  return *node_->b;
}
const SampledGrid& ConvexFunction::grid() const {
  if (kind() != Kind::kSampledGrid) throw DomainError("not a sampled grid");
  return *node_->grid;
}
const std::optional<ConvexBody>& ConvexFunction::indicator_body() const {
  if (kind() != Kind::kIndicator) throw DomainError("not an indicator");
  return node_->body;
}
const std::optional<ConvexFunction>& ConvexFunction::inf_conv_closed_form() const {
  if (kind() != Kind::kInfConv) throw DomainError("not an infimal convolution");
  return node_->closed;
}

ConvexFunction ConvexFunction::quadratic(const Mat& A) {
  require_spd(A, "quadratic", 1e-10);
  auto node = make_node(static_cast<int>(A.rows()), Kind::kQuadratic);
  node->A = symmetrize(A);
  return ConvexFunction(node);
}

ConvexFunction ConvexFunction::gauge_power(const ConvexBody& K, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("gauge_power: exponent must be >= 1");
  auto node = make_node(K.dim(), Kind::kGaugePower);
  node->body = K;
  node->p = p;
  return ConvexFunction(node);
}

ConvexFunction ConvexFunction::composed(const ConvexFunction& base, const Mat& T) {
  require_square(T, base.dim(), "composed");
  Eigen::FullPivLU<Mat> lu(T);
  if (!lu.isInvertible()) throw DomainError("composed: matrix is singular");
  auto node = make_node(base.dim(), Kind::kLinearComposed);
  node->a = base;
  node->T = T;
  node->T_inv = lu.inverse();
  return ConvexFunction(node);
}

ConvexFunction ConvexFunction::grid(SampledGrid g) {
  auto node = make_node(g.dim(), Kind::kSampledGrid);
  node->grid = std::move(g);
  return ConvexFunction(node);
}

ConvexFunction ConvexFunction::indicator(const ConvexBody& K) {
  auto node = make_node(K.dim(), Kind::kIndicator);
  node->body = K;
  return ConvexFunction(node);
}

ConvexFunction ConvexFunction::indicator_origin(int n) {
  if (n < 1) throw DomainError("indicator_origin: dimension must be positive");
  return ConvexFunction(make_node(n, Kind::kIndicator));
}

ConvexFunction ConvexFunction::zero(int n) {
  if (n < 1) throw DomainError("zero: dimension must be positive");
  return ConvexFunction(make_node(n, Kind::kZero));
}

ExtendedReal ConvexFunction::operator()(const Vec& x) const {
  require_dim(x, dim(), "evaluate");
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::kQuadratic:
      return 0.5 * x.dot(nd.A * x);
    case Kind::kGaugePower: {
      const double g = nd.body->gauge(x);
      return nd.p == 1.0 ? g : std::pow(g, nd.p) / nd.p;
    }
    case Kind::kLinearComposed:
      return (*nd.a)(nd.T * x);
    case Kind::kSampledGrid:
      return nd.grid->evaluate(x);
    case Kind::kInfConv:
      if (nd.closed) return (*nd.closed)(x);
      return inf_convolution_direct(*nd.a, *nd.b, x);
    case Kind::kScalarRight:
      return nd.alpha * (*nd.a)(x / nd.alpha);
    case Kind::kScalarLeft:
      return nd.alpha * (*nd.a)(x);
    case Kind::kSum:
      return (*nd.a)(x) + (*nd.b)(x);
    case Kind::kIndicator:
      if (nd.body) return nd.body->gauge(x) <= 1.0 + kIndicatorTol ? ExtendedReal(0.0) : ExtendedReal::infinity();
      return x.norm() == 0.0 ? ExtendedReal(0.0) : ExtendedReal::infinity();
    case Kind::kZero:
      return 0.0;
  }
  return ExtendedReal::infinity();
}

ExtendedReal evaluate(const ConvexFunction& phi, const Vec& x) { return phi(x); }

std::optional<Vec> ConvexFunction::try_gradient(const Vec& x) const {
  require_dim(x, dim(), "gradient");
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::kQuadratic:
      return Vec(nd.A * x);
    case Kind::kGaugePower: {
      const double g = nd.body->gauge(x);
      if (g == 0.0) {
        if (nd.p > 1.0) return Vec(Vec::Zero(nd.n));
        return std::nullopt;
      }
      auto gg = nd.body->gauge_gradient(x);
      if (!gg) return std::nullopt;
      if (nd.p == 1.0) return gg;
      return Vec(std::pow(g, nd.p - 1.0) * *gg);
    }
    case Kind::kLinearComposed: {
      auto gb = nd.a->try_gradient(nd.T * x);
      if (!gb) return std::nullopt;
      return Vec(nd.T.transpose() * *gb);
    }
    case Kind::kSampledGrid: {
      for (int k = 0; k < nd.n; ++k)
        if (!(x(k) > nd.grid->lower()(k) && x(k) < nd.grid->upper()(k))) return std::nullopt;
      if (nd.grid->evaluate(x).is_infinite()) return std::nullopt;
      Vec g = nd.grid->gradient(x);
      if (!g.allFinite()) return std::nullopt;
      return g;
    }
    case Kind::kInfConv: {
      if (nd.closed) return nd.closed->try_gradient(x);
      Vec y;
      if (inf_convolution_direct(*nd.a, *nd.b, x, &y).is_infinite()) return std::nullopt;
      if (auto ga = nd.a->try_gradient(x - y)) return ga;
      return nd.b->try_gradient(y);
    }
    case Kind::kScalarRight:
      return nd.a->try_gradient(x / nd.alpha);
    case Kind::kScalarLeft: {
      auto g = nd.a->try_gradient(x);
      if (!g) return std::nullopt;
      return Vec(nd.alpha * *g);
    }
    case Kind::kSum: {
      auto ga = nd.a->try_gradient(x);
      if (!ga) return std::nullopt;
      auto gb = nd.b->try_gradient(x);
      if (!gb) return std::nullopt;
      return Vec(*ga + *gb);
    }
    case Kind::kIndicator:
      if (nd.body && nd.body->gauge(x) < 1.0 - kIndicatorTol) return Vec(Vec::Zero(nd.n));
      return std::nullopt;
    case Kind::kZero:
      return Vec(Vec::Zero(nd.n));
  }
  return std::nullopt;
}

Vec gradient(const ConvexFunction& phi, const Vec& x) {
  if (auto g = phi.try_gradient(x)) return *g;
  throw NonDifferentiable("gradient: " + phi.describe() + " is not differentiable at the given point");
}

bool ConvexFunction::coercive() const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::kQuadratic:
    case Kind::kGaugePower:
    case Kind::kSampledGrid:
      return true;
    case Kind::kLinearComposed:
    case Kind::kScalarRight:
    case Kind::kScalarLeft:
      return nd.a->coercive();
    case Kind::kSum:
      return nd.a->coercive() || nd.b->coercive();
    case Kind::kInfConv:
      return nd.a->coercive() && nd.b->coercive();
    case Kind::kIndicator:
    case Kind::kZero:
      return false;
  }
  return false;
}

std::string ConvexFunction::describe() const {
  const Node& nd = *node_;
  std::ostringstream os;
  switch (nd.kind) {
    case Kind::kQuadratic: os << "quadratic(n=" << nd.n << ")"; break;
    case Kind::kGaugePower: os << "gauge_power(" << nd.body->describe() << ", p=" << nd.p << ")"; break;
    case Kind::kLinearComposed: os << "composed(" << nd.a->describe() << ")"; break;
    case Kind::kSampledGrid: os << "grid(n=" << nd.n << ", nodes=" << nd.grid->size() << ")"; break;
    case Kind::kInfConv: os << "inf_conv(" << nd.a->describe() << ", " << nd.b->describe() << ")"; break;
    case Kind::kScalarRight: os << "scalar_right(" << nd.a->describe() << ", " << nd.alpha << ")"; break;
    case Kind::kScalarLeft: os << "scalar_left(" << nd.a->describe() << ", " << nd.alpha << ")"; break;
    case Kind::kSum: os << "sum(" << nd.a->describe() << ", " << nd.b->describe() << ")"; break;
    case Kind::kIndicator:
      os << "indicator(" << (nd.body ? nd.body->describe() : std::string("{0}")) << ")";
      break;
    case Kind::kZero: os << "zero(n=" << nd.n << ")"; break;
  }
  return os.str();
}

bool is_closed_form(const ConvexFunction& phi) {
  switch (phi.kind()) {
    case Kind::kQuadratic:
    case Kind::kGaugePower:
    case Kind::kIndicator:
    case Kind::kZero:
      return true;
    case Kind::kLinearComposed:
      return is_closed_form(phi.base());
    default:
      return false;
  }
}

ConvexFunction inf_convolution(const ConvexFunction& phi, const ConvexFunction& psi) {
  if (phi.dim() != psi.dim()) throw DomainError("inf_convolution: dimension mismatch");
  auto node = make_node(phi.dim(), Kind::kInfConv);
  node->a = phi;
  node->b = psi;
  const ConvexFunction sa = simplify(phi), sb = simplify(psi);
  if (is_closed_form(sa) && is_closed_form(sb)) {
    // (phi □ psi)* = phi* + psi*; usable when the sum is again closed form.
    ConvexFunction dual = simplify(sum(legendre_conjugate(sa), legendre_conjugate(sb)));
    if (is_closed_form(dual)) node->closed = legendre_conjugate(dual);
  }
  return ConvexFunction(node);
}

ConvexFunction scalar_right_mult(const ConvexFunction& phi, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("scalar_right_mult: alpha must be > 0");
  auto node = make_node(phi.dim(), Kind::kScalarRight);
  node->a = phi;
  node->alpha = alpha;
  return ConvexFunction(node);
}

ConvexFunction scalar_left_mult(const ConvexFunction& phi, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("scalar_left_mult: alpha must be > 0");
  auto node = make_node(phi.dim(), Kind::kScalarLeft);
  node->a = phi;
  node->alpha = alpha;
  return ConvexFunction(node);
}

ConvexFunction sum(const ConvexFunction& phi, const ConvexFunction& psi) {
  if (phi.dim() != psi.dim()) throw DomainError("sum: dimension mismatch");
  auto node = make_node(phi.dim(), Kind::kSum);
  node->a = phi;
  node->b = psi;
  return ConvexFunction(node);
}

ConvexFunction compose(const ConvexFunction& phi, const Mat& T) { return ConvexFunction::composed(phi, T); }

namespace {

ConvexBody scaled_body(const ConvexBody& K, double c) {
  if (K.kind() == ConvexBody::Kind::kBall) return ConvexBody::ball(K.dim(), c * ConvexBody(K).support(Vec::Unit(K.dim(), 0)));
  return K.transformed(c * Mat::Identity(K.dim(), K.dim()));
}

}  // namespace

ConvexFunction simplify(const ConvexFunction& phi) {
  switch (phi.kind()) {
    case Kind::kLinearComposed: {
      ConvexFunction b = simplify(phi.base());
      if (b.kind() == Kind::kZero) return b;
      if (b.kind() == Kind::kLinearComposed) return compose(b.base(), b.transform() * phi.transform());
      return compose(b, phi.transform());
    }
    case Kind::kScalarRight: {
      const double alpha = phi.scalar();
      ConvexFunction b = simplify(phi.base());
      if (alpha == 1.0) return b;
      switch (b.kind()) {
        case Kind::kQuadratic:
          return ConvexFunction::quadratic(b.quadratic_matrix() / alpha);
        case Kind::kGaugePower: {
          const double p = b.gauge_exponent();
          if (p == 1.0) return b;
          return ConvexFunction::gauge_power(scaled_body(b.gauge_body(), std::pow(alpha, (p - 1.0) / p)), p);
        }
        case Kind::kIndicator:
          if (!b.indicator_body()) return b;
          return ConvexFunction::indicator(scaled_body(*b.indicator_body(), alpha));
        case Kind::kZero:
          return b;
        case Kind::kScalarRight:
          return simplify(scalar_right_mult(b.base(), alpha * b.scalar()));
        default:
          return scalar_right_mult(b, alpha);
      }
    }
    case Kind::kScalarLeft: {
      const double alpha = phi.scalar();
      ConvexFunction b = simplify(phi.base());
      if (alpha == 1.0) return b;
      switch (b.kind()) {
        case Kind::kQuadratic:
          return ConvexFunction::quadratic(alpha * b.quadratic_matrix());
        case Kind::kGaugePower: {
          const double p = b.gauge_exponent();
          return ConvexFunction::gauge_power(scaled_body(b.gauge_body(), std::pow(alpha, -1.0 / p)), p);
        }
        case Kind::kIndicator:
        case Kind::kZero:
          return b;
        case Kind::kScalarLeft:
          return simplify(scalar_left_mult(b.base(), alpha * b.scalar()));
        default:
          return scalar_left_mult(b, alpha);
      }
    }
    case Kind::kSum: {
      ConvexFunction a = simplify(phi.left()), b = simplify(phi.right());
      if (a.kind() == Kind::kZero) return b;
      if (b.kind() == Kind::kZero) return a;
      if (a.kind() == Kind::kQuadratic && b.kind() == Kind::kQuadratic)
        return ConvexFunction::quadratic(a.quadratic_matrix() + b.quadratic_matrix());
      return sum(a, b);
    }
    case Kind::kInfConv: {
      // (psi a) box (psi b) = psi (a + b) for convex psi.
      auto split = [](const ConvexFunction& f) {
        if (f.kind() == Kind::kScalarRight) return std::make_pair(f.base(), f.scalar());
        return std::make_pair(f, 1.0);
      };
      const auto [la, sa] = split(phi.left());
      const auto [lb, sb] = split(phi.right());
      if (la.identical(lb)) return simplify(scalar_right_mult(la, sa + sb));
      ConvexFunction a = simplify(phi.left()), b = simplify(phi.right());
      auto is_origin = [](const ConvexFunction& f) {
        return f.kind() == Kind::kIndicator && !f.indicator_body();
      };
      if (is_origin(a)) return b;
      if (is_origin(b)) return a;
      if (a.kind() == Kind::kQuadratic && b.kind() == Kind::kQuadratic) {
        return ConvexFunction::quadratic(
            spd_inverse(spd_inverse(a.quadratic_matrix()) + spd_inverse(b.quadratic_matrix())));
      }
      ConvexFunction node = inf_convolution(a, b);
      if (node.inf_conv_closed_form()) return simplify(*node.inf_conv_closed_form());
      return node;
    }
    default:
      return phi;
  }
}

ExtendedReal inf_convolution_direct(const ConvexFunction& phi, const ConvexFunction& psi, const Vec& x,
                                    Vec* argmin) {
  require_dim(x, phi.dim(), "inf_convolution_direct");
  const double inf = std::numeric_limits<double>::infinity();
  auto objective = [&](const Vec& y) {
    const ExtendedReal v = phi(x - y) + psi(y);
    return v.is_finite() ? v.value() : inf;
  };
  const double scale = 0.5 * (1.0 + x.norm());
  const Vec starts[] = {Vec::Zero(x.size()), x, 0.5 * x};
  MinimizeResult best;
  best.value = inf;
  for (const Vec& s : starts) {
    MinimizeResult r = nelder_mead(objective, s, scale);
    // Restart from the optimum to escape premature collapse.
    MinimizeResult r2 = nelder_mead(objective, r.argmin, 0.1 * scale);
    if (r2.value < r.value) r = r2;
    if (r.value < best.value) best = r;
  }
  if (argmin) *argmin = best.argmin;
  if (!std::isfinite(best.value)) return ExtendedReal::infinity();
  return best.value;
}

namespace {

Frame probe_frame(const ConvexFunction& phi, double level) {
  const int n = phi.dim();
  const SphereRule rule = sphere_rule(n, n == 2 ? 720 : 2000);
  Vec lo = Vec::Zero(n), hi = Vec::Zero(n);
  for (int k = 0; k < rule.points.rows(); ++k) {
    const Vec u = rule.points.row(k).transpose();
    auto above = [&](double t) { return phi(t * u) > ExtendedReal(level); };
    double t_hi = 1.0;
    int doublings = 0;
    while (!above(t_hi)) {
      t_hi *= 2.0;
      if (++doublings > 60) throw DomainError("sublevel_frame: function is not coercive along a ray");
    }
    double t_lo = 0.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (t_lo + t_hi);
      (above(mid) ? t_hi : t_lo) = mid;
    }
    const Vec pnt = t_hi * u;
    lo = lo.cwiseMin(pnt);
    hi = hi.cwiseMax(pnt);
  }
  Frame f;
  f.center = 0.5 * (lo + hi);
  f.L = Mat::Identity(n, n);
  // Margin for the finite probing directions.
  f.half_width = 0.5 * (hi - lo) * 1.1;
  return f;
}

}  // namespace

Frame sublevel_frame(const ConvexFunction& phi, double level) {
  const int n = phi.dim();
  if (!(level > 0.0)) throw DomainError("sublevel_frame: level must be positive");
  Frame f;
  f.center = Vec::Zero(n);
  f.L = Mat::Identity(n, n);
  switch (phi.kind()) {
    case Kind::kQuadratic:
      f.L = spd_inv_sqrt(phi.quadratic_matrix());
      f.half_width = Vec::Constant(n, std::sqrt(2.0 * level));
      return f;
    case Kind::kGaugePower: {
      const double p = phi.gauge_exponent();
      const double rho = std::pow(p * level, 1.0 / p);
      const ConvexBody& K = phi.gauge_body();
      if (K.is_polytope()) {
        f.half_width.resize(n);
        for (int k = 0; k < n; ++k)
          f.half_width(k) = rho * std::max(K.support(Vec::Unit(n, k)), K.support(-Vec::Unit(n, k)));
      } else {
        f.L = spd_inv_sqrt(K.ellipsoid_matrix());
        f.half_width = Vec::Constant(n, rho);
      }
      return f;
    }
    case Kind::kLinearComposed: {
      Frame b = sublevel_frame(phi.base(), level);
      Eigen::FullPivLU<Mat> lu(phi.transform());
      const Mat tinv = lu.inverse();
      f.center = tinv * b.center;
      f.L = tinv * b.L;
      f.half_width = b.half_width;
      return f;
    }
    case Kind::kScalarRight: {
      const double alpha = phi.scalar();
      Frame b = sublevel_frame(phi.base(), level / alpha);
      f.center = alpha * b.center;
      f.L = alpha * b.L;
      f.half_width = b.half_width;
      return f;
    }
    case Kind::kScalarLeft:
      return sublevel_frame(phi.base(), level / phi.scalar());
    case Kind::kSampledGrid: {
      const SampledGrid& g = phi.grid();
      f.center = 0.5 * (g.lower() + g.upper());
      f.half_width = 0.5 * (g.upper() - g.lower());
      return f;
    }
    case Kind::kIndicator:
      if (!phi.indicator_body()) throw DomainError("sublevel_frame: indicator of the origin has no volume");
      return sublevel_frame(ConvexFunction::gauge_power(*phi.indicator_body(), 1.0), 1.0);
    case Kind::kZero:
      throw DomainError("sublevel_frame: zero function is not coercive");
    default: {
      ConvexFunction s = simplify(phi);
      if (s.kind() != phi.kind()) return sublevel_frame(s, level);
      return probe_frame(phi, level);
    }
  }
}

}  // namespace lyz
