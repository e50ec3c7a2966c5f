#pragma once

#include "lyz/body.hpp"
#include "lyz/extended_real.hpp"
#include "lyz/linalg.hpp"
#include "lyz/sampled_grid.hpp"

#include <memory>
#include <optional>
#include <string>

namespace lyz {

namespace detail {
struct Node;
}

// Extended-real-valued convex function on R^n. Immutable; copies share the
// underlying expression tree.
class ConvexFunction {
 public:
  enum class Kind {
    kQuadratic,       // x^T A x / 2, A SPD
    kGaugePower,      // ||x||_K^p / p, p >= 1
    kLinearComposed,  // base(T x), T invertible
    kSampledGrid,     // lattice data, multilinear between nodes
    kInfConv,         // inf_y left(x - y) + right(y)
    kScalarRight,     // alpha * base(x / alpha)
    kScalarLeft,      // alpha * base(x)
    kSum,             // left(x) + right(x)
    kIndicator,       // 0 on K (or on {0}), +inf elsewhere
    kZero,            // identically 0
  };

  int dim() const;
  Kind kind() const;

  // phi(x); +inf outside dom(phi). Throws DomainError on dimension mismatch.
  ExtendedReal operator()(const Vec& x) const;

  // Gradient where phi is differentiable; empty on a non-smooth locus.
  std::optional<Vec> try_gradient(const Vec& x) const;

  // Declared membership of the class of proper, convex, coercive functions.
  bool coercive() const;

  std::string describe() const;

  // True when both handles share one expression node.
  bool identical(const ConvexFunction& other) const { return node_ == other.node_; }

  // Variant accessors; throw DomainError on the wrong kind.
  const Mat& quadratic_matrix() const;
  const ConvexBody& gauge_body() const;
  double gauge_exponent() const;
  const ConvexFunction& base() const;   // LinearComposed, ScalarRight, ScalarLeft
  const Mat& transform() const;         // LinearComposed
  double scalar() const;                // ScalarRight, ScalarLeft
  const ConvexFunction& left() const;   // InfConv, Sum
  const ConvexFunction& right() const;  // InfConv, Sum
  const SampledGrid& grid() const;
  // Indicator of a body; empty for the indicator of the origin.
  const std::optional<ConvexBody>& indicator_body() const;
  // Closed form attached to an InfConv node by the conjugate route.
  const std::optional<ConvexFunction>& inf_conv_closed_form() const;

  // Constructors of the variants.
  static ConvexFunction quadratic(const Mat& A);
  static ConvexFunction gauge_power(const ConvexBody& K, double p);
  static ConvexFunction composed(const ConvexFunction& base, const Mat& T);
  static ConvexFunction grid(SampledGrid g);
  static ConvexFunction indicator(const ConvexBody& K);
  static ConvexFunction indicator_origin(int n);
  static ConvexFunction zero(int n);

 private:
  explicit ConvexFunction(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;

  friend ConvexFunction inf_convolution(const ConvexFunction&, const ConvexFunction&);
  friend ConvexFunction scalar_right_mult(const ConvexFunction&, double);
  friend ConvexFunction scalar_left_mult(const ConvexFunction&, double);
  friend ConvexFunction sum(const ConvexFunction&, const ConvexFunction&);
  friend struct detail::Node;
};

ExtendedReal evaluate(const ConvexFunction& phi, const Vec& x);

// Throws NonDifferentiable on a non-smooth locus or outside the interior of
// the domain.
Vec gradient(const ConvexFunction& phi, const Vec& x);

// Symbolic infimal convolution. Evaluation uses the conjugate route when
// phi* + psi* reduces to a closed form, else numerical minimization.
ConvexFunction inf_convolution(const ConvexFunction& phi, const ConvexFunction& psi);

// Right scalar multiplication (phi alpha)(x) = alpha phi(x / alpha), alpha > 0.
ConvexFunction scalar_right_mult(const ConvexFunction& phi, double alpha);

// alpha * phi, alpha > 0.
ConvexFunction scalar_left_mult(const ConvexFunction& phi, double alpha);

ConvexFunction sum(const ConvexFunction& phi, const ConvexFunction& psi);

// phi o T.
ConvexFunction compose(const ConvexFunction& phi, const Mat& T);

// Rewrites nodes whose result is again a closed-form variant (scalings of
// quadratics and gauge powers, sums and infimal convolutions of quadratics,
// identity elements, nested compositions). Leaves other nodes intact.
ConvexFunction simplify(const ConvexFunction& phi);

// True for the variants with closed-form conjugates and evaluation.
bool is_closed_form(const ConvexFunction& phi);

// inf_y phi(x - y) + psi(y) by multi-start Nelder-Mead. Cross-check for the
// conjugate route; also the fallback evaluation.
ExtendedReal inf_convolution_direct(const ConvexFunction& phi, const ConvexFunction& psi, const Vec& x,
                                    Vec* argmin = nullptr);

// Affine frame x = center + L z together with half-widths of a box in z
// containing the sublevel set {phi <= level}. Closed forms are standardized
// (quadratics map to the unit Gaussian scale); other variants are boxed by
// ray probing from the origin.
struct Frame {
  Vec center;
  Mat L;
  Vec half_width;
};
Frame sublevel_frame(const ConvexFunction& phi, double level);

}  // namespace lyz
