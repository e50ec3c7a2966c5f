#pragma once

#include "lyz/linalg.hpp"

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace lyz {

// Polytope in H-representation with cached boundary geometry. Normals are
// stored one per row and are unit length; every support number is > 0.
struct PolytopeData {
  Mat normals;                                // m x n
  Vec supports;                               // m
  Vec facet_measures;                         // m, (n-1)-dimensional
  Mat vertices;                               // V x n
  std::vector<std::vector<int>> facet_cycle;  // ordered vertex ids per facet
};

struct EllipsoidData {
  Mat Q;  // body {x : x^T Q x <= 1}
};

struct BallData {
  int dim = 0;
  double radius = 1.0;
};

class ConvexBody {
 public:
  enum class Kind { kPolytope, kEllipsoid, kBall };

  // Halfspaces <nu_i, x> <= h_i, one normal per row. Normals need not be
  // unit; they are normalized. Redundant halfspaces are dropped.
  static ConvexBody from_halfspaces(const Mat& normals, const Vec& supports);
  // Convex hull of the rows of `vertices`; the origin must be interior.
  static ConvexBody from_vertices(const Mat& vertices);
  static ConvexBody ellipsoid(const Mat& Q);
  static ConvexBody ball(int n, double radius = 1.0);

  static ConvexBody cube(int n, double half_width = 1.0);
  static ConvexBody cross_polytope(int n, double radius = 1.0);
  static ConvexBody regular_polygon(int sides, double inradius = 1.0, double phase = 0.0);

  int dim() const;
  Kind kind() const;
  bool is_polytope() const { return kind() == Kind::kPolytope; }
  const PolytopeData& polytope() const;  // throws unless polytope
  // Q with K = {x^T Q x <= 1}; defined for ellipsoids and balls.
  Mat ellipsoid_matrix() const;

  // Minkowski functional ||x||_K.
  double gauge(const Vec& x) const;
  // h_K(u) = max_{y in K} <y, u>.
  double support(const Vec& u) const;
  // rho_K(u) = 1 / ||u||_K.
  double radial(const Vec& u) const;
  double volume() const;
  ConvexBody polar() const;
  // Image T K for invertible T.
  ConvexBody transformed(const Mat& T) const;

  // Gradient of the gauge at x != 0. Empty on a facet-cone boundary (within
  // the angular tolerance) and at the origin.
  std::optional<Vec> gauge_gradient(const Vec& x) const;

  // Point of the boundary distributed by the normalized cone measure.
  Vec sample_cone(std::mt19937_64& rng) const;

  // Volume by an independent route: shoelace (2-D) or fan tetrahedra over
  // facet polygons (3-D). Polytopes only.
  double volume_from_vertices() const;

  // Sum_i a_i nu_i; zero for a closed polytope.
  Vec minkowski_residual() const;

  std::string describe() const;

 private:
  using Rep = std::variant<PolytopeData, EllipsoidData, BallData>;
  explicit ConvexBody(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
  // Cumulative cone-measure weights a_i h_i / (n V) for facet selection, and
  // per-facet triangle fans in 3-D.
  std::shared_ptr<const std::vector<double>> cone_cdf_;
  std::shared_ptr<const std::vector<std::vector<double>>> facet_tri_cdf_;
  void build_cone_tables();
};

// Symmetric positive-semidefinite matrix with the role it plays.
struct QuadraticForm {
  enum class Role { kGaugeSquared, kLogDensity, kSupportSquared };
  Mat A;
  Role role = Role::kGaugeSquared;

  double operator()(const Vec& x) const { return x.dot(A * x); }
  void validate() const;
};

// Matrix Q of the classical LYZ ellipsoid with ||u||^2 = u^T Q u, i.e.
// Q = (1/V(K)) sum_i (a_i / h_i) nu_i nu_i^T for polytopes; ellipsoids use
// surface quadrature over the sphere. `sphere_points` sets the 3-D rule size.
QuadraticForm lyz_body_ellipsoid(const ConvexBody& K, int sphere_points = 200000);

// Classical projection body, represented by its support function
// h(u) = (1/2) int |<u, v>| dS(K, v).
class ProjectionBody {
 public:
  explicit ProjectionBody(const ConvexBody& K);
  double support(const Vec& u) const;
  int dim() const { return dim_; }

 private:
  int dim_;
  Mat generators_;               // zonotope generators (rows), polytopes
  std::optional<Mat> ellipse_;   // c * M^{-1} for ellipsoids: h(u) = |ellipse_ u|
};

ProjectionBody projection_body(const ConvexBody& K);

}  // namespace lyz
