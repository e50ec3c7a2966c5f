#include "lyz/body.hpp"

#include "lyz/constants.hpp"
#include "lyz/error.hpp"
#include "lyz/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace lyz {

namespace {

constexpr double kAngularTol = 1e-9;

// All n-subsets of {0..m-1}, n in {2, 3}.
template <typename F>
void for_each_subset(int m, int n, F f) {
  if (n == 2) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) f(std::vector<int>{i, j});
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        for (int k = j + 1; k < m; ++k) f(std::vector<int>{i, j, k});
  }
}

// Orthonormal basis (2 x 3) of the plane orthogonal to unit vector nu.
Mat plane_basis(const Vec& nu) {
  Vec a = std::abs(nu(0)) < 0.9 ? Vec::Unit(3, 0) : Vec::Unit(3, 1);
  Eigen::Vector3d e1 = (a - a.dot(nu) * nu).normalized();
  Eigen::Vector3d n3 = nu;
  Eigen::Vector3d e2 = n3.cross(e1);
  Mat b(2, 3);
  b.row(0) = e1.transpose();
  b.row(1) = e2.transpose();
  return b;
}

PolytopeData build_polytope(const Mat& raw_normals, const Vec& raw_supports) {
  const int m = static_cast<int>(raw_normals.rows());
  const int n = static_cast<int>(raw_normals.cols());
  if (n != 2 && n != 3) throw DomainError("polytope: only n = 2 and n = 3 are supported");
  if (raw_supports.size() != m) throw DomainError("polytope: normals/supports length mismatch");
  if (m < n + 1) throw DomainError("polytope: need at least n+1 facets");

  Mat normals(m, n);
  Vec supports(m);
  for (int i = 0; i < m; ++i) {
    const double len = raw_normals.row(i).norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw DomainError("polytope: zero or non-finite normal");
    normals.row(i) = raw_normals.row(i) / len;
    supports(i) = raw_supports(i) / len;
    if (!(supports(i) > 0.0)) {
      throw DomainError("polytope: support numbers must be positive (origin must be interior)");
    }
  }
  const double scale = supports.maxCoeff();
  const double tol = 1e-10 * scale;

  // Vertex enumeration by brute force over n-subsets of facets.
  std::vector<Vec> verts;
  for_each_subset(m, n, [&](const std::vector<int>& idx) {
    Mat a(n, n);
    Vec b(n);
    for (int r = 0; r < n; ++r) {
      a.row(r) = normals.row(idx[r]);
      b(r) = supports(idx[r]);
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (lu.rank() < n) return;
    Vec v = lu.solve(b);
    if (!v.allFinite()) return;
    if (((normals * v) - supports).maxCoeff() > tol) return;
    for (const auto& w : verts)
      if ((w - v).norm() <= 1e-9 * scale) return;
    verts.push_back(v);
  });
  if (static_cast<int>(verts.size()) < n + 1) {
    throw DomainError("polytope: halfspaces do not bound a full-dimensional body");
  }

  PolytopeData out;
  std::vector<int> kept;
  std::vector<double> measures;
  std::vector<std::vector<int>> cycles;
  for (int i = 0; i < m; ++i) {
    std::vector<int> on;
    for (int k = 0; k < static_cast<int>(verts.size()); ++k) {
      if (std::abs(normals.row(i).dot(verts[k]) - supports(i)) <= 1e-9 * scale) on.push_back(k);
    }
    if (static_cast<int>(on.size()) < n) continue;  // redundant halfspace
    Vec nu = normals.row(i).transpose();
    if (n == 2) {
      // Orient counterclockwise: tangent t = (-nu_y, nu_x).
      Vec t(2);
      t << -nu(1), nu(0);
      auto [lo, hi] = std::minmax_element(on.begin(), on.end(), [&](int a, int b) {
        return verts[a].dot(t) < verts[b].dot(t);
      });
      const double len = (verts[*hi] - verts[*lo]).norm();
      if (len <= 1e-12 * scale) continue;
      kept.push_back(i);
      measures.push_back(len);
      cycles.push_back({*lo, *hi});
    } else {
      Vec c = Vec::Zero(3);
      for (int k : on) c += verts[k];
      c /= static_cast<double>(on.size());
      Mat basis = plane_basis(nu);
      std::vector<std::pair<double, int>> ang;
      for (int k : on) {
        Vec d = basis * (verts[k] - c);
        ang.emplace_back(std::atan2(d(1), d(0)), k);
      }
      std::sort(ang.begin(), ang.end());
      std::vector<int> cyc;
      for (auto& [a, k] : ang) cyc.push_back(k);
      double area = 0.0;
      for (std::size_t k = 1; k + 1 < cyc.size(); ++k) {
        Eigen::Vector3d e1 = verts[cyc[k]] - verts[cyc[0]];
        Eigen::Vector3d e2 = verts[cyc[k + 1]] - verts[cyc[0]];
        area += 0.5 * e1.cross(e2).dot(Eigen::Vector3d(nu));
      }
      if (area < 0) {
        std::reverse(cyc.begin(), cyc.end());
        area = -area;
      }
      if (area <= 1e-12 * scale * scale) continue;
      kept.push_back(i);
      measures.push_back(area);
      cycles.push_back(std::move(cyc));
    }
  }

  const int mk = static_cast<int>(kept.size());
  out.normals.resize(mk, n);
  out.supports.resize(mk);
  out.facet_measures.resize(mk);
  for (int r = 0; r < mk; ++r) {
    out.normals.row(r) = normals.row(kept[r]);
    out.supports(r) = supports(kept[r]);
    out.facet_measures(r) = measures[r];
  }
  out.facet_cycle = std::move(cycles);
  out.vertices.resize(static_cast<int>(verts.size()), n);
  for (int k = 0; k < static_cast<int>(verts.size()); ++k) out.vertices.row(k) = verts[k].transpose();

  Vec residual = out.normals.transpose() * out.facet_measures;
  const double area_scale = out.facet_measures.sum();
  if (residual.norm() > 1e-9 * area_scale) {
    throw DomainError("polytope: facets do not close (unbounded or inconsistent halfspaces)");
  }
  return out;
}

}  // namespace

ConvexBody ConvexBody::from_halfspaces(const Mat& normals, const Vec& supports) {
  ConvexBody body(std::make_shared<const Rep>(build_polytope(normals, supports)));
  body.build_cone_tables();
  return body;
}

ConvexBody ConvexBody::from_vertices(const Mat& vertices) {
  // K = (K°)°, where K° = {y : <y, v_j> <= 1}.
  Vec ones = Vec::Ones(vertices.rows());
  return from_halfspaces(vertices, ones).polar();
}

ConvexBody ConvexBody::ellipsoid(const Mat& Q) {
  require_spd(Q, "ellipsoid", 1e-12);
  if (Q.rows() != 2 && Q.rows() != 3) throw DomainError("ellipsoid: only n = 2 and n = 3 are supported");
  ConvexBody body(std::make_shared<const Rep>(EllipsoidData{symmetrize(Q)}));
  return body;
}

ConvexBody ConvexBody::ball(int n, double radius) {
  if (n < 1) throw DomainError("ball: dimension must be positive");
  if (!(radius > 0.0)) throw DomainError("ball: radius must be positive");
  return ConvexBody(std::make_shared<const Rep>(BallData{n, radius}));
}

ConvexBody ConvexBody::cube(int n, double half_width) {
  Mat normals(2 * n, n);
  normals.setZero();
  for (int k = 0; k < n; ++k) {
    normals(2 * k, k) = 1.0;
    normals(2 * k + 1, k) = -1.0;
  }
  return from_halfspaces(normals, Vec::Constant(2 * n, half_width));
}

ConvexBody ConvexBody::cross_polytope(int n, double radius) {
  const int m = 1 << n;
  Mat normals(m, n);
  for (int s = 0; s < m; ++s)
    for (int k = 0; k < n; ++k) normals(s, k) = (s >> k) & 1 ? -1.0 : 1.0;
  return from_halfspaces(normals, Vec::Constant(m, radius));
}

ConvexBody ConvexBody::regular_polygon(int sides, double inradius, double phase) {
  if (sides < 3) throw DomainError("regular_polygon: need at least 3 sides");
  Mat normals(sides, 2);
  for (int j = 0; j < sides; ++j) {
    const double t = phase + 2.0 * std::numbers::pi * j / sides;
    normals(j, 0) = std::cos(t);
    normals(j, 1) = std::sin(t);
  }
  return from_halfspaces(normals, Vec::Constant(sides, inradius));
}

int ConvexBody::dim() const {
  return std::visit(
      [](const auto& r) -> int {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PolytopeData>) return static_cast<int>(r.normals.cols());
        else if constexpr (std::is_same_v<T, EllipsoidData>) return static_cast<int>(r.Q.rows());
        else return r.dim;
      },
      *rep_);
}

ConvexBody::Kind ConvexBody::kind() const { return static_cast<Kind>(rep_->index()); }

const PolytopeData& ConvexBody::polytope() const {
  if (const auto* p = std::get_if<PolytopeData>(rep_.get())) return *p;
  throw DomainError("body is not a polytope");
}

Mat ConvexBody::ellipsoid_matrix() const {
  if (const auto* e = std::get_if<EllipsoidData>(rep_.get())) return e->Q;
  if (const auto* b = std::get_if<BallData>(rep_.get()))
    return Mat::Identity(b->dim, b->dim) / (b->radius * b->radius);
  throw DomainError("body is not an ellipsoid");
}

double ConvexBody::gauge(const Vec& x) const {
  require_dim(x, dim(), "gauge");
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PolytopeData>) {
          return std::max(0.0, (r.normals * x).cwiseQuotient(r.supports).maxCoeff());
        } else if constexpr (std::is_same_v<T, EllipsoidData>) {
          return std::sqrt(std::max(0.0, x.dot(r.Q * x)));
        } else {
          return x.norm() / r.radius;
        }
      },
      *rep_);
}

double ConvexBody::support(const Vec& u) const {
  require_dim(u, dim(), "support");
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PolytopeData>) {
          return (r.vertices * u).maxCoeff();
        } else if constexpr (std::is_same_v<T, EllipsoidData>) {
          return std::sqrt(std::max(0.0, u.dot(r.Q.ldlt().solve(u))));
        } else {
          return r.radius * u.norm();
        }
      },
      *rep_);
}

double ConvexBody::radial(const Vec& u) const {
  if (u.norm() == 0.0) throw DomainError("radial: zero direction");
  return 1.0 / gauge(u);
}

double ConvexBody::volume() const {
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PolytopeData>) {
          return r.facet_measures.dot(r.supports) / static_cast<double>(r.normals.cols());
        } else if constexpr (std::is_same_v<T, EllipsoidData>) {
          return constants::omega(static_cast<int>(r.Q.rows())) / std::sqrt(r.Q.determinant());
        } else {
          return constants::omega(r.dim) * std::pow(r.radius, r.dim);
        }
      },
      *rep_);
}

ConvexBody ConvexBody::polar() const {
  return std::visit(
      [&](const auto& r) -> ConvexBody {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PolytopeData>) {
          // Facets of K° come from the vertices of K.
          return from_halfspaces(r.vertices, Vec::Ones(r.vertices.rows()));
        } else if constexpr (std::is_same_v<T, EllipsoidData>) {
          return ellipsoid(spd_inverse(r.Q));
        } else {
          return ball(r.dim, 1.0 / r.radius);
        }
      },
      *rep_);
}

ConvexBody ConvexBody::transformed(const Mat& T) const {
  const int n = dim();
  require_square(T, n, "transformed");
  Eigen::FullPivLU<Mat> lu(T);
  if (!lu.isInvertible()) throw DomainError("transformed: matrix is singular");
  Mat tinv = lu.inverse();
  return std::visit(
      [&](const auto& r) -> ConvexBody {
        using V = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<V, PolytopeData>) {
          // <nu, T^{-1} y> <= h  <=>  <T^{-T} nu, y> <= h
          return from_halfspaces(r.normals * tinv, r.supports);
        } else if constexpr (std::is_same_v<V, EllipsoidData>) {
          return ellipsoid(symmetrize(tinv.transpose() * r.Q * tinv));
        } else {
          return ellipsoid(symmetrize(tinv.transpose() * tinv) / (r.radius * r.radius));
        }
      },
      *rep_);
}

std::optional<Vec> ConvexBody::gauge_gradient(const Vec& x) const {
  require_dim(x, dim(), "gauge_gradient");
  if (x.norm() == 0.0) return std::nullopt;
  return std::visit(
      [&](const auto& r) -> std::optional<Vec> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PolytopeData>) {
          Vec v = (r.normals * x).cwiseQuotient(r.supports);
          int best = 0;
          v.maxCoeff(&best);
          double second = -std::numeric_limits<double>::infinity();
          for (int i = 0; i < v.size(); ++i)
            if (i != best) second = std::max(second, v(i));
          if (v(best) - second <= kAngularTol * std::abs(v(best))) return std::nullopt;
          return Vec(r.normals.row(best).transpose() / r.supports(best));
        } else if constexpr (std::is_same_v<T, EllipsoidData>) {
          Vec qx = r.Q * x;
          return Vec(qx / std::sqrt(x.dot(qx)));
        } else {
          return Vec(x / (r.radius * x.norm()));
        }
      },
      *rep_);
}

void ConvexBody::build_cone_tables() {
  const auto* p = std::get_if<PolytopeData>(rep_.get());
  if (!p) return;
  const int m = static_cast<int>(p->supports.size());
  const int n = static_cast<int>(p->normals.cols());
  auto cdf = std::make_shared<std::vector<double>>(m);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    acc += p->facet_measures(i) * p->supports(i);
    (*cdf)[i] = acc;
  }
  for (auto& c : *cdf) c /= acc;
  cone_cdf_ = cdf;
  if (n == 3) {
    auto tri = std::make_shared<std::vector<std::vector<double>>>(m);
    for (int i = 0; i < m; ++i) {
      const auto& cyc = p->facet_cycle[i];
      std::vector<double> c;
      double a = 0.0;
      for (std::size_t k = 1; k + 1 < cyc.size(); ++k) {
        Eigen::Vector3d e1 = p->vertices.row(cyc[k]) - p->vertices.row(cyc[0]);
        Eigen::Vector3d e2 = p->vertices.row(cyc[k + 1]) - p->vertices.row(cyc[0]);
        a += 0.5 * e1.cross(e2).norm();
        c.push_back(a);
      }
      for (auto& v : c) v /= a;
      (*tri)[i] = std::move(c);
    }
    facet_tri_cdf_ = tri;
  }
}

namespace {
Vec uniform_sphere(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec w(n);
  do {
    for (int k = 0; k < n; ++k) w(k) = normal(rng);
  } while (w.norm() == 0.0);
  return w / w.norm();
}

int pick(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<int>(static_cast<int>(it - cdf.begin()), static_cast<int>(cdf.size()) - 1);
}
}  // namespace

Vec ConvexBody::sample_cone(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (const auto* p = std::get_if<PolytopeData>(rep_.get())) {
    const int i = pick(*cone_cdf_, unif(rng));
    const auto& cyc = p->facet_cycle[i];
    if (p->normals.cols() == 2) {
      const double t = unif(rng);
      return ((1.0 - t) * p->vertices.row(cyc[0]) + t * p->vertices.row(cyc[1])).transpose();
    }
    const int k = pick((*facet_tri_cdf_)[i], unif(rng)) + 1;
    const double r1 = std::sqrt(unif(rng));
    const double u2 = unif(rng);
    return ((1.0 - r1) * p->vertices.row(cyc[0]) + r1 * (1.0 - u2) * p->vertices.row(cyc[k]) +
            r1 * u2 * p->vertices.row(cyc[k + 1]))
        .transpose();
  }
  if (const auto* e = std::get_if<EllipsoidData>(rep_.get())) {
    // Linear images preserve the normalized cone measure: K = Q^{-1/2} B.
    return spd_inv_sqrt(e->Q) * uniform_sphere(static_cast<int>(e->Q.rows()), rng);
  }
  const auto& b = std::get<BallData>(*rep_);
  return b.radius * uniform_sphere(b.dim, rng);
}

double ConvexBody::volume_from_vertices() const {
  const auto& p = polytope();
  const int n = static_cast<int>(p.normals.cols());
  if (n == 2) {
    std::vector<std::pair<double, int>> ang;
    for (int k = 0; k < p.vertices.rows(); ++k)
      ang.emplace_back(std::atan2(p.vertices(k, 1), p.vertices(k, 0)), k);
    std::sort(ang.begin(), ang.end());
    double twice = 0.0;
    for (std::size_t k = 0; k < ang.size(); ++k) {
      const auto a = p.vertices.row(ang[k].second);
      const auto b = p.vertices.row(ang[(k + 1) % ang.size()].second);
      twice += a(0) * b(1) - a(1) * b(0);
    }
    return 0.5 * twice;
  }
  double six = 0.0;
  for (const auto& cyc : p.facet_cycle) {
    for (std::size_t k = 1; k + 1 < cyc.size(); ++k) {
      Eigen::Matrix3d m;
      m.col(0) = p.vertices.row(cyc[0]).transpose();
      m.col(1) = p.vertices.row(cyc[k]).transpose();
      m.col(2) = p.vertices.row(cyc[k + 1]).transpose();
      six += m.determinant();
    }
  }
  return six / 6.0;
}

Vec ConvexBody::minkowski_residual() const {
  const auto& p = polytope();
  return p.normals.transpose() * p.facet_measures;
}

std::string ConvexBody::describe() const {
  std::ostringstream os;
  switch (kind()) {
    case Kind::kPolytope: os << "polytope(n=" << dim() << ", facets=" << polytope().supports.size() << ")"; break;
    case Kind::kEllipsoid: os << "ellipsoid(n=" << dim() << ")"; break;
    case Kind::kBall: os << "ball(n=" << dim() << ")"; break;
  }
  return os.str();
}

void QuadraticForm::validate() const {
  if (A.rows() != A.cols()) throw DomainError("QuadraticForm: matrix must be square");
  if (!is_symmetric(A, 1e-12)) throw DomainError("QuadraticForm: matrix must be symmetric");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (min_eigenvalue(symmetrize(A)) < -1e-12 * scale) {
    throw DomainError("QuadraticForm: matrix must be positive semidefinite");
  }
}

QuadraticForm lyz_body_ellipsoid(const ConvexBody& K, int sphere_points) {
  const int n = K.dim();
  QuadraticForm out;
  out.role = QuadraticForm::Role::kGaugeSquared;
  if (K.is_polytope()) {
    const auto& p = K.polytope();
    Mat q = Mat::Zero(n, n);
    for (int i = 0; i < p.supports.size(); ++i) {
      Vec nu = p.normals.row(i).transpose();
      q += (p.facet_measures(i) / p.supports(i)) * nu * nu.transpose();
    }
    out.A = symmetrize(q / K.volume());
  } else {
    // Boundary z = M w with M = Q^{-1/2}: nu dH / h_K(nu) integrates to
    // |det M| M^{-1} w w^T M^{-1} dsigma(w).
    const Mat q = K.ellipsoid_matrix();
    const Mat minv = spd_sqrt(q);
    const double det_m = 1.0 / std::sqrt(q.determinant());
    const SphereRule rule = sphere_rule(n, n == 2 ? 256 : sphere_points);
    Mat acc = Mat::Zero(n, n);
    for (int k = 0; k < rule.points.rows(); ++k) {
      Vec w = minv * rule.points.row(k).transpose();
      acc += rule.weights(k) * w * w.transpose();
    }
    out.A = symmetrize(det_m * acc / K.volume());
  }
  const double tr = out.A.trace();
  if (!(min_eigenvalue(out.A) > 1e-12 * tr)) {
    throw DegenerateError("lyz_body_ellipsoid: facet normals do not span R^n");
  }
  return out;
}

ProjectionBody::ProjectionBody(const ConvexBody& K) : dim_(K.dim()) {
  if (K.is_polytope()) {
    const auto& p = K.polytope();
    generators_ = (0.5 * p.facet_measures).asDiagonal() * p.normals;
  } else {
    // h(u) = omega_{n-1} |det M| |M^{-1} u| for K = M B.
    const Mat q = K.ellipsoid_matrix();
    const double det_m = 1.0 / std::sqrt(q.determinant());
    ellipse_ = constants::omega(dim_ - 1) * det_m * spd_sqrt(q);
  }
}

double ProjectionBody::support(const Vec& u) const {
  require_dim(u, dim_, "ProjectionBody::support");
  if (ellipse_) return (*ellipse_ * u).norm();
  return (generators_ * u).cwiseAbs().sum();
}

ProjectionBody projection_body(const ConvexBody& K) { return ProjectionBody(K); }

}  // namespace lyz
