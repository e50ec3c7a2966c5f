#include "lyz/integration.hpp"

#include "lyz/body.hpp"
#include "lyz/constants.hpp"
#include "lyz/error.hpp"
#include "lyz/sphere.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace lyz {

namespace {

constexpr int kBatches = 32;
constexpr int kPanelNodes = 8;
constexpr double kProxyDilation = 1.2;
constexpr int kMaxResample = 1000;
constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stream b of the root seed: mt19937_64 seeded from the splitmix64 output at
// counter (seed, b).
std::mt19937_64 stream_for(std::uint64_t seed, int b) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ull * static_cast<std::uint64_t>(b + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
  return std::mt19937_64(seq);
}

template <class Fn>
void parallel_for(int count, int workers, Fn fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Pairwise sum of the rows of `parts` in a fixed tree order.
Vec pairwise_rows(const Mat& parts, int lo, int hi) {
  if (hi - lo == 1) return parts.row(lo).transpose();
  const int mid = lo + (hi - lo) / 2;
  return pairwise_rows(parts, lo, mid) + pairwise_rows(parts, mid, hi);
}

struct Rule1D {
  std::vector<double> x, w;
};

Rule1D composite(const std::vector<double>& breaks, int m) {
  std::vector<double> gx, gw;
  gauss_legendre(m, gx, gw);
  Rule1D r;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < m; ++i) {
      r.x.push_back(mid + half * gx[i]);
      r.w.push_back(half * gw[i]);
    }
  }
  return r;
}

// Uniform panels over [a, b] with `focus` as an extra breakpoint; the panels
// touching focus are refined geometrically toward it.
std::vector<double> graded_breaks(double a, double b, double focus, int panels, int levels) {
  std::vector<double> br;
  for (int i = 0; i <= panels; ++i) br.push_back(a + (b - a) * i / panels);
  if (focus > a && focus < b) {
    br.push_back(focus);
    const double h = (b - a) / panels;
    for (int k = 1; k <= levels; ++k) {
      const double d = h * std::pow(0.5, k);
      if (focus - d > a) br.push_back(focus - d);
      if (focus + d < b) br.push_back(focus + d);
    }
  } else if (focus == a || focus == b) {
    const double h = (b - a) / panels;
    for (int k = 1; k <= levels; ++k) br.push_back(focus == a ? a + h * std::pow(0.5, k) : b - h * std::pow(0.5, k));
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

struct NodeSet {
  Mat x;  // n x N
  Vec w;
};

// Weight e^{-phi} arranged either as a gauge power ||x||_K^p / p of an
// ellipsoid or polytope, or as something without such structure.
struct GaugeLayout {
  bool ellipsoid = true;
  Mat Q;                           // ellipsoid: body {x^T Q x <= 1}
  std::optional<ConvexBody> body;  // polytope
  double p = 2.0;
  int n = 0;

  double gauge(const Vec& x) const { return ellipsoid ? std::sqrt(std::max(0.0, x.dot(Q * x))) : body->gauge(x); }
  double volume() const {
    return ellipsoid ? constants::omega(n) / std::sqrt(Q.determinant()) : body->volume();
  }
  // int e^{-||x||^p / p} dx = n V p^{n/p - 1} Gamma(n/p).
  double mass() const { return n * volume() * std::pow(p, n / p - 1.0) * std::tgamma(n / p); }
};

std::optional<GaugeLayout> gauge_layout(const ConvexFunction& phi) {
  using Kind = ConvexFunction::Kind;
  const ConvexFunction s = simplify(phi);
  GaugeLayout g;
  g.n = s.dim();
  switch (s.kind()) {
    case Kind::kQuadratic:
      g.Q = s.quadratic_matrix();
      g.p = 2.0;
      return g;
    case Kind::kGaugePower: {
      const ConvexBody& K = s.gauge_body();
      g.p = s.gauge_exponent();
      if (K.is_polytope()) {
        g.ellipsoid = false;
        g.body = K;
      } else {
        g.Q = K.ellipsoid_matrix();
      }
      return g;
    }
    case Kind::kLinearComposed: {
      auto base = gauge_layout(s.base());
      if (!base) return std::nullopt;
      const Mat& T = s.transform();
      if (base->ellipsoid) {
        base->Q = symmetrize(T.transpose() * base->Q * T);
      } else {
        base->body = base->body->transformed(T.inverse());
      }
      return base;
    }
    default:
      return std::nullopt;
  }
}

// Angular rule on the boundary of K with weights summing to n V(K), such
// that int F dx = int_0^inf r^{n-1} sum_j w_j F(r z_j) dr.
NodeSet boundary_rule(const GaugeLayout& g, int per_dim, bool coarse) {
  const int n = g.n;
  const int m = coarse ? kPanelNodes / 2 : kPanelNodes;
  NodeSet out;
  std::vector<Vec> pts;
  std::vector<double> wts;
  if (g.ellipsoid) {
    const Mat L = spd_inv_sqrt(g.Q);
    const double detL = L.determinant();
    if (n == 1) {
      pts = {L.col(0), -L.col(0)};
      wts = {detL, detL};
    } else if (n == 2) {
      int count = std::max(32, per_dim);
      if (coarse) count /= 2;
      for (int k = 0; k < count; ++k) {
        const double t = (k + 0.5) * 2.0 * kPi / count;
        pts.push_back(L * Vec((Vec(2) << std::cos(t), std::sin(t)).finished()));
        wts.push_back(detL * 2.0 * kPi / count);
      }
    } else if (n == 3) {
      const int panels = std::max(1, per_dim / (2 * kPanelNodes));
      std::vector<double> br;
      for (int i = 0; i <= panels; ++i) br.push_back(-1.0 + 2.0 * i / panels);
      const Rule1D tr = composite(br, m);
      int az = std::max(16, per_dim);
      if (coarse) az /= 2;
      for (std::size_t i = 0; i < tr.x.size(); ++i) {
        const double c = tr.x[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int k = 0; k < az; ++k) {
          const double t = (k + 0.5) * 2.0 * kPi / az;
          pts.push_back(L * Vec((Vec(3) << s * std::cos(t), s * std::sin(t), c).finished()));
          wts.push_back(detL * tr.w[i] * 2.0 * kPi / az);
        }
      }
    } else {
      throw DomainError("quadrature: gauge layouts support n <= 3");
    }
  } else {
    const PolytopeData& P = g.body->polytope();
    const int facets = static_cast<int>(P.supports.size());
    if (n == 2) {
      const int panels = std::max(1, per_dim / (kPanelNodes * facets));
      std::vector<double> br;
      for (int i = 0; i <= panels; ++i) br.push_back(static_cast<double>(i) / panels);
      const Rule1D tr = composite(br, m);
      for (int f = 0; f < facets; ++f) {
        const auto& cyc = P.facet_cycle[f];
        const Vec a = P.vertices.row(cyc[0]).transpose(), b = P.vertices.row(cyc[1]).transpose();
        const double len = (b - a).norm();
        for (std::size_t i = 0; i < tr.x.size(); ++i) {
          pts.push_back(a + tr.x[i] * (b - a));
          wts.push_back(P.supports(f) * len * tr.w[i]);
        }
      }
    } else if (n == 3) {
      int triangles = 0;
      for (const auto& cyc : P.facet_cycle) triangles += static_cast<int>(cyc.size()) - 2;
      const int panels =
          std::max(1, static_cast<int>(std::lround(per_dim / (kPanelNodes * std::sqrt(static_cast<double>(triangles))))));
      std::vector<double> br;
      for (int i = 0; i <= panels; ++i) br.push_back(static_cast<double>(i) / panels);
      const Rule1D tr = composite(br, m);
      for (int f = 0; f < facets; ++f) {
        const auto& cyc = P.facet_cycle[f];
        const Vec v0 = P.vertices.row(cyc[0]).transpose();
        for (std::size_t j = 1; j + 1 < cyc.size(); ++j) {
          const Vec v1 = P.vertices.row(cyc[j]).transpose(), v2 = P.vertices.row(cyc[j + 1]).transpose();
          const double area2 = Eigen::Vector3d(v1 - v0).cross(Eigen::Vector3d(v2 - v0)).norm();
          // Collapsed coordinates: z = (1-u) v0 + u ((1-t) v1 + t v2).
          for (std::size_t iu = 0; iu < tr.x.size(); ++iu) {
            for (std::size_t it = 0; it < tr.x.size(); ++it) {
              const double u = tr.x[iu], t = tr.x[it];
              pts.push_back((1.0 - u) * v0 + u * ((1.0 - t) * v1 + t * v2));
              wts.push_back(P.supports(f) * area2 * u * tr.w[iu] * tr.w[it]);
            }
          }
        }
      }
    } else {
      throw DomainError("quadrature: polytope layouts support n = 2, 3");
    }
  }
  out.x.resize(n, static_cast<Eigen::Index>(pts.size()));
  out.w.resize(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) {
    out.x.col(static_cast<Eigen::Index>(j)) = pts[j];
    out.w(static_cast<Eigen::Index>(j)) = wts[j];
  }
  return out;
}

NodeSet polar_nodes(const GaugeLayout& g, const IntegrationSpec& spec, bool coarse) {
  const int n = g.n;
  const double level = 0.5 * n * spec.truncation_radius * spec.truncation_radius;
  const double r_max = std::pow(g.p * level, 1.0 / g.p);
  const int per_dim = std::max(16, static_cast<int>(std::pow(static_cast<double>(spec.budget), 1.0 / n)));
  const int panels = std::max(2, per_dim / kPanelNodes);
  const Rule1D rr = composite(graded_breaks(0.0, r_max, 0.0, panels, 24), coarse ? kPanelNodes / 2 : kPanelNodes);
  const NodeSet ang = boundary_rule(g, per_dim, coarse);
  const Eigen::Index na = ang.w.size();
  const Eigen::Index nr = static_cast<Eigen::Index>(rr.x.size());
  NodeSet out;
  out.x.resize(n, na * nr);
  out.w.resize(na * nr);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const double r = rr.x[i], wr = rr.w[i] * std::pow(r, n - 1);
    for (Eigen::Index j = 0; j < na; ++j) {
      out.x.col(i * na + j) = r * ang.x.col(j);
      out.w(i * na + j) = wr * ang.w(j);
    }
  }
  return out;
}

NodeSet tensor_nodes(const Vec& center, const Mat& L, const Vec& half_width, const Vec& focus_z,
                     std::uint64_t budget, bool coarse) {
  const int n = static_cast<int>(center.size());
  const int per_dim = std::max(16, static_cast<int>(std::pow(static_cast<double>(budget), 1.0 / n)));
  const int panels = std::max(2, per_dim / kPanelNodes);
  const int m = coarse ? kPanelNodes / 2 : kPanelNodes;
  std::vector<Rule1D> axes(n);
  Eigen::Index total = 1;
  for (int k = 0; k < n; ++k) {
    axes[k] = composite(graded_breaks(-half_width(k), half_width(k), focus_z(k), panels, 12), m);
    total *= static_cast<Eigen::Index>(axes[k].x.size());
  }
  const double detL = std::abs(L.determinant());
  NodeSet out;
  out.x.resize(n, total);
  out.w.resize(total);
  std::vector<std::size_t> idx(n, 0);
  Vec z(n);
  for (Eigen::Index c = 0; c < total; ++c) {
    double w = detL;
    for (int k = 0; k < n; ++k) {
      z(k) = axes[k].x[idx[k]];
      w *= axes[k].w[idx[k]];
    }
    out.x.col(c) = center + L * z;
    out.w(c) = w;
    for (int k = n - 1; k >= 0; --k) {
      if (++idx[k] < axes[k].x.size()) break;
      idx[k] = 0;
    }
  }
  return out;
}

NodeSet quadrature_nodes(const ConvexFunction& phi, const IntegrationSpec& spec, bool coarse) {
  if (auto g = gauge_layout(phi)) return polar_nodes(*g, spec, coarse);
  const int n = phi.dim();
  if (phi.kind() == ConvexFunction::Kind::kSampledGrid) {
    const SampledGrid& G = phi.grid();
    const Vec center = 0.5 * (G.lower() + G.upper());
    const Vec hw = 0.5 * (G.upper() - G.lower());
    return tensor_nodes(center, Mat::Identity(n, n), hw, Vec::Constant(n, std::numeric_limits<double>::quiet_NaN()),
                        spec.budget, coarse);
  }
  const ExtendedReal at0 = phi(Vec::Zero(n));
  if (at0.is_infinite()) throw DomainError("quadrature: the origin must lie in the domain of the potential");
  const double R = spec.truncation_radius;
  const Frame fr = sublevel_frame(phi, at0.value() + 0.5 * R * R);
  const Vec focus = fr.L.fullPivLu().solve(-fr.center);
  return tensor_nodes(fr.center, fr.L, fr.half_width, focus, spec.budget, coarse);
}

// Importance-sampling proxies.
class Proxy {
 public:
  virtual ~Proxy() = default;
  virtual Vec sample(std::mt19937_64& rng) const = 0;
  virtual double log_density(const Vec& x) const = 0;
};

class GaugeProxy : public Proxy {
 public:
  explicit GaugeProxy(GaugeLayout g) : g_(std::move(g)) {
    if (g_.ellipsoid) L_ = spd_inv_sqrt(g_.Q);
    log_norm_ = std::log(g_.mass()) + g_.n * std::log(kProxyDilation);
  }
  Vec sample(std::mt19937_64& rng) const override {
    std::gamma_distribution<double> gam(g_.n / g_.p, 1.0);
    const double r = std::pow(g_.p * gam(rng), 1.0 / g_.p);
    Vec z;
    if (g_.ellipsoid) {
      std::normal_distribution<double> nd;
      Vec u(g_.n);
      do {
        for (int k = 0; k < g_.n; ++k) u(k) = nd(rng);
      } while (u.norm() == 0.0);
      z = L_ * (u / u.norm());
    } else {
      z = g_.body->sample_cone(rng);
    }
    return kProxyDilation * r * z;
  }
  double log_density(const Vec& x) const override {
    return -std::pow(g_.gauge(x / kProxyDilation), g_.p) / g_.p - log_norm_;
  }

 private:
  GaugeLayout g_;
  Mat L_;
  double log_norm_ = 0.0;
};

class StudentProxy : public Proxy {
 public:
  StudentProxy(Vec center, Mat S, double nu) : c_(std::move(center)), S_(std::move(S)), nu_(nu) {
    const int n = static_cast<int>(c_.size());
    Sinv_ = S_.inverse();
    log_norm_ = std::lgamma(0.5 * (nu_ + n)) - std::lgamma(0.5 * nu_) - 0.5 * n * std::log(nu_ * kPi) -
                std::log(std::abs(S_.determinant()));
  }
  Vec sample(std::mt19937_64& rng) const override {
    std::normal_distribution<double> nd;
    std::chi_squared_distribution<double> chi(nu_);
    Vec xi(c_.size());
    for (Eigen::Index k = 0; k < xi.size(); ++k) xi(k) = nd(rng);
    return c_ + S_ * xi * std::sqrt(nu_ / chi(rng));
  }
  double log_density(const Vec& x) const override {
    const double q = (Sinv_ * (x - c_)).squaredNorm();
    return log_norm_ - 0.5 * (nu_ + c_.size()) * std::log1p(q / nu_);
  }

 private:
  Vec c_;
  Mat S_, Sinv_;
  double nu_;
  double log_norm_ = 0.0;
};

class BoxProxy : public Proxy {
 public:
  BoxProxy(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    log_vol_ = (hi_ - lo_).array().log().sum();
  }
  Vec sample(std::mt19937_64& rng) const override {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    Vec x(lo_.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = lo_(k) + (hi_(k) - lo_(k)) * ud(rng);
    return x;
  }
  double log_density(const Vec&) const override { return -log_vol_; }

 private:
  Vec lo_, hi_;
  double log_vol_ = 0.0;
};

std::unique_ptr<Proxy> make_proxy(const ConvexFunction& phi) {
  if (auto g = gauge_layout(phi)) return std::make_unique<GaugeProxy>(*g);
  const int n = phi.dim();
  if (phi.kind() == ConvexFunction::Kind::kSampledGrid)
    return std::make_unique<BoxProxy>(phi.grid().lower(), phi.grid().upper());
  const ExtendedReal at0 = phi(Vec::Zero(n));
  if (at0.is_infinite()) throw DomainError("monte carlo: the origin must lie in the domain of the potential");
  const Frame fr = sublevel_frame(phi, at0.value() + n);
  const Mat S = kProxyDilation * fr.L * fr.half_width.asDiagonal() / std::sqrt(2.0 * n);
  return std::make_unique<StudentProxy>(fr.center, S, 4.0);
}

// Evaluates one point: returns false when a requested gradient does not
// exist there. `w` is the weight before the e^{-phi} factor.
struct Evaluator {
  const ConvexFunction& phi;
  const VectorIntegrand* integrand;
  int k;
  bool need_gradient;

  enum class Outcome { kSkip, kNoGradient, kAccepted, kRejected };

  Outcome eval(const Vec& x, double log_w, double* out, Vec& grad, double& weight) const {
    const ExtendedReal v = phi(x);
    if (v.is_infinite()) return Outcome::kSkip;
    if (need_gradient) {
      auto g = phi.try_gradient(x);
      if (!g) return Outcome::kNoGradient;
      grad = std::move(*g);
    }
    weight = std::exp(log_w - v.value());
    std::fill(out, out + k, 0.0);
    if (!(*integrand)(PointEval{x, v.value(), grad}, out)) {
      std::fill(out, out + k, 0.0);
      return Outcome::kRejected;
    }
    return Outcome::kAccepted;
  }
};

struct QuadratureSums {
  Vec sum;
  std::uint64_t evaluations = 0, rejected = 0, resampled = 0;
};

QuadratureSums run_quadrature(const NodeSet& nodes, const Evaluator& ev, int workers) {
  const Eigen::Index N = nodes.w.size();
  const int chunks = static_cast<int>(std::max<Eigen::Index>(1, std::min<Eigen::Index>(256, N)));
  Mat parts = Mat::Zero(chunks, ev.k);
  std::vector<std::uint64_t> evals(chunks, 0), rej(chunks, 0), res(chunks, 0);
  const int n = static_cast<int>(nodes.x.rows());
  Vec dir(n);
  for (int i = 0; i < n; ++i) dir(i) = std::sin(1.0 + 2.3 * i);
  dir.normalize();
  parallel_for(chunks, workers, [&](int c) {
    const Eigen::Index lo = N * c / chunks, hi = N * (c + 1) / chunks;
    std::vector<double> out(ev.k), acc(ev.k, 0.0);
    Vec grad, x;
    double weight = 0.0;
    for (Eigen::Index j = lo; j < hi; ++j) {
      x = nodes.x.col(j);
      auto add = [&](double scale) {
        for (int i = 0; i < ev.k; ++i) acc[i] += scale * weight * out[i];
      };
      ++evals[c];
      auto o = ev.eval(x, std::log(nodes.w(j)), out.data(), grad, weight);
      if (o == Evaluator::Outcome::kNoGradient) {
        // Node on a non-smooth locus: split it across the kink.
        ++res[c];
        const double eps = 1e-7 * (1.0 + x.norm());
        for (double sgn : {1.0, -1.0}) {
          const Vec xs = x + sgn * eps * dir;
          auto os = ev.eval(xs, std::log(nodes.w(j)), out.data(), grad, weight);
          if (os == Evaluator::Outcome::kAccepted) add(0.5);
          if (os == Evaluator::Outcome::kRejected) ++rej[c];
          if (os == Evaluator::Outcome::kNoGradient)
            throw DegenerateError("quadrature: repeated non-differentiable points");
        }
        continue;
      }
      if (o == Evaluator::Outcome::kRejected) ++rej[c];
      if (o == Evaluator::Outcome::kAccepted) add(1.0);
    }
    for (int i = 0; i < ev.k; ++i) parts(c, i) = acc[i];
  });
  QuadratureSums s;
  s.sum = pairwise_rows(parts, 0, chunks);
  for (int c = 0; c < chunks; ++c) {
    s.evaluations += evals[c];
    s.rejected += rej[c];
    s.resampled += res[c];
  }
  return s;
}

std::uint64_t batch_size(std::uint64_t budget, int batches, int b) {
  return budget / batches + (static_cast<std::uint64_t>(b) < budget % batches ? 1 : 0);
}

template <class Sink>
void run_monte_carlo(const ConvexFunction& phi, const IntegrationSpec& spec, const Proxy& proxy, bool need_gradient,
                     int batches, std::vector<std::uint64_t>& resampled, Sink sink) {
  parallel_for(batches, spec.workers(), [&](int b) {
    std::mt19937_64 rng = stream_for(spec.seed, b);
    const std::uint64_t count = batch_size(spec.budget, batches, b);
    Vec grad;
    for (std::uint64_t i = 0; i < count; ++i) {
      int tries = 0;
      for (;;) {
        Vec x = proxy.sample(rng);
        const ExtendedReal v = phi(x);
        if (v.is_infinite()) {
          sink(b, x, 0.0, grad, 0.0, false);
          break;
        }
        if (need_gradient) {
          auto g = phi.try_gradient(x);
          if (!g) {
            ++resampled[b];
            if (++tries > kMaxResample) throw DegenerateError("monte carlo: repeated non-differentiable samples");
            continue;
          }
          grad = std::move(*g);
        }
        const double w = std::exp(-v.value() - proxy.log_density(x));
        sink(b, x, v.value(), grad, w, true);
        break;
      }
    }
  });
}

}  // namespace

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  if (m < 1) throw DomainError("gauss_legendre: need at least one node");
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[m - 1 - i] = x;
    weights[i] = weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

std::string backend_name(Backend b) { return b == Backend::kQuadrature ? "quadrature" : "mc"; }

Backend backend_from_name(const std::string& name) {
  if (name == "quadrature") return Backend::kQuadrature;
  if (name == "mc" || name == "monte_carlo") return Backend::kMonteCarlo;
  throw DomainError("unknown backend '" + name + "' (expected quadrature or mc)");
}

IntegrationSpec IntegrationSpec::quadrature(std::uint64_t budget) {
  IntegrationSpec s;
  s.backend = Backend::kQuadrature;
  s.budget = budget;
  s.target_rel_tol = 1e-6;
  return s;
}

IntegrationSpec IntegrationSpec::monte_carlo(std::uint64_t budget, std::uint64_t seed) {
  IntegrationSpec s;
  s.backend = Backend::kMonteCarlo;
  s.budget = budget;
  s.seed = seed;
  s.target_rel_tol = 1e-2;
  return s;
}

void IntegrationSpec::validate() const {
  if (budget < 1) throw DomainError("integration spec: budget must be >= 1");
  if (!(truncation_radius > 0.0) || !std::isfinite(truncation_radius))
    throw DomainError("integration spec: truncation radius must be > 0");
  if (!(target_rel_tol > 0.0)) throw DomainError("integration spec: tolerance must be > 0");
  if (sphere_points < 0) throw DomainError("integration spec: sphere_points must be >= 0");
}

int IntegrationSpec::workers() const {
  if (!parallel) return 1;
  return std::max(1u, std::thread::hardware_concurrency());
}

int IntegrationSpec::sphere_points_for(int n) const {
  if (sphere_points > 0) return sphere_points;
  return n == 2 ? 512 : 2048;
}

std::string IntegrationSpec::fingerprint() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s|%llu|%.17g|%llu|%d", backend_name(backend).c_str(),
                static_cast<unsigned long long>(budget), truncation_radius, static_cast<unsigned long long>(seed),
                workers());
  // FNV-1a.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char* c = buf; *c; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 0x100000001b3ull;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Estimate VectorIntegral::derive(const std::function<Vec(const Vec&)>& g) const {
  Estimate e;
  e.value = g(value);
  if (backend == Backend::kQuadrature) {
    e.error = (e.value - g(replicates.row(1).transpose())).cwiseAbs();
    return e;
  }
  const int B = static_cast<int>(replicates.rows());
  if (B < 2) {
    e.error = Vec::Constant(e.value.size(), std::numeric_limits<double>::infinity());
    return e;
  }
  const double total = replicate_counts.sum();
  Vec S = Vec::Zero(value.size());
  for (int b = 0; b < B; ++b) S += replicate_counts(b) * replicates.row(b).transpose();
  Mat theta(B, e.value.size());
  for (int b = 0; b < B; ++b) {
    const Vec loo = (S - replicate_counts(b) * replicates.row(b).transpose()) / (total - replicate_counts(b));
    theta.row(b) = g(loo).transpose();
  }
  const Vec mean = theta.colwise().mean().transpose();
  Vec var = Vec::Zero(e.value.size());
  for (int b = 0; b < B; ++b) var += (theta.row(b).transpose() - mean).cwiseAbs2();
  e.error = (var * (B - 1.0) / B).cwiseSqrt();
  return e;
}

IntegralResult VectorIntegral::component(int i, double target_rel_tol) const {
  IntegralResult r;
  r.value = value(i);
  r.stderr_or_bound = error(i);
  r.spec_fingerprint = spec_fingerprint;
  r.resampled = resampled;
  r.tolerance_met = error(i) <= target_rel_tol * std::max(std::abs(value(i)), 1e-300);
  return r;
}

VectorIntegral integrate_vector(const ConvexFunction& potential, int k, const VectorIntegrand& integrand,
                                const IntegrationSpec& spec, bool need_gradient) {
  spec.validate();
  if (k < 1) throw DomainError("integrate_vector: need at least one component");
  VectorIntegral out;
  out.backend = spec.backend;
  out.spec_fingerprint = spec.fingerprint();
  const Evaluator ev{potential, &integrand, k, need_gradient};

  if (spec.backend == Backend::kQuadrature) {
    const NodeSet fine = quadrature_nodes(potential, spec, false);
    const NodeSet coarse = quadrature_nodes(potential, spec, true);
    const QuadratureSums a = run_quadrature(fine, ev, spec.workers());
    const QuadratureSums b = run_quadrature(coarse, ev, spec.workers());
    out.value = a.sum;
    out.error = (a.sum - b.sum).cwiseAbs();
    out.replicates.resize(2, k);
    out.replicates.row(0) = a.sum.transpose();
    out.replicates.row(1) = b.sum.transpose();
    out.replicate_counts = Vec::Ones(2);
    out.evaluations = a.evaluations + b.evaluations;
    out.rejected = a.rejected;
    out.resampled = a.resampled;
    return out;
  }

  const auto proxy = make_proxy(potential);
  const int B = static_cast<int>(std::min<std::uint64_t>(kBatches, spec.budget));
  Mat sums = Mat::Zero(B, k);
  std::vector<std::uint64_t> resampled(B, 0), rejected(B, 0);
  std::vector<std::vector<double>> scratch(B, std::vector<double>(k));
  run_monte_carlo(potential, spec, *proxy, need_gradient, B, resampled,
                  [&](int b, const Vec& x, double phi, const Vec& grad, double w, bool finite) {
                    if (!finite) return;
                    double* o = scratch[b].data();
                    std::fill(o, o + k, 0.0);
                    if (!integrand(PointEval{x, phi, grad}, o)) {
                      ++rejected[b];
                      return;
                    }
                    for (int i = 0; i < k; ++i) sums(b, i) += w * o[i];
                  });
  out.replicates.resize(B, k);
  out.replicate_counts.resize(B);
  for (int b = 0; b < B; ++b) {
    const double nb = static_cast<double>(batch_size(spec.budget, B, b));
    out.replicate_counts(b) = nb;
    out.replicates.row(b) = sums.row(b) / nb;
    out.resampled += resampled[b];
    out.rejected += rejected[b];
  }
  out.evaluations = spec.budget + out.resampled;
  out.value = pairwise_rows(sums, 0, B) / static_cast<double>(spec.budget);
  out.error = out.derive([](const Vec& v) { return v; }).error;
  return out;
}

IntegralResult integrate_rn(const std::function<double(const Vec&)>& integrand, const ConvexFunction& potential,
                            const IntegrationSpec& spec) {
  VectorIntegral v = integrate_vector(
      potential, 1,
      [&](const PointEval& p, double* out) {
        out[0] = integrand(p.x);
        return true;
      },
      spec, false);
  return v.component(0, spec.target_rel_tol);
}

IntegralResult integrate_sphere(const std::function<double(const Vec&)>& integrand, int n,
                                const IntegrationSpec& spec) {
  spec.validate();
  if (n != 2 && n != 3) throw DomainError("integrate_sphere: n must be 2 or 3");
  const int count = spec.sphere_points_for(n);
  auto apply = [&](int c) {
    const SphereRule rule = sphere_rule(n, c);
    double s = 0.0;
    for (int j = 0; j < c; ++j) s += rule.weights(j) * integrand(rule.points.row(j).transpose());
    return s;
  };
  IntegralResult r;
  r.value = apply(count);
  r.stderr_or_bound = std::abs(r.value - apply(std::max(3, count / 2)));
  r.spec_fingerprint = spec.fingerprint();
  r.tolerance_met = r.stderr_or_bound <= spec.target_rel_tol * std::abs(r.value);
  return r;
}

PushforwardSamples pushforward_samples(const ConvexFunction& potential, const IntegrationSpec& spec) {
  spec.validate();
  const int n = potential.dim();
  PushforwardSamples out;
  out.spec_fingerprint = spec.fingerprint();
  if (spec.backend == Backend::kQuadrature) {
    const NodeSet nodes = quadrature_nodes(potential, spec, false);
    std::vector<Vec> ys;
    std::vector<double> ws;
    for (Eigen::Index j = 0; j < nodes.w.size(); ++j) {
      Vec x = nodes.x.col(j);
      const ExtendedReal v = potential(x);
      if (v.is_infinite()) continue;
      auto g = potential.try_gradient(x);
      if (!g) {
        ++out.resampled;
        Vec d = Vec::Ones(n).normalized();
        x += 1e-7 * (1.0 + x.norm()) * d;
        g = potential.try_gradient(x);
        if (!g) throw DegenerateError("pushforward: repeated non-differentiable points");
      }
      ys.push_back(*g);
      ws.push_back(nodes.w(j) * std::exp(-potential(x).value()));
    }
    out.y.resize(n, static_cast<Eigen::Index>(ys.size()));
    out.w.resize(static_cast<Eigen::Index>(ys.size()));
    for (std::size_t j = 0; j < ys.size(); ++j) {
      out.y.col(static_cast<Eigen::Index>(j)) = ys[j];
      out.w(static_cast<Eigen::Index>(j)) = ws[j];
    }
    return out;
  }
  const auto proxy = make_proxy(potential);
  const int B = static_cast<int>(std::min<std::uint64_t>(kBatches, spec.budget));
  std::vector<std::vector<double>> ys(B), ws(B);
  std::vector<std::uint64_t> resampled(B, 0);
  const double inv_n = 1.0 / static_cast<double>(spec.budget);
  run_monte_carlo(potential, spec, *proxy, true, B, resampled,
                  [&](int b, const Vec&, double, const Vec& grad, double w, bool finite) {
                    if (!finite) return;
                    for (int i = 0; i < n; ++i) ys[b].push_back(grad(i));
                    ws[b].push_back(w * inv_n);
                  });
  std::size_t total = 0;
  for (int b = 0; b < B; ++b) total += ws[b].size();
  out.y.resize(n, static_cast<Eigen::Index>(total));
  out.w.resize(static_cast<Eigen::Index>(total));
  Eigen::Index c = 0;
  for (int b = 0; b < B; ++b) {
    out.resampled += resampled[b];
    for (std::size_t j = 0; j < ws[b].size(); ++j, ++c) {
      for (int i = 0; i < n; ++i) out.y(i, c) = ys[b][j * n + i];
      out.w(c) = ws[b][j];
    }
  }
  return out;
}

IntegralResult integrate_box(const std::function<double(const Vec&)>& integrand, const Vec& lower, const Vec& upper,
                             const Vec& focus, std::uint64_t budget) {
  const int n = static_cast<int>(lower.size());
  if (upper.size() != n || focus.size() != n) throw DomainError("integrate_box: dimension mismatch");
  const Vec center = 0.5 * (lower + upper), hw = 0.5 * (upper - lower);
  if ((hw.array() <= 0.0).any()) throw DomainError("integrate_box: empty box");
  auto apply = [&](bool coarse) {
    const NodeSet nodes = tensor_nodes(center, Mat::Identity(n, n), hw, focus - center, budget, coarse);
    double s = 0.0, c = 0.0;
    for (Eigen::Index j = 0; j < nodes.w.size(); ++j) {
      // Kahan summation; the node count can be large.
      const double y = nodes.w(j) * integrand(nodes.x.col(j)) - c;
      const double t = s + y;
      c = (t - s) - y;
      s = t;
    }
    return s;
  };
  IntegralResult r;
  r.value = apply(false);
  r.stderr_or_bound = std::abs(r.value - apply(true));
  r.tolerance_met = true;
  return r;
}

}  // namespace lyz
