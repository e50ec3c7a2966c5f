#include "lyz/sampled_grid.hpp"

#include "lyz/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lyz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> axis_nodes(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  return out;
}

std::vector<std::size_t> strides_of(const std::vector<int>& shape) {
  std::vector<std::size_t> s(shape.size(), 1);
  for (int k = static_cast<int>(shape.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * shape[k + 1];
  return s;
}

// Applies `fn` to every 1-D line of the lattice along `axis`.
template <class Fn>
void for_each_line(const std::vector<int>& shape, int axis, Fn fn) {
  const auto strides = strides_of(shape);
  std::size_t total = 1;
  for (int s : shape) total *= s;
  const std::size_t lines = total / shape[axis];
  std::vector<int> idx(shape.size(), 0);
  for (std::size_t l = 0; l < lines; ++l) {
    std::size_t base = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) base += idx[k] * strides[k];
    fn(base, strides[axis]);
    for (int k = static_cast<int>(shape.size()) - 1; k >= 0; --k) {
      if (k == axis) continue;
      if (++idx[k] < shape[k]) break;
      idx[k] = 0;
    }
  }
}

}  // namespace

std::vector<double> discrete_legendre_1d(const std::vector<double>& x, const std::vector<double>& v,
                                         const std::vector<double>& y) {
  if (x.size() != v.size()) throw DomainError("discrete_legendre_1d: size mismatch");
  // Lower hull of finite points; x is ascending.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(v[i])) continue;
    if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("discrete_legendre_1d: nodes must increase");
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (x[i] - x[a]);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<double> out(y.size(), -kInf);
  if (hull.empty()) return out;
  std::size_t h = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (j > 0 && y[j] < y[j - 1]) throw DomainError("discrete_legendre_1d: dual nodes must be sorted");
    while (h + 1 < hull.size() &&
           x[hull[h + 1]] * y[j] - v[hull[h + 1]] >= x[hull[h]] * y[j] - v[hull[h]])
      ++h;
    out[j] = x[hull[h]] * y[j] - v[hull[h]];
  }
  return out;
}

std::vector<double> discrete_legendre_nd(const std::vector<std::vector<double>>& axes,
                                         const std::vector<double>& values,
                                         const std::vector<std::vector<double>>& dual_axes) {
  const int n = static_cast<int>(axes.size());
  if (n == 0 || static_cast<int>(dual_axes.size()) != n)
    throw DomainError("discrete_legendre_nd: axis count mismatch");
  std::vector<int> shape(n);
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    if (axes[k].size() != dual_axes[k].size())
      throw DomainError("discrete_legendre_nd: dual axes must match the lattice shape");
    shape[k] = static_cast<int>(axes[k].size());
    total *= shape[k];
  }
  if (values.size() != total) throw DomainError("discrete_legendre_nd: value count mismatch");

  // Each pass takes the 1-D transform along one axis and negates, so the next
  // pass again sees a function to be conjugated.
  std::vector<double> g = values;
  std::vector<double> line, res;
  for (int k = 0; k < n; ++k) {
    for_each_line(shape, k, [&](std::size_t base, std::size_t stride) {
      line.resize(shape[k]);
      for (int i = 0; i < shape[k]; ++i) line[i] = g[base + i * stride];
      res = discrete_legendre_1d(axes[k], line, dual_axes[k]);
      for (int i = 0; i < shape[k]; ++i) g[base + i * stride] = -res[i];
    });
  }
  for (double& v : g) v = -v;
  return g;
}

SampledGrid::SampledGrid(Raw, Vec lower, Vec upper, std::vector<int> shape, std::vector<double> values)
    : lower_(std::move(lower)), upper_(std::move(upper)), shape_(std::move(shape)), values_(std::move(values)) {}

SampledGrid::SampledGrid(Vec lower, Vec upper, std::vector<int> shape, std::vector<double> values)
    : lower_(std::move(lower)), upper_(std::move(upper)), shape_(std::move(shape)), values_(std::move(values)) {
  const int n = dim();
  if (n < 1) throw DomainError("grid: empty shape");
  if (lower_.size() != n || upper_.size() != n) throw DomainError("grid: bounds do not match the shape");
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    if (shape_[k] < 2) throw DomainError("grid: every axis needs at least two nodes");
    if (!(upper_(k) > lower_(k))) throw DomainError("grid: empty box");
    total *= shape_[k];
  }
  if (values_.size() != total) throw DomainError("grid: value count does not match the shape");
  bool proper = false;
  for (double v : values_) {
    if (std::isnan(v) || v == -kInf) throw DomainError("grid: values must be finite or +inf");
    proper = proper || std::isfinite(v);
  }
  if (!proper) throw DomainError("grid: function is not proper (no finite value)");

  std::vector<std::vector<double>> axes(n);
  for (int k = 0; k < n; ++k) axes[k] = axis_nodes(lower_(k), upper_(k), shape_[k]);

  if (n == 1) {
    // Exact lower envelope by linear interpolation along the hull.
    std::vector<double> env = values_;
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) continue;
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2], b = hull.back();
        const double cross =
            (axes[0][b] - axes[0][a]) * (values_[i] - values_[a]) - (values_[b] - values_[a]) * (axes[0][i] - axes[0][a]);
        if (cross <= 0.0) hull.pop_back();
        else break;
      }
      hull.push_back(i);
    }
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
      const std::size_t a = hull[h], b = hull[h + 1];
      for (std::size_t i = a + 1; i < b; ++i) {
        const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
        env[i] = (1.0 - t) * values_[a] + t * values_[b];
      }
    }
    for (std::size_t i = 0; i < env.size(); ++i)
      if (std::isfinite(values_[i])) convexity_defect_ = std::max(convexity_defect_, values_[i] - env[i]);
    double scale = 1.0;
    for (double v : values_)
      if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
    if (convexity_defect_ > 1e-12 * scale) {
      input_was_convex_ = false;
      values_ = std::move(env);
    }
    return;
  }

  // n >= 2: envelope as the discrete biconjugate. Slope discretization makes
  // this an under-estimate of order (primal spacing) x (dual spacing), which
  // sets the convexity tolerance.
  SampledGrid dual = conjugate();
  std::vector<std::vector<double>> dual_axes(n);
  double tol = 0.0;
  for (int k = 0; k < n; ++k) {
    dual_axes[k] = axis_nodes(dual.lower()(k), dual.upper()(k), shape_[k]);
    tol += 0.5 * spacing(k) * dual.spacing(k);
  }
  std::vector<double> env = discrete_legendre_nd(dual_axes, dual.values(), axes);
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (!std::isfinite(values_[i])) continue;
    convexity_defect_ = std::max(convexity_defect_, values_[i] - env[i]);
  }
  if (convexity_defect_ > tol) {
    input_was_convex_ = false;
    for (std::size_t i = 0; i < env.size(); ++i)
      if (std::isfinite(values_[i])) values_[i] = env[i];
  }
}

double SampledGrid::spacing(int axis) const { return (upper_(axis) - lower_(axis)) / (shape_[axis] - 1); }

double SampledGrid::node(int axis, int i) const { return lower_(axis) + spacing(axis) * i; }

ExtendedReal SampledGrid::evaluate(const Vec& x) const {
  const int n = dim();
  if (x.size() != n) throw DomainError("grid evaluate: dimension mismatch");
  std::vector<int> i0(n);
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) {
    const double h = spacing(k);
    const double slack = 1e-12 * h;
    if (!(x(k) >= lower_(k) - slack && x(k) <= upper_(k) + slack)) return ExtendedReal::infinity();
    double s = (x(k) - lower_(k)) / h;
    s = std::clamp(s, 0.0, static_cast<double>(shape_[k] - 1));
    int i = std::min(static_cast<int>(std::floor(s)), shape_[k] - 2);
    i0[k] = i;
    t[k] = s - i;
  }
  const auto strides = strides_of(shape_);
  double acc = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k) {
      const int bit = (corner >> k) & 1;
      w *= bit ? t[k] : 1.0 - t[k];
      idx += (i0[k] + bit) * strides[k];
    }
    if (w == 0.0) continue;
    const double v = values_[idx];
    if (!std::isfinite(v)) return ExtendedReal::infinity();
    acc += w * v;
  }
  return acc;
}

Vec SampledGrid::gradient(const Vec& x) const {
  const int n = dim();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Vec g(n);
  const double fx = evaluate(x).as_double();
  for (int k = 0; k < n; ++k) {
    const double h = spacing(k);
    Vec xp = x, xm = x;
    xp(k) = std::min(x(k) + h, upper_(k));
    xm(k) = std::max(x(k) - h, lower_(k));
    const double fp = evaluate(xp).as_double(), fm = evaluate(xm).as_double();
    const double span = xp(k) - xm(k);
    if (std::isfinite(fp) && std::isfinite(fm) && span > 0.0) {
      g(k) = (fp - fm) / span;
    } else if (std::isfinite(fp) && std::isfinite(fx) && xp(k) > x(k)) {
      g(k) = (fp - fx) / (xp(k) - x(k));
    } else if (std::isfinite(fm) && std::isfinite(fx) && x(k) > xm(k)) {
      g(k) = (fx - fm) / (x(k) - xm(k));
    } else {
      g(k) = nan;
    }
  }
  return g;
}

SampledGrid SampledGrid::conjugate() const {
  const int n = dim();
  const auto strides = strides_of(shape_);
  std::vector<std::vector<double>> axes(n), dual_axes(n);
  Vec lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    axes[k] = axis_nodes(lower_(k), upper_(k), shape_[k]);
    double smin = kInf, smax = -kInf;
    const double h = spacing(k);
    for_each_line(shape_, k, [&](std::size_t base, std::size_t stride) {
      for (int i = 0; i + 1 < shape_[k]; ++i) {
        const double a = values_[base + i * stride], b = values_[base + (i + 1) * stride];
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        const double s = (b - a) / h;
        smin = std::min(smin, s);
        smax = std::max(smax, s);
      }
    });
    if (!std::isfinite(smin)) {
      smin = -1.0;
      smax = 1.0;
    }
    if (smax - smin < 1e-12 * (1.0 + std::abs(smin))) {
      smin -= 0.5;
      smax += 0.5;
    }
    lo(k) = smin;
    hi(k) = smax;
    dual_axes[k] = axis_nodes(smin, smax, shape_[k]);
  }
  (void)strides;
  std::vector<double> out = discrete_legendre_nd(axes, values_, dual_axes);
  return SampledGrid(Raw{}, lo, hi, shape_, std::move(out));
}

}  // namespace lyz
