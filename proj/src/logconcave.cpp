#include "lyz/logconcave.hpp"

#include "lyz/constants.hpp"
#include "lyz/error.hpp"
#include "lyz/legendre.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>
#include <random>

namespace lyz {

struct LogConcaveFunction::Cache {
  std::mutex mu;
  std::map<std::string, IntegralResult> mass;
};

LogConcaveFunction::LogConcaveFunction(ConvexFunction potential)
    : phi_(std::move(potential)), class_a_(phi_.coercive()), cache_(std::make_shared<Cache>()) {}

double LogConcaveFunction::operator()(const Vec& x) const {
  const ExtendedReal v = phi_(x);
  return v.is_finite() ? std::exp(-v.value()) : 0.0;
}

std::string LogConcaveFunction::fingerprint() const {
  std::mt19937_64 rng(0x5eedull);
  std::normal_distribution<double> nd;
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ull;
    }
  };
  mix(static_cast<double>(dim()));
  for (int i = 0; i < 16; ++i) {
    Vec x(dim());
    for (int k = 0; k < dim(); ++k) x(k) = nd(rng);
    mix(phi_(x).as_double());
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<IntegralResult> LogConcaveFunction::cached_mass(const IntegrationSpec& spec) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->mass.find(spec.fingerprint());
  if (it == cache_->mass.end()) return std::nullopt;
  return it->second;
}

void LogConcaveFunction::store_mass(const IntegrationSpec& spec, const IntegralResult& r) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->mass.emplace(spec.fingerprint(), r);
}

GaussianFunction::GaussianFunction(Mat T) : T_(std::move(T)) {
  if (T_.rows() != T_.cols() || T_.rows() < 1) throw DomainError("gaussian: T must be square");
  if (!Eigen::FullPivLU<Mat>(T_).isInvertible()) throw DomainError("gaussian: T must be invertible");
}

GaussianFunction GaussianFunction::standard(int n) {
  if (n < 1) throw DomainError("gaussian: dimension must be positive");
  return GaussianFunction(Mat::Identity(n, n));
}

GaussianFunction GaussianFunction::from_matrix(const Mat& M) {
  require_spd(M, "gaussian matrix", 1e-10);
  return GaussianFunction(spd_sqrt(symmetrize(M)));
}

double GaussianFunction::mass() const { return constants::gaussian_mass(dim()) / std::abs(T_.determinant()); }

LogConcaveFunction GaussianFunction::function() const { return LogConcaveFunction(ConvexFunction::quadratic(M())); }

void require_class_a(const LogConcaveFunction& f, const std::string& what) {
  if (!f.class_a())
    throw NotIntegrable(what + ": " + f.describe() + " is outside class A (potential not coercive)");
}

ConvexFunction support_function(const LogConcaveFunction& f) { return legendre_conjugate(f.potential()); }

LogConcaveFunction polar_function(const LogConcaveFunction& f) {
  return LogConcaveFunction(simplify(legendre_conjugate(f.potential())));
}

LogConcaveFunction minkowski_combine(double alpha, const LogConcaveFunction& f, double beta,
                                     const LogConcaveFunction& g) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("minkowski_combine: coefficients must be > 0");
  if (f.dim() != g.dim()) throw DomainError("minkowski_combine: dimension mismatch");
  const ConvexFunction raw = inf_convolution(scalar_right_mult(f.potential(), alpha),
                                             scalar_right_mult(g.potential(), beta));
  return LogConcaveFunction(simplify(raw));
}

LogConcaveFunction compose(const LogConcaveFunction& f, const Mat& T) {
  return LogConcaveFunction(simplify(compose(f.potential(), T)));
}

IntegralResult integrate_rn(const std::function<double(const Vec&)>& integrand, const LogConcaveFunction& weight,
                            const IntegrationSpec& spec) {
  require_class_a(weight, "integrate_rn");
  return integrate_rn(integrand, weight.potential(), spec);
}

IntegralResult total_mass(const LogConcaveFunction& f, const IntegrationSpec& spec) {
  require_class_a(f, "total_mass");
  if (auto c = f.cached_mass(spec)) return *c;
  IntegralResult r = integrate_rn([](const Vec&) { return 1.0; }, f.potential(), spec);
  if (!(r.value > 0.0) || !std::isfinite(r.value)) throw DegenerateError("total_mass: non-positive mass estimate");
  f.store_mass(spec, r);
  return r;
}

namespace {

// Integrals of (1, h_g(grad phi)) against f in one pass.
VectorIntegral variation_integrals(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                   const IntegrationSpec& spec) {
  require_class_a(f, "first_variation");
  require_class_a(g, "first_variation");
  if (f.dim() != g.dim()) throw DomainError("first_variation: dimension mismatch");
  const ConvexFunction hg = simplify(support_function(g));
  return integrate_vector(
      f.potential(), 2,
      [&](const PointEval& p, double* out) {
        const ExtendedReal h = hg(p.grad);
        if (h.is_infinite())
          throw NotIntegrable("first_variation: support function of g is infinite on the support of mu_f");
        out[0] = 1.0;
        out[1] = h.value();
        return true;
      },
      spec);
}

}  // namespace

IntegralResult first_variation(const LogConcaveFunction& f, const LogConcaveFunction& g,
                               const IntegrationSpec& spec) {
  return variation_integrals(f, g, spec).component(1, spec.target_rel_tol);
}

IntegralResult normalized_first_variation(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                          const IntegrationSpec& spec) {
  const VectorIntegral v = variation_integrals(f, g, spec);
  const Estimate e = v.derive([](const Vec& s) { return Vec::Constant(1, s(1) / s(0)); });
  IntegralResult r;
  r.value = e.value(0);
  r.stderr_or_bound = e.error(0);
  r.spec_fingerprint = v.spec_fingerprint;
  r.resampled = v.resampled;
  r.tolerance_met = e.error(0) <= spec.target_rel_tol * std::abs(e.value(0));
  return r;
}

DifferenceQuotient first_variation_quotient(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                            const IntegrationSpec& spec, const std::vector<double>& ts) {
  if (ts.size() < 2) throw DomainError("first_variation_quotient: need at least two step sizes");
  DifferenceQuotient dq;
  const double J0 = total_mass(f, spec).value;
  for (double t : ts) {
    if (!(t > 0.0)) throw DomainError("first_variation_quotient: steps must be > 0");
    const double Jt = total_mass(minkowski_combine(1.0, f, t, g), spec).value;
    dq.t.push_back(t);
    dq.quotient.push_back((Jt - J0) / t);
  }
  // Q(t) = dJ + c t + O(t^2): eliminate the linear term.
  const double t1 = dq.t[0], t2 = dq.t[1];
  dq.richardson = (t1 * dq.quotient[1] - t2 * dq.quotient[0]) / (t1 - t2);
  const IntegralResult pf = first_variation(f, g, spec);
  dq.pushforward = pf.value;
  dq.pushforward_error = pf.stderr_or_bound;
  return dq;
}

}  // namespace lyz
