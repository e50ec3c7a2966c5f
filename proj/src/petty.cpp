#include "lyz/petty.hpp"

#include "lyz/constants.hpp"
#include "lyz/error.hpp"

#include <cmath>
#include <numbers>

namespace lyz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Half-size rule for the sphere-discretization error: every other point of
// the offset trapezoid rule (n = 2) or a separate Fibonacci set (n = 3).
struct ProfileRules {
  SphereRule full;
  SphereRule half;
  bool half_is_subset = false;
};

ProfileRules profile_rules(int n, const IntegrationSpec& spec) {
  ProfileRules r;
  const int D = spec.sphere_points_for(n);
  r.full = sphere_rule(n, D);
  if (n == 2 && D % 2 == 0) {
    r.half_is_subset = true;
    r.half.points.resize(D / 2, 2);
    r.half.weights = Vec::Constant(D / 2, constants::sphere_area(2) / (D / 2));
    for (int j = 0; j < D / 2; ++j) r.half.points.row(j) = r.full.points.row(2 * j);
  } else {
    r.half = sphere_rule(n, std::max(3, D / 2));
  }
  return r;
}

// Components: [|grad phi|, |<grad phi, u_j>| on the full rule, then on the
// half rule unless it is a subset].
VectorIntegral profile_integrals(const LogConcaveFunction& f, const ProfileRules& rules,
                                 const IntegrationSpec& spec) {
  require_class_a(f, "projection functional");
  const int n = f.dim();
  if (n != 2 && n != 3) throw DomainError("projection functional: n must be 2 or 3");
  const Mat& U = rules.full.points;
  const Mat* H = rules.half_is_subset ? nullptr : &rules.half.points;
  const int D = static_cast<int>(U.rows());
  const int Dh = H ? static_cast<int>(H->rows()) : 0;
  return integrate_vector(
      f.potential(), 1 + D + Dh,
      [&](const PointEval& p, double* out) {
        out[0] = p.grad.norm();
        for (int j = 0; j < D; ++j) out[1 + j] = std::abs(U.row(j).dot(p.grad));
        for (int j = 0; j < Dh; ++j) out[1 + D + j] = std::abs(H->row(j).dot(p.grad));
        return true;
      },
      spec);
}

double sphere_sum(const SphereRule& rule, const Vec& h, int n) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < h.size(); ++j) s += rule.weights(j) * std::pow(h(j), -n);
  return s;
}

// Gamma(n) sum_j w_j h_j^{-n} on the full and the half rule, from the raw
// components (h = raw / 2).
std::pair<double, double> polar_mass_from(const Vec& s, const ProfileRules& rules, int n) {
  const int D = static_cast<int>(rules.full.points.rows());
  const Vec h = 0.5 * s.segment(1, D);
  if ((h.array() <= 0.0).any()) throw DegenerateError("polar_projection_mass: support of Pi f vanishes");
  Vec hh;
  if (rules.half_is_subset) {
    hh.resize(D / 2);
    for (int j = 0; j < D / 2; ++j) hh(j) = h(2 * j);
  } else {
    hh = 0.5 * s.segment(1 + D, rules.half.points.rows());
  }
  const double g = std::tgamma(static_cast<double>(n));
  return {g * sphere_sum(rules.full, h, n), g * sphere_sum(rules.half, hh, n)};
}

double interpolate_profile(const ProjectionFunctional& pf, const Vec& y) {
  const double r = y.norm();
  if (r == 0.0) return 0.0;
  const int D = static_cast<int>(pf.h.size());
  double theta = std::atan2(y(1), y(0));
  if (theta < 0.0) theta += kTwoPi;
  const double s = theta / (kTwoPi / D) - 0.5;
  const double fl = std::floor(s);
  const double t = s - fl;
  const int k0 = ((static_cast<int>(fl) % D) + D) % D, k1 = (k0 + 1) % D;
  return r * ((1.0 - t) * pf.h(k0) + t * pf.h(k1));
}

}  // namespace

double ProjectionFunctional::support(const Vec& y) const {
  require_dim(y, n, "projection support");
  if (n == 2) return interpolate_profile(*this, y);
  const double r = y.norm();
  if (r == 0.0) return 0.0;
  for (Eigen::Index j = 0; j < directions.points.rows(); ++j)
    if ((directions.points.row(j).transpose() - y / r).norm() < 1e-12) return r * h(j);
  throw DomainError("projection support: n = 3 evaluation is limited to the tabulated directions");
}

ProjectionFunctional projection_functional(const LogConcaveFunction& f, const IntegrationSpec& spec) {
  const ProfileRules rules = profile_rules(f.dim(), spec);
  const VectorIntegral v = profile_integrals(f, rules, spec);
  const int D = static_cast<int>(rules.full.points.rows());
  ProjectionFunctional pf;
  pf.n = f.dim();
  pf.directions = rules.full;
  pf.h = 0.5 * v.value.segment(1, D);
  pf.h_error = 0.5 * v.error.segment(1, D);
  pf.source_fingerprint = f.fingerprint();
  pf.spec_fingerprint = v.spec_fingerprint;
  return pf;
}

Estimate projection_support_many(const LogConcaveFunction& f, const Mat& ys, const IntegrationSpec& spec) {
  require_class_a(f, "projection_support");
  if (ys.cols() != f.dim()) throw DomainError("projection_support: dimension mismatch");
  const int k = static_cast<int>(ys.rows());
  const VectorIntegral v = integrate_vector(
      f.potential(), k,
      [&](const PointEval& p, double* out) {
        for (int j = 0; j < k; ++j) out[j] = 0.5 * std::abs(ys.row(j).dot(p.grad));
        return true;
      },
      spec);
  return Estimate{v.value, v.error};
}

IntegralResult projection_support(const LogConcaveFunction& f, const Vec& y, const IntegrationSpec& spec) {
  require_dim(y, f.dim(), "projection_support");
  const Estimate e = projection_support_many(f, y.transpose(), spec);
  IntegralResult r;
  r.value = e.value(0);
  r.stderr_or_bound = e.error(0);
  r.spec_fingerprint = spec.fingerprint();
  r.tolerance_met = e.error(0) <= spec.target_rel_tol * std::abs(e.value(0));
  return r;
}

PolarProjectionMass polar_projection_mass(const LogConcaveFunction& f, const IntegrationSpec& spec,
                                          bool direct_check) {
  const int n = f.dim();
  const ProfileRules rules = profile_rules(n, spec);
  const VectorIntegral v = profile_integrals(f, rules, spec);
  const Estimate e = v.derive([&](const Vec& s) { return Vec::Constant(1, polar_mass_from(s, rules, n).first); });
  const auto [full, half] = polar_mass_from(v.value, rules, n);
  PolarProjectionMass out;
  out.value = e.value(0);
  out.sphere_error = std::abs(full - half);
  out.error = e.error(0) + out.sphere_error;
  if (direct_check && n == 2) {
    ProjectionFunctional pf;
    pf.n = 2;
    pf.directions = rules.full;
    pf.h = 0.5 * v.value.segment(1, rules.full.points.rows());
    const double hmin = pf.h.minCoeff();
    const double B = 40.0 / hmin;
    const IntegralResult d = integrate_box([&](const Vec& y) { return std::exp(-interpolate_profile(pf, y)); },
                                           Vec::Constant(2, -B), Vec::Constant(2, B), Vec::Zero(2), 1u << 18);
    out.direct = d.value;
    out.direct_error = d.stderr_or_bound;
  }
  return out;
}

IntegralResult total_variation(const LogConcaveFunction& f, const IntegrationSpec& spec) {
  require_class_a(f, "total_variation");
  const VectorIntegral v = integrate_vector(
      f.potential(), 1,
      [](const PointEval& p, double* out) {
        out[0] = p.grad.norm();
        return true;
      },
      spec);
  return v.component(0, spec.target_rel_tol);
}

IntegralResult sobolev_norm(const LogConcaveFunction& f, const IntegrationSpec& spec) {
  require_class_a(f, "sobolev_norm");
  const int n = f.dim();
  if (n < 2) throw DomainError("sobolev_norm: n must be >= 2");
  const double q = static_cast<double>(n) / (n - 1);
  const LogConcaveFunction fq(simplify(scalar_left_mult(f.potential(), q)));
  const IntegralResult m = total_mass(fq, spec);
  IntegralResult r = m;
  const double e = (n - 1.0) / n;
  r.value = std::pow(m.value, e);
  r.stderr_or_bound = e * std::pow(m.value, e - 1.0) * m.stderr_or_bound;
  return r;
}

double projection_term_constant(int n) {
  using constants::omega;
  const double inner = std::pow(omega(n - 1), n) / (std::pow(omega(n), n) * std::tgamma(n + 1.0));
  return n * std::pow(omega(n), 1.0 / n) * std::pow(inner, -1.0 / n);
}

PettyChain petty_chain_report(const LogConcaveFunction& f, const IntegrationSpec& spec) {
  const int n = f.dim();
  const ProfileRules rules = profile_rules(n, spec);
  const VectorIntegral v = profile_integrals(f, rules, spec);
  const double c = projection_term_constant(n);
  const Estimate e = v.derive([&](const Vec& s) {
    const double J = polar_mass_from(s, rules, n).first;
    const double M = c * std::pow(J, -1.0 / n);
    return Vec((Vec(4) << s(0), M, s(0) - M, J).finished());
  });
  const auto [full, half] = polar_mass_from(v.value, rules, n);
  const double sphere_err = std::abs(full - half);
  PettyChain r;
  r.spec_fingerprint = v.spec_fingerprint;
  r.L = e.value(0);
  r.L_error = e.error(0);
  r.polar_mass = e.value(3);
  r.polar_mass_error = e.error(3) + sphere_err;
  r.M = e.value(1);
  const double M_sphere = r.M * sphere_err / (n * r.polar_mass);
  r.M_error = e.error(1) + M_sphere;
  r.gap1 = e.value(2);
  r.gap1_error = e.error(2) + M_sphere;
  const IntegralResult S = sobolev_norm(f, spec);
  r.R = n * std::pow(constants::omega(n), 1.0 / n) * S.value;
  r.R_error = n * std::pow(constants::omega(n), 1.0 / n) * S.stderr_or_bound;
  r.gap2 = r.M - r.R;
  r.gap2_error = std::hypot(r.M_error, r.R_error);
  r.first_holds = r.gap1 >= -3.0 * r.gap1_error;
  r.second_holds = r.gap2 >= -3.0 * r.gap2_error;
  return r;
}

}  // namespace lyz
