#pragma once

#include "lyz/logconcave.hpp"
#include "lyz/sphere.hpp"

#include <optional>
#include <string>

namespace lyz {

// Support function of Pi f, h(y) = (1/2) int |<grad phi(x), y>| f(x) dx,
// tabulated on a sphere rule.
struct ProjectionFunctional {
  int n = 0;
  SphereRule directions;
  Vec h;        // h at each direction
  Vec h_error;
  std::string source_fingerprint;
  std::string spec_fingerprint;

  // 1-homogeneous extension of the table; n = 2 interpolates linearly in
  // the angle. Throws DomainError for n = 3 off the table.
  double support(const Vec& y) const;
};

ProjectionFunctional projection_functional(const LogConcaveFunction& f, const IntegrationSpec& spec);

IntegralResult projection_support(const LogConcaveFunction& f, const Vec& y, const IntegrationSpec& spec);

// h at several directions (rows of `ys`) from one integration.
Estimate projection_support_many(const LogConcaveFunction& f, const Mat& ys, const IntegrationSpec& spec);

struct PolarProjectionMass {
  double value = 0.0;          // Gamma(n) int_S h^{-n} du
  double error = 0.0;          // integration error plus sphere-rule error
  double sphere_error = 0.0;
  // int e^{-h(y)} dy on a Cartesian grid, n = 2 only.
  std::optional<double> direct;
  double direct_error = 0.0;
};

PolarProjectionMass polar_projection_mass(const LogConcaveFunction& f, const IntegrationSpec& spec,
                                          bool direct_check = true);

// int |grad f| dx = int |grad phi| f dx.
IntegralResult total_variation(const LogConcaveFunction& f, const IntegrationSpec& spec);

// (int f^{n/(n-1)} dx)^{(n-1)/n}.
IntegralResult sobolev_norm(const LogConcaveFunction& f, const IntegrationSpec& spec);

struct PettyChain {
  double L = 0.0, L_error = 0.0;  // total variation
  double M = 0.0, M_error = 0.0;  // projection term
  double R = 0.0, R_error = 0.0;  // Sobolev term
  double gap1 = 0.0, gap1_error = 0.0;  // L - M, jointly estimated
  double gap2 = 0.0, gap2_error = 0.0;  // M - R
  double polar_mass = 0.0, polar_mass_error = 0.0;
  bool first_holds = false;   // gap1 >= -3 sigma
  bool second_holds = false;  // gap2 >= -3 sigma
  std::string spec_fingerprint;
};

PettyChain petty_chain_report(const LogConcaveFunction& f, const IntegrationSpec& spec);

// Constant multiplying J(Pi° f)^{-1/n} in the projection term:
// n omega_n^{1/n} [omega_{n-1}^n / (omega_n^n Gamma(n+1))]^{-1/n}.
double projection_term_constant(int n);

}  // namespace lyz
