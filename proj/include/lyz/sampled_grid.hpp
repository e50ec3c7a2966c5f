#pragma once

#include "lyz/extended_real.hpp"
#include "lyz/linalg.hpp"

#include <vector>

namespace lyz {

// Values of a convex function on a uniform lattice over an axis-aligned box,
// stored row-major (last axis fastest). +inf entries mark points outside the
// effective domain. Lattice data is replaced by its lower convex envelope on
// construction unless it is already convex within tolerance.
class SampledGrid {
 public:
  SampledGrid(Vec lower, Vec upper, std::vector<int> shape, std::vector<double> values);

  int dim() const { return static_cast<int>(shape_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& values() const { return values_; }
  double spacing(int axis) const;
  double node(int axis, int i) const;
  std::size_t size() const { return values_.size(); }

  // True when the ingested data needed no convexification.
  bool input_was_convex() const { return input_was_convex_; }
  // Largest amount by which the ingested data exceeded its convex envelope.
  double convexity_defect() const { return convexity_defect_; }

  // Multilinear interpolation of the lattice values; +inf outside the box.
  ExtendedReal evaluate(const Vec& x) const;
  // Central differences with step equal to one lattice spacing per axis
  // (one-sided at the box faces).
  Vec gradient(const Vec& x) const;

  // Discrete Legendre transform: one lower-envelope pass per axis. The dual
  // lattice has the same shape and spans the observed slope range per axis.
  SampledGrid conjugate() const;

 private:
  struct Raw {};
  SampledGrid(Raw, Vec lower, Vec upper, std::vector<int> shape, std::vector<double> values);
  Vec lower_, upper_;
  std::vector<int> shape_;
  std::vector<double> values_;
  bool input_was_convex_ = true;
  double convexity_defect_ = 0.0;
};

// One-dimensional discrete Legendre transform: out[j] = max_i x[i] y[j] - v[i]
// over finite v[i]. `y` must be sorted ascending. Runs in O(|x| + |y|) via the
// lower convex hull of the points (x[i], v[i]).
std::vector<double> discrete_legendre_1d(const std::vector<double>& x, const std::vector<double>& v,
                                         const std::vector<double>& y);

// Separable discrete Legendre transform of lattice data onto the given dual
// axes: out(y) = max over lattice x of <x, y> - values(x). Each dual axis
// has as many nodes as the matching primal axis.
std::vector<double> discrete_legendre_nd(const std::vector<std::vector<double>>& axes,
                                         const std::vector<double>& values,
                                         const std::vector<std::vector<double>>& dual_axes);

}  // namespace lyz
