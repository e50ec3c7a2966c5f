#include "lyz/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace lyz {

MinimizeResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& start, double step,
                           double f_tol, double x_tol, int max_evals) {
  const int n = static_cast<int>(start.size());
  const double inf = std::numeric_limits<double>::infinity();
  MinimizeResult out;
  auto eval = [&](const Vec& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isnan(v) ? inf : v;
  };

  std::vector<Vec> simplex(n + 1, start);
  std::vector<double> fv(n + 1);
  for (int k = 0; k < n; ++k) simplex[k + 1](k) += step;
  for (int k = 0; k <= n; ++k) fv[k] = eval(simplex[k]);

  std::vector<int> order(n + 1);
  while (out.evaluations < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order.front(), worst = order.back(), second = order[n - 1];

    double diam = 0.0;
    for (int k = 0; k <= n; ++k) diam = std::max(diam, (simplex[k] - simplex[best]).norm());
    const double spread = fv[worst] - fv[best];
    if (std::isfinite(fv[worst]) && spread <= f_tol * (1.0 + std::abs(fv[best])) && diam <= x_tol) break;
    if (diam <= 1e-15 * (1.0 + simplex[best].norm())) break;

    Vec centroid = Vec::Zero(n);
    for (int k = 0; k <= n; ++k)
      if (k != worst) centroid += simplex[k];
    centroid /= n;

    Vec xr = centroid + (centroid - simplex[worst]);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      Vec xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (int k = 0; k <= n; ++k) {
      if (k == best) continue;
      simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
      fv[k] = eval(simplex[k]);
    }
  }
  const int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  out.argmin = simplex[best];
  out.value = fv[best];
  return out;
}

}  // namespace lyz
