#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace specsig {

struct NmResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free simplex minimizer (standard reflect/expand/contract/shrink
// coefficients). Stops when the simplex diameter shrinks below rel_tol
// relative to the best vertex, or at max_iter. Objective may return +inf for
// infeasible points; the simplex reflects away from them.
template <class F>
NmResult nelder_mead(F&& f, const std::vector<double>& x0, double step = 0.25,
                     int max_iter = 2000, double rel_tol = 1e-10) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> verts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(verts[i]);

  auto order = [&]() {
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> v2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      v2[i] = verts[idx[i]];
      f2[i] = fv[idx[i]];
    }
    verts.swap(v2);
    fv.swap(f2);
  };

  auto diameter = [&]() {
    double d = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(verts[0][j]));
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(verts[i][j] - verts[0][j]));
    return d / scale;
  };

  NmResult res;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    order();
    if (diameter() < rel_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += verts[i][j] / static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (verts[n][j] - centroid[j]);
      return p;
    };

    const auto xr = blend(-1.0);  // reflection
    const double fr = f(xr);
    if (fr < fv[0]) {
      const auto xe = blend(-2.0);  // expansion
      const double fe = f(xe);
      if (fe < fr) {
        verts[n] = xe;
        fv[n] = fe;
      } else {
        verts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      verts[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      const auto xc = blend(outside ? -0.5 : 0.5);  // contraction
      const double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        verts[n] = xc;
        fv[n] = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) verts[i][j] = 0.5 * (verts[i][j] + verts[0][j]);
          fv[i] = f(verts[i]);
        }
      }
    }
  }
  order();
  res.x = verts[0];
  res.fx = fv[0];
  return res;
}

}  // namespace specsig
