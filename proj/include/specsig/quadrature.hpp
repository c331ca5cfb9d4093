#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "specsig/error.hpp"

namespace specsig {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  std::size_t evals = 0;
};

namespace quad_detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {0.129484966168870, 0.279705391489277,
                                            0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& gauss) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double k_acc = 0.0, g_acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kKronrodNodes[i];
    const double f1 = f(c - dx);
    const double fs = (i == 7) ? f1 : f1 + f(c + dx);
    k_acc += kKronrodWeights[i] * fs;
    if (i % 2 == 1) g_acc += kGaussWeights[i / 2] * fs;
  }
  kronrod = k_acc * h;
  gauss = g_acc * h;
}

struct Piece {
  double a, b, value, err;
  bool operator<(const Piece& o) const { return err < o.err; }
};

}  // namespace quad_detail

// Globally adaptive Gauss-Kronrod 15(7): repeatedly bisects the interval with
// the largest error estimate until the summed estimate meets the target.
// Handles integrable endpoint singularities by depth of refinement.
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                              double rel_tol = 1e-11, std::size_t max_pieces = 4000) {
  using quad_detail::Piece;
  QuadResult res;
  if (a == b) return res;

  std::vector<Piece> heap;
  auto eval_piece = [&](double lo, double hi) {
    double k = 0.0, g = 0.0;
    quad_detail::gk15(f, lo, hi, k, g);
    res.evals += 15;
    double err = std::abs(k - g);
    if (!std::isfinite(k)) {
      k = 0.0;
      err = std::numeric_limits<double>::infinity();
    }
    return Piece{lo, hi, k, err};
  };

  heap.push_back(eval_piece(a, b));
  double total_val = heap.front().value;
  double total_err = heap.front().err;

  auto target = [&]() { return std::max(abs_tol, rel_tol * std::abs(total_val)); };

  while (total_err > target() && heap.size() < max_pieces) {
    std::pop_heap(heap.begin(), heap.end());
    const Piece worst = heap.back();
    heap.pop_back();

    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Width at the limit of the representation; nothing more to gain here.
      Piece stuck = worst;
      stuck.err = 0.0;
      heap.push_back(stuck);
      std::push_heap(heap.begin(), heap.end());
      continue;
    }
    const Piece left = eval_piece(worst.a, mid);
    const Piece right = eval_piece(mid, worst.b);
    total_val += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }

  // Re-sum for a final value less exposed to the incremental updates.
  double value = 0.0, err = 0.0;
  for (const Piece& p : heap) {
    value += p.value;
    err += p.err;
  }
  res.value = value;
  res.error_estimate = err;
  res.converged = err <= std::max(abs_tol, rel_tol * std::abs(value));
  return res;
}

// Integral over [a, +inf) via z = a + s/(1-s).
template <class F>
QuadResult integrate_upper_tail(const F& f, double a, double abs_tol, double rel_tol = 1e-11) {
  auto g = [&](double s) {
    const double om = 1.0 - s;
    const double z = a + s / om;
    const double v = f(z);
    return v == 0.0 ? 0.0 : v / (om * om);
  };
  return integrate_adaptive(g, 0.0, 1.0, abs_tol, rel_tol);
}

// Integral over (-inf, b] via z = b - s/(1-s).
template <class F>
QuadResult integrate_lower_tail(const F& f, double b, double abs_tol, double rel_tol = 1e-11) {
  auto g = [&](double s) {
    const double om = 1.0 - s;
    const double z = b - s / om;
    const double v = f(z);
    return v == 0.0 ? 0.0 : v / (om * om);
  };
  return integrate_adaptive(g, 0.0, 1.0, abs_tol, rel_tol);
}

}  // namespace specsig
