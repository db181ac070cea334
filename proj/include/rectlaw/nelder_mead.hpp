// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

namespace rectlaw {

struct SimplexOptions {
  double initial_step = 0.5;
  int max_iters = 2000;
  double tol = 1e-10;  ///< stop once max f - min f over the simplex falls below this
};

template <std::size_t N>
struct SimplexResult {
  std::array<double, N> x{};
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimization with reflection 1, expansion 2,
/// contraction 0.5 and shrink 0.5. The initial simplex is `x0` plus
/// `initial_step` along each axis. Non-finite objective values are treated as
/// +inf, so the simplex simply moves away from them.
template <std::size_t N, typename F>
SimplexResult<N> nelder_mead(F&& f, const std::array<double, N>& x0, const SimplexOptions& opt = {}) {
  using Point = std::array<double, N>;
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  auto eval = [&](const Point& p) {
    const double v = f(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  auto affine = [](const Point& c, const Point& p, double t) {
    Point out;
    for (std::size_t j = 0; j < N; ++j) out[j] = c[j] + t * (p[j] - c[j]);
    return out;
  };

  std::array<Point, N + 1> simplex;
  std::array<double, N + 1> values;
  simplex[0] = x0;
  for (std::size_t i = 0; i < N; ++i) {
    simplex[i + 1] = x0;
    simplex[i + 1][i] += opt.initial_step;
  }
  for (std::size_t i = 0; i <= N; ++i) values[i] = eval(simplex[i]);

  std::array<std::size_t, N + 1> order;
  SimplexResult<N> result;
  int iter = 0;
  for (;; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[N - 1];

    const double spread = values[worst] - values[best];
    if (std::isfinite(values[best]) && spread < opt.tol) {
      result.converged = true;
      break;
    }
    if (iter >= opt.max_iters) break;

    Point centroid{};
    for (std::size_t i = 0; i <= N; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < N; ++j) centroid[j] += simplex[i][j] / static_cast<double>(N);
    }

    const Point reflected = affine(centroid, simplex[worst], -kReflect);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const Point expanded = affine(centroid, simplex[worst], -kExpand);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }

    // Outside contraction when the reflection beat the worst vertex, inside otherwise.
    const bool outside = fr < values[worst];
    const Point contracted =
        outside ? affine(centroid, reflected, kContract) : affine(centroid, simplex[worst], kContract);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }

    for (std::size_t i = 0; i <= N; ++i) {
      if (i == best) continue;
      simplex[i] = affine(simplex[best], simplex[i], kShrink);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.value = *best_it;
  result.iterations = iter;
  return result;
}

}  // namespace rectlaw
