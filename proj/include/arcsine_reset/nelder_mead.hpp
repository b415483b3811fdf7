#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace arcsine_reset::optim {

template <std::size_t N>
struct SimplexResult {
  std::array<double, N> x{};
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct SimplexOptions {
  // The M_r model has a near-flat valley as c -> 0; noisy fits can need ~4e4 steps.
  std::size_t max_iterations = 200000;
  double size_tol = 1e-10;       ///< max vertex distance (inf-norm) to the best vertex
  double initial_step = 0.05;    ///< relative edge length of the starting simplex
};

/// Nelder-Mead downhill simplex with the standard coefficients (1, 2, 1/2, 1/2).
template <std::size_t N, class F>
SimplexResult<N> nelder_mead(F&& objective, const std::array<double, N>& start, const SimplexOptions& opts = {}) {
  using Point = std::array<double, N>;
  std::array<Point, N + 1> vertex;
  std::array<double, N + 1> value;
  vertex[0] = start;
  for (std::size_t i = 0; i < N; ++i) {
    vertex[i + 1] = start;
    const double step = start[i] != 0.0 ? opts.initial_step * std::abs(start[i]) : opts.initial_step;
    vertex[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= N; ++i) value[i] = objective(vertex[i]);

  std::array<std::size_t, N + 1> order;
  auto along = [](const Point& from, const Point& to, double coef) {
    Point p;
    for (std::size_t i = 0; i < N; ++i) p[i] = from[i] + coef * (to[i] - from[i]);
    return p;
  };

  SimplexResult<N> result;
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    const std::size_t best = order[0];
    const std::size_t worst = order[N];
    const std::size_t second_worst = order[N - 1];

    double size = 0.0;
    for (std::size_t v = 0; v <= N; ++v) {
      for (std::size_t i = 0; i < N; ++i) size = std::max(size, std::abs(vertex[v][i] - vertex[best][i]));
    }
    result.iterations = iter;
    if (size <= opts.size_tol) {
      result.converged = true;
      break;
    }

    Point centroid{};
    for (std::size_t v = 0; v <= N; ++v) {
      if (v == worst) continue;
      for (std::size_t i = 0; i < N; ++i) centroid[i] += vertex[v][i] / static_cast<double>(N);
    }

    const Point reflected = along(centroid, vertex[worst], -1.0);
    const double f_reflected = objective(reflected);
    if (f_reflected < value[best]) {
      const Point expanded = along(centroid, vertex[worst], -2.0);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < value[worst];
    const Point contracted = outside ? along(centroid, reflected, 0.5) : along(centroid, vertex[worst], 0.5);
    const double f_contracted = objective(contracted);
    if (f_contracted < (outside ? f_reflected : value[worst])) {
      vertex[worst] = contracted;
      value[worst] = f_contracted;
      continue;
    }
    for (std::size_t v = 0; v <= N; ++v) {
      if (v == best) continue;
      vertex[v] = along(vertex[best], vertex[v], 0.5);
      value[v] = objective(vertex[v]);
    }
  }

  const std::size_t best = static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin());
  result.x = vertex[best];
  result.value = value[best];
  return result;
}

}  // namespace arcsine_reset::optim
