#pragma once

// Statistical validation of sampled ensembles against the closed-form laws and
// the least-squares fit of the argmax-time mean curve.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "laws.hpp"
#include "nelder_mead.hpp"

namespace arcsine_reset::analysis {

namespace detail {

inline void require_samples(std::span<const double> samples, std::size_t minimum, const char* what) {
  if (samples.size() < minimum) throw std::invalid_argument(what);
}

}  // namespace detail

/// Mean of (x - 1/2)^j; centred on the exact mean 1/2 of T_r, not the sample mean.
inline double empirical_central_moment(std::span<const double> samples, unsigned j) {
  detail::require_samples(samples, 2, "empirical_central_moment: needs at least 2 samples");
  double sum = 0.0;
  for (double x : samples) sum += std::pow(x - 0.5, static_cast<int>(j));
  return sum / static_cast<double>(samples.size());
}

/// Standard error of empirical_central_moment.
inline double central_moment_standard_error(std::span<const double> samples, unsigned j) {
  detail::require_samples(samples, 2, "central_moment_standard_error: needs at least 2 samples");
  const double n = static_cast<double>(samples.size());
  const double mean = empirical_central_moment(samples, j);
  double ss = 0.0;
  for (double x : samples) {
    const double d = std::pow(x - 0.5, static_cast<int>(j)) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / (n - 1.0) / n);
}

struct MomentReport {
  double rate = 0.0;
  unsigned order = 0;
  double theoretical = 0.0;
  double empirical = 0.0;
  double relative_error = 0.0;  ///< |empirical / theoretical - 1|; NaN when theoretical == 0
  double standard_error = 0.0;
  std::size_t sample_size = 0;
  double dt = 0.0;              ///< 0 for discretization-free samplers
};

struct MomentInput {
  ResetModel model;
  std::span<const double> occupation;
  double dt = 0.0;
};

/// Relative errors of empirical central moments of T_r - 1/2, one report per (input, order).
inline std::vector<MomentReport> relative_error_table(std::span<const MomentInput> inputs,
                                                      std::span<const unsigned> orders) {
  std::vector<MomentReport> table;
  for (const MomentInput& in : inputs) {
    for (unsigned j : orders) {
      MomentReport rep;
      rep.rate = in.model.rate();
      rep.order = j;
      rep.theoretical = laws::central_moment_T(j, in.model);
      rep.empirical = empirical_central_moment(in.occupation, j);
      rep.relative_error = rep.theoretical != 0.0 ? std::abs(rep.empirical / rep.theoretical - 1.0)
                                                  : std::numeric_limits<double>::quiet_NaN();
      rep.standard_error = central_moment_standard_error(in.occupation, j);
      rep.sample_size = in.occupation.size();
      rep.dt = in.dt;
      table.push_back(rep);
    }
  }
  return table;
}

/// sup_x |F_n(x) - cdf(x)|.
template <class Cdf>
double ks_statistic(std::span<const double> samples, Cdf&& cdf) {
  detail::require_samples(samples, 1, "ks_statistic: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return std::clamp(d, 0.0, 1.0);
}

/// sup_x |F_a(x) - F_b(x)| between two empirical CDFs.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  detail::require_samples(a, 1, "ks_two_sample: empty sample");
  detail::require_samples(b, 1, "ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

struct Histogram {
  std::vector<double> edges;      ///< n_bins + 1 equally spaced edges on [0, 1]
  std::vector<double> densities;  ///< count / (N * width)
};

inline Histogram histogram(std::span<const double> samples, std::size_t n_bins) {
  detail::require_samples(samples, 1, "histogram: empty sample");
  if (n_bins == 0) throw std::invalid_argument("histogram: n_bins must be >= 1");
  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = static_cast<double>(i) / static_cast<double>(n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
  for (double x : samples) {
    arcsine_reset::detail::require_domain(x >= 0.0 && x <= 1.0, "histogram: samples must lie in [0, 1]");
    const auto bin = std::min(n_bins - 1, static_cast<std::size_t>(x * static_cast<double>(n_bins)));
    ++counts[bin];
  }
  const double scale = static_cast<double>(n_bins) / static_cast<double>(samples.size());
  h.densities.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) h.densities[i] = static_cast<double>(counts[i]) * scale;
  return h;
}

// ---------------------------------------------------------------------------
// Argmax-time mean curve  f(r) = 1/2 + a exp(-b / r^c) / r^d

struct FitParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// Parameters reported for the mean of M_r; also the centre of the multi-start schedule.
inline constexpr FitParams kReferenceFitParams{3.3435, 4.3575, 0.4172, 1.1309};

inline double mean_M_model(double r, const FitParams& p) {
  return 0.5 + p.a * std::exp(-p.b / std::pow(r, p.c)) / std::pow(r, p.d);
}

struct FitPoint {
  double rate = 0.0;
  double mean = 0.0;
};

struct FitResult {
  FitParams params;
  double residual_norm = 0.0;  ///< sqrt of the residual sum of squares
  std::size_t start_index = 0;
};

inline constexpr std::size_t kMinFitPoints = 8;

/// Least-squares fit of mean_M_model by Nelder-Mead with five deterministic starts.
///
/// The search runs over (a, log b, log c, log d) so b, c, d stay positive. Each
/// start is polished by restarting the simplex at its optimum until a restart
/// no longer improves the residual.
inline FitResult fit_mean_M(std::span<const FitPoint> points, const optim::SimplexOptions& opts = {}) {
  if (points.size() < kMinFitPoints) throw std::invalid_argument("fit_mean_M: needs at least 8 points");
  for (const FitPoint& p : points) {
    arcsine_reset::detail::require_domain(p.rate > 0.0 && std::isfinite(p.mean),
                                          "fit_mean_M: rates must be positive and means finite");
  }
  using Vec = std::array<double, 4>;
  auto to_params = [](const Vec& v) { return FitParams{v[0], std::exp(v[1]), std::exp(v[2]), std::exp(v[3])}; };
  auto sse = [&](const Vec& v) {
    const FitParams p = to_params(v);
    double s = 0.0;
    for (const FitPoint& pt : points) {
      const double res = mean_M_model(pt.rate, p) - pt.mean;
      s += res * res;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::max();
  };

  constexpr std::array<std::array<double, 4>, 5> perturbations{{
      {1.0, 1.0, 1.0, 1.0},
      {1.2, 0.9, 1.1, 0.9},
      {0.8, 1.1, 0.9, 1.1},
      {1.5, 1.2, 0.8, 1.2},
      {0.6, 0.8, 1.25, 0.85},
  }};
  const FitParams ref = kReferenceFitParams;
  bool any_converged = false;
  FitResult best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < perturbations.size(); ++s) {
    const auto& f = perturbations[s];
    Vec x{ref.a * f[0], std::log(ref.b * f[1]), std::log(ref.c * f[2]), std::log(ref.d * f[3])};
    optim::SimplexResult<4> run = optim::nelder_mead<4>(sse, x, opts);
    bool converged = run.converged;
    for (int polish = 0; polish < 20 && run.converged; ++polish) {
      optim::SimplexResult<4> again = optim::nelder_mead<4>(sse, run.x, opts);
      const bool improved = again.value < run.value;
      if (again.value <= run.value) run = again;
      if (!improved) break;
    }
    if (!converged) continue;
    any_converged = true;
    if (run.value < best_sse) {
      best_sse = run.value;
      best.params = to_params(run.x);
      best.residual_norm = std::sqrt(run.value);
      best.start_index = s;
    }
  }
  if (!any_converged) throw FitDiverged("fit_mean_M: no start converged within the iteration cap");
  return best;
}

struct CurvePeak {
  double rate = 0.0;
  double value = 0.0;
};

/// Maximum of mean_M_model over [r_lo, r_hi]: log-spaced scan, then golden section in log r.
inline CurvePeak fitted_peak(const FitParams& p, double r_lo = 0.2, double r_hi = 50.0) {
  constexpr int scan = 2000;
  const double lo = std::log(r_lo);
  const double hi = std::log(r_hi);
  const double h = (hi - lo) / scan;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= scan; ++i) {
    const double v = mean_M_model(std::exp(lo + i * h), p);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + std::max(0, best - 1) * h;
  double b = lo + std::min(scan, best + 1) * h;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto g = [&](double u) { return mean_M_model(std::exp(u), p); };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  const double u = 0.5 * (a + b);
  return {std::exp(u), g(u)};
}

/// Geometric grid of `count` rates spanning [r_lo, r_hi].
inline std::vector<double> geometric_grid(double r_lo, double r_hi, std::size_t count) {
  if (count < 2 || !(r_lo > 0.0) || !(r_hi > r_lo)) throw std::invalid_argument("geometric_grid: bad range");
  std::vector<double> out(count);
  const double ratio = std::log(r_hi / r_lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = r_lo * std::exp(ratio * static_cast<double>(i));
  out.back() = r_hi;
  return out;
}

struct MrLimitSummary {
  double ks_uniform = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_standard_error = 0.0;
  double variance_standard_error = 0.0;
  std::size_t sample_size = 0;
};

/// Distance of argmax-time samples from U(0, 1): KS statistic plus mean and variance with standard errors.
inline MrLimitSummary mr_limit_report(std::span<const double> samples) {
  detail::require_samples(samples, 2, "mr_limit_report: needs at least 2 samples");
  MrLimitSummary out;
  const double n = static_cast<double>(samples.size());
  out.sample_size = samples.size();
  out.ks_uniform = ks_statistic(samples, [](double x) { return std::clamp(x, 0.0, 1.0); });
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : samples) {
    const double d2 = (x - out.mean) * (x - out.mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  out.variance = m2 / (n - 1.0);
  out.mean_standard_error = std::sqrt(out.variance / n);
  const double central4 = m4 / n;
  const double central2 = m2 / n;
  out.variance_standard_error = std::sqrt(std::max(0.0, central4 - central2 * central2) / n);
  return out;
}

}  // namespace arcsine_reset::analysis
