#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace arcsine_reset::quadrature {

namespace detail {

// f(sin^2 theta) * d(sin^2 theta)/dtheta. The Jacobian 2 sqrt(t (1 - t)) is
// taken from the rounded t so it cancels an endpoint singularity of f at the
// same point f was evaluated; sin(2 theta) would not once 1 - t is unresolved.
template <class F>
auto theta_integrand(F& f) {
  return [&f](double theta) {
    const double s = std::sin(theta);
    // Within ~1e-8 of pi/2, sin^2 rounds to 1; the substituted integrand is
    // bounded there, so evaluate at the last double below 1 instead of dropping it.
    const double t = std::min(s * s, std::nextafter(1.0, 0.0));
    if (t <= 0.0) return 0.0;
    return f(t) * 2.0 * std::sqrt(t * (1.0 - t));
  };
}

}  // namespace detail

/// Integrates f over [lo, hi] subset of [0, 1] after the change of variable t = sin^2(theta).
///
/// dt = sin(2 theta) dtheta vanishes like sqrt(t) and sqrt(1 - t) at the two ends,
/// which cancels integrable t^{-1/2} and (1-t)^{-1/2} endpoint singularities exactly.
template <class F>
double integrate_unit_interval(F&& f, double lo = 0.0, double hi = 1.0, double tol = 1e-12) {
  if (hi <= lo) return 0.0;
  const double theta_lo = std::asin(std::sqrt(lo));
  const double theta_hi = std::asin(std::sqrt(hi));
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(detail::theta_integrand(f), theta_lo,
                                                                         theta_hi, 12, tol);
}

/// CDF of a density on (0, 1), tabulated on panels uniform in theta = asin(sqrt(t)).
///
/// Each panel is integrated with 15-point Gauss-Legendre; a query integrates the
/// partial panel below it the same way, so lookups cost 15 density evaluations.
class TabulatedCdf {
 public:
  TabulatedCdf(std::function<double(double)> pdf, std::size_t panels = 2048) : pdf_(std::move(pdf)) {
    if (panels == 0) throw std::invalid_argument("TabulatedCdf: panels must be >= 1");
    width_ = 0.5 * std::numbers::pi / static_cast<double>(panels);
    cumulative_.assign(panels + 1, 0.0);
    for (std::size_t i = 0; i < panels; ++i) {
      cumulative_[i + 1] = cumulative_[i] + panel(static_cast<double>(i) * width_, static_cast<double>(i + 1) * width_);
    }
    total_ = cumulative_.back();
  }

  /// Integral of the density over (0, 1) as tabulated.
  double total() const noexcept { return total_; }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double theta = std::asin(std::sqrt(t));
    const auto i = std::min(cumulative_.size() - 2, static_cast<std::size_t>(theta / width_));
    const double start = static_cast<double>(i) * width_;
    return std::clamp(cumulative_[i] + panel(start, theta), 0.0, 1.0);
  }

 private:
  double panel(double a, double b) const {
    if (b <= a) return 0.0;
    const auto& f = pdf_;
    return boost::math::quadrature::gauss<double, 15>::integrate(detail::theta_integrand(f), a, b);
  }

  std::function<double(double)> pdf_;
  double width_ = 0.0;
  double total_ = 0.0;
  std::vector<double> cumulative_;
};

}  // namespace arcsine_reset::quadrature
