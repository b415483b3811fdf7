#pragma once

// Closed-form laws of the occupation time T_r and the last zero L_r of a
// Brownian motion on [0, 1] that is reset to 0 at the events of a rate-r
// Poisson process, together with the classical arcsine baseline.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace arcsine_reset {

/// Resetting rate on the unit horizon; the reset point is always 0.
class ResetModel {
 public:
  static constexpr double horizon = 1.0;
  static constexpr double reset_point = 0.0;

  ResetModel() = default;
  explicit ResetModel(double rate) : rate_(rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw DomainError("ResetModel: rate must be finite and >= 0");
  }

  double rate() const noexcept { return rate_; }

 private:
  double rate_ = 0.0;
};

/// Frequency and reset count for the conditional characteristic function.
struct CFQuery {
  double omega = 0.0;
  unsigned k = 0;
};

namespace laws {

namespace detail {

inline void require_open_unit(double t, const char* what) {
  arcsine_reset::detail::require_domain(t > 0.0 && t < 1.0, what);
}

}  // namespace detail

inline double arcsine_pdf(double t) {
  detail::require_open_unit(t, "arcsine_pdf: t must lie in (0, 1)");
  return 1.0 / (std::numbers::pi * std::sqrt(t * (1.0 - t)));
}

inline double arcsine_cdf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(t));
}

/// Density of T_r given k resets: Beta((k+1)/2, (k+1)/2).
inline double pdf_T_given_k(double t, unsigned k) {
  detail::require_open_unit(t, "pdf_T_given_k: t must lie in (0, 1)");
  const double shape = 0.5 * (k + 1.0);
  return std::exp((shape - 1.0) * std::log(t * (1.0 - t)) - std::log(specfun::beta_fn(shape, shape)));
}

/// Characteristic function E[exp(i omega T_r) | N(1) = k].
///
/// Equals Gamma(k/2 + 1) (4/omega)^{k/2} J_{k/2}(omega/2) exp(i omega/2), the
/// transform of the symmetric Beta((k+1)/2, (k+1)/2) law. The removable point
/// omega = 0 returns 1; small |omega| uses the normalized series of J_nu(x)/x^nu.
inline std::complex<double> cf_T_given_k(const CFQuery& q, const specfun::SeriesControl& ctl = {}) {
  const double omega = std::abs(q.omega);
  const double nu = 0.5 * q.k;
  double real_factor = 1.0;
  if (omega != 0.0) {
    const double x = 0.5 * omega;
    if (omega < 1.0) {
      // Gamma(nu+1) (x/2)^{-nu} J_nu(x) = sum_m (-x^2/4)^m Gamma(nu+1) / (m! Gamma(m+nu+1))
      const double h = -0.25 * x * x;
      double term = 1.0;
      double sum = 1.0;
      for (std::size_t m = 1; m <= ctl.max_terms(); ++m) {
        term *= h / (static_cast<double>(m) * (static_cast<double>(m) + nu));
        sum += term;
        if (std::abs(term) <= ctl.rel_tol() * std::abs(sum)) break;
        if (m == ctl.max_terms()) throw ConvergenceFailure("cf_T_given_k: series did not converge");
      }
      real_factor = sum;
    } else {
      real_factor = std::exp(specfun::ln_gamma(nu + 1.0) + nu * std::log(4.0 / omega)) *
                    specfun::bessel_j(nu, x, ctl);
    }
  }
  const double phase = 0.5 * q.omega;
  return real_factor * std::complex<double>(std::cos(phase), std::sin(phase));
}

/// Density of the occupation time T_r.
///
///   p(t) = e^{-r} s^{-1/2} [ r sqrt(s) I_0(2 r sqrt(s)) + 1F2~(1; 1/2, 1/2; r^2 s) ],  s = t(1-t).
///
/// The odd-k part of the Poisson mixture sums to the modified Bessel I_0.
inline double pdf_T(double t, const ResetModel& m, const specfun::SeriesControl& ctl = {}) {
  detail::require_open_unit(t, "pdf_T: t must lie in (0, 1)");
  const double r = m.rate();
  const double s = t * (1.0 - t);
  const double root = std::sqrt(s);
  constexpr std::array<double, 1> upper{1.0};
  constexpr std::array<double, 2> lower{0.5, 0.5};
  const double odd = r == 0.0 ? 0.0 : r * root * specfun::bessel_i(0.0, 2.0 * r * root, ctl);
  const double even = specfun::hyp_pfq_regularized(upper, lower, r * r * s, ctl);
  return std::exp(-r) / root * (odd + even);
}

/// Central moments of the symmetric Beta((k+1)/2, (k+1)/2) mixture at r = 0, i.e. the arcsine law.
inline double arcsine_central_moment(unsigned j) {
  if (j % 2 == 1) return 0.0;
  return std::exp(specfun::ln_gamma(0.5 * (j + 1.0)) - j * std::numbers::ln2 - 0.5 * std::log(std::numbers::pi) -
                  specfun::ln_gamma(0.5 * j + 1.0));
}

/// Below this rate the central moments are summed over the reset count directly.
inline constexpr double kSmallRateMomentSwitch = 1e-6;

/// E[(T_r - 1/2)^j].
inline double central_moment_T(unsigned j, const ResetModel& m, const specfun::SeriesControl& ctl = {}) {
  if (j == 0) return 1.0;
  if (j % 2 == 1) return 0.0;
  const double r = m.rate();
  if (r == 0.0) return arcsine_central_moment(j);
  const double jd = static_cast<double>(j);
  const double prefactor = std::exp(-r + specfun::ln_gamma(0.5 * (jd + 1.0)) - jd * std::numbers::ln2);
  if (r < kSmallRateMomentSwitch) {
    // sum_k (r/2)^k / (Gamma((k+1)/2) Gamma((k+j)/2 + 1)); (2/r)^{(j-1)/2} I_{(j+1)/2}(r) is 0 * inf here.
    double sum = 0.0;
    double power = 1.0;
    for (unsigned k = 0; k <= ctl.max_terms(); ++k) {
      const double kd = static_cast<double>(k);
      const double term =
          power * std::exp(-specfun::ln_gamma(0.5 * (kd + 1.0)) - specfun::ln_gamma(0.5 * (kd + jd) + 1.0));
      sum += term;
      if (term <= ctl.rel_tol() * sum) return prefactor * sum;
      power *= 0.5 * r;
    }
    throw ConvergenceFailure("central_moment_T: reset-count sum did not converge");
  }
  constexpr std::array<double, 1> upper{1.0};
  const std::array<double, 2> lower{0.5, 1.0 + 0.5 * jd};
  const double bessel_part =
      std::pow(2.0 / r, 0.5 * (jd - 1.0)) * specfun::bessel_i(0.5 * (jd + 1.0), r, ctl);
  const double series_part = specfun::hyp_pfq_regularized(upper, lower, 0.25 * r * r, ctl);
  return prefactor * (bessel_part + series_part);
}

/// Density of the last zero L_r.
inline double pdf_L(double t, const ResetModel& m) {
  detail::require_open_unit(t, "pdf_L: t must lie in (0, 1)");
  const double r = m.rate();
  const double baseline = std::exp(-r) * arcsine_pdf(t);
  if (r == 0.0) return baseline;
  return baseline + std::sqrt(r) * std::exp(r * (t - 1.0)) / (std::numbers::pi * std::sqrt(1.0 - t)) *
                        specfun::lower_incomplete_gamma(0.5, r * t);
}

/// Below this rate mean_L and var_L use Taylor expansions; the closed forms cancel catastrophically.
inline constexpr double kSmallRateTaylorSwitch = 1e-3;

inline double mean_L(const ResetModel& m) {
  const double r = m.rate();
  if (r < kSmallRateTaylorSwitch) return 0.5 + r * (1.0 / 4.0 + r * (-1.0 / 12.0 + r * (1.0 / 48.0 - r / 240.0)));
  return 1.0 + std::expm1(-r) / (2.0 * r);
}

inline double var_L(const ResetModel& m) {
  const double r = m.rate();
  if (r < kSmallRateTaylorSwitch) {
    return 1.0 / 8.0 + r * r * (-5.0 / 96.0 + r * (3.0 / 80.0 - r * 47.0 / 2880.0));
  }
  return (2.0 - std::exp(-r) * (1.0 + 3.0 * r) - std::exp(-2.0 * r)) / (4.0 * r * r);
}

/// E[L_r^n] for n >= 1.
inline double raw_moment_L(unsigned n, const ResetModel& m, const specfun::SeriesControl& ctl = {}) {
  arcsine_reset::detail::require_domain(n >= 1, "raw_moment_L: order must be >= 1");
  const double r = m.rate();
  const double nd = static_cast<double>(n);
  const double arcsine_part =
      std::exp(specfun::ln_gamma(0.5 + nd) - 0.5 * std::log(std::numbers::pi) - specfun::ln_gamma(1.0 + nd));
  if (r == 0.0) return arcsine_part;
  const std::array<double, 2> upper{1.0, 1.5 + nd};
  const std::array<double, 2> lower{1.5, 2.0 + nd};
  const double reset_part =
      r * std::exp(specfun::ln_gamma(1.5 + nd)) * specfun::hyp_pfq_regularized(upper, lower, r, ctl);
  return std::exp(-r) * (arcsine_part + reset_part);
}

/// Non-arcsine mixture component of pdf_L, weight 1 - e^{-r}. Requires r > 0.
inline double pdf_X_component(double t, const ResetModel& m) {
  detail::require_open_unit(t, "pdf_X_component: t must lie in (0, 1)");
  const double r = m.rate();
  arcsine_reset::detail::require_domain(r > 0.0, "pdf_X_component: rate must be positive");
  // e^{rt} / (e^r - 1) rewritten as e^{r(t-1)} / (1 - e^{-r}) to avoid overflow.
  return std::sqrt(r) * std::exp(r * (t - 1.0)) / (-std::expm1(-r) * std::numbers::pi * std::sqrt(1.0 - t)) *
         specfun::lower_incomplete_gamma(0.5, r * t);
}

/// Beta(1/2, 3/2) density, the r -> 0 limit of pdf_X_component.
inline double pdf_X_component_small_rate_limit(double t) {
  detail::require_open_unit(t, "pdf_X_component_small_rate_limit: t must lie in (0, 1)");
  return 2.0 / std::numbers::pi * std::sqrt(t / (1.0 - t));
}

/// CDF of T_r by quadrature of pdf_T.
inline double cdf_T(double t, const ResetModel& m) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  // Symmetry about 1/2 keeps the integration range at most half the interval.
  if (t > 0.5) return 1.0 - quadrature::integrate_unit_interval([&m](double s) { return pdf_T(s, m); }, t, 1.0);
  return quadrature::integrate_unit_interval([&m](double s) { return pdf_T(s, m); }, 0.0, t);
}

/// CDF of L_r by quadrature of pdf_L.
inline double cdf_L(double t, const ResetModel& m) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return quadrature::integrate_unit_interval([&m](double s) { return pdf_L(s, m); }, 0.0, t);
}

/// Tabulated CDFs for bulk evaluation (goodness-of-fit over many samples).
inline quadrature::TabulatedCdf tabulated_cdf_T(const ResetModel& m) {
  return quadrature::TabulatedCdf([m](double s) { return pdf_T(s, m); });
}

inline quadrature::TabulatedCdf tabulated_cdf_L(const ResetModel& m) {
  return quadrature::TabulatedCdf([m](double s) { return pdf_L(s, m); });
}

}  // namespace laws
}  // namespace arcsine_reset
