#pragma once

// Special functions used by the closed-form laws: log-gamma, Beta, Bessel J and I
// of real order, the lower incomplete gamma function and regularized pFq series.
// All functions are pure; nothing here touches shared mutable state.

#include <math.h>  // lgamma_r

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace arcsine_reset::specfun {

/// Truncation policy for the series definitions.
///
/// A series stops once |term| <= rel_tol * |partial sum| (after the terms have
/// started to decrease). Running past `max_terms` raises ConvergenceFailure.
class SeriesControl {
 public:
  SeriesControl() = default;
  SeriesControl(double rel_tol, std::size_t max_terms) : rel_tol_(rel_tol), max_terms_(max_terms) {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) {
      throw std::invalid_argument("SeriesControl: rel_tol must lie in (0, 1e-6]");
    }
    if (max_terms < 50) throw std::invalid_argument("SeriesControl: max_terms must be >= 50");
  }

  double rel_tol() const noexcept { return rel_tol_; }
  std::size_t max_terms() const noexcept { return max_terms_; }

 private:
  double rel_tol_ = 1e-16;
  std::size_t max_terms_ = 1000;
};

/// Bessel J switches from the power series to the Hankel expansion above this argument.
inline constexpr double kBesselAsymptoticSwitch = 25.0;

inline double ln_gamma(double x) {
  detail::require_domain(x > 0.0, "ln_gamma: argument must be positive");
  // lgamma_r does not write the global signgam, so this stays reentrant.
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

inline double beta_fn(double alpha, double beta) {
  detail::require_domain(alpha > 0.0 && beta > 0.0, "beta_fn: arguments must be positive");
  return std::exp(ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta));
}

namespace detail {

// (x/2)^nu / Gamma(nu + 1), the leading factor of both Bessel series.
inline double bessel_prefactor(double nu, double x) {
  if (nu == 0.0) return 1.0;
  return std::exp(nu * std::log(0.5 * x) - ln_gamma(nu + 1.0));
}

inline double bessel_j_series(double nu, double x, const SeriesControl& ctl) {
  // The alternating series cancels badly once x grows past a few units: the
  // largest term is of order I_nu(x). Accumulating in binary128 keeps the
  // absolute error near double rounding over the whole series range.
  using wide = __float128;
  const wide h = -static_cast<wide>(0.25 * x * x);
  wide term = 1;
  wide sum = 1;
  const wide tol = ctl.rel_tol();
  for (std::size_t m = 1; m <= ctl.max_terms(); ++m) {
    term *= h / (static_cast<wide>(m) * (static_cast<wide>(m) + nu));
    sum += term;
    const wide abs_term = term < 0 ? -term : term;
    const wide abs_sum = sum < 0 ? -sum : sum;
    if (abs_term <= tol * abs_sum) return bessel_prefactor(nu, x) * static_cast<double>(sum);
  }
  throw ConvergenceFailure("bessel_j: power series did not converge within max_terms");
}

inline double bessel_j_hankel(double nu, double x, const SeriesControl& ctl) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;
  double prev_abs = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (std::size_t k = 1; k <= ctl.max_terms(); ++k) {
    const double odd = 2.0 * static_cast<double>(k) - 1.0;
    a *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
    const double abs_a = std::abs(a);
    if (abs_a == 0.0) {  // half-integer order: the expansion terminates
      converged = true;
      break;
    }
    if (abs_a > prev_abs) break;  // asymptotic series started to diverge
    prev_abs = abs_a;
    // Signs follow (-1)^{floor(k/2)}; even k feed P, odd k feed Q.
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * a;
    } else {
      q += sign * a;
    }
    if (abs_a <= ctl.rel_tol() * std::max(std::abs(p), std::abs(q))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceFailure("bessel_j: Hankel expansion did not reach tolerance");
  const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

/// Bessel function of the first kind J_nu(x) for real nu >= 0, x >= 0.
///
/// Power series for x <= 25, Hankel asymptotic expansion above.
inline double bessel_j(double nu, double x, const SeriesControl& ctl = {}) {
  arcsine_reset::detail::require_domain(nu >= 0.0 && x >= 0.0, "bessel_j: requires nu >= 0 and x >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x <= kBesselAsymptoticSwitch) return detail::bessel_j_series(nu, x, ctl);
  return detail::bessel_j_hankel(nu, x, ctl);
}

/// Modified Bessel function of the first kind I_nu(x); positive-term series.
inline double bessel_i(double nu, double x, const SeriesControl& ctl = {}) {
  arcsine_reset::detail::require_domain(nu >= 0.0 && x >= 0.0, "bessel_i: requires nu >= 0 and x >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double h = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t m = 1; m <= ctl.max_terms(); ++m) {
    const double md = static_cast<double>(m);
    term *= h / (md * (md + nu));
    sum += term;
    if (term <= ctl.rel_tol() * sum) return detail::bessel_prefactor(nu, x) * sum;
  }
  throw ConvergenceFailure("bessel_i: series did not converge within max_terms");
}

/// Lower incomplete gamma  gamma(s, x) = int_0^x t^{s-1} e^{-t} dt.
inline double lower_incomplete_gamma(double s, double x) {
  arcsine_reset::detail::require_domain(s > 0.0 && x >= 0.0,
                                        "lower_incomplete_gamma: requires s > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 1000;
  const double log_prefix = s * std::log(x) - x;

  if (x < s + 1.0) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n <= max_iter; ++n) {
      term *= x / (s + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) return sum * std::exp(log_prefix);
    }
    throw ConvergenceFailure("lower_incomplete_gamma: series did not converge");
  }

  // Upper tail by modified Lentz continued fraction, then gamma = Gamma(s) - Gamma(s, x).
  constexpr double tiny = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= max_iter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) {
      const double upper = std::exp(log_prefix) * h;
      return std::exp(ln_gamma(s)) - upper;
    }
  }
  throw ConvergenceFailure("lower_incomplete_gamma: continued fraction did not converge");
}

/// Regularized generalized hypergeometric function pFq(a; b; z) / prod Gamma(b_i).
///
/// Uses the rising factorial (x)_n = x (x+1) ... (x+n-1) in the series.
inline double hyp_pfq_regularized(std::span<const double> a, std::span<const double> b, double z,
                                  const SeriesControl& ctl = {}) {
  double log_norm = 0.0;
  for (double bi : b) {
    arcsine_reset::detail::require_domain(bi > 0.0, "hyp_pfq_regularized: lower parameters must be positive");
    log_norm += ln_gamma(bi);
  }
  const double first = std::exp(-log_norm);
  double term = first;
  double sum = first;
  if (z == 0.0) return sum;
  for (std::size_t n = 0; n < ctl.max_terms(); ++n) {
    const double nd = static_cast<double>(n);
    double ratio = z / (nd + 1.0);
    for (double ai : a) ratio *= ai + nd;
    for (double bi : b) ratio /= bi + nd;
    term *= ratio;
    sum += term;
    if (term == 0.0) return sum;
    if (std::abs(ratio) < 1.0 && std::abs(term) <= ctl.rel_tol() * std::abs(sum)) return sum;
  }
  throw ConvergenceFailure("hyp_pfq_regularized: series did not converge within max_terms");
}

}  // namespace arcsine_reset::specfun
