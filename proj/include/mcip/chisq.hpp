#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "mcip/error.hpp"

namespace mcip {

namespace detail {

inline constexpr int kGammaMaxIterations = 100000;
inline constexpr double kGammaEpsilon = std::numeric_limits<double>::epsilon();

// P(a, x) by its power series; converges quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kGammaMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEpsilon) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction (modified Lentz); for x >= a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kGammaEpsilon;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEpsilon) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x)) throw InputError("incomplete gamma needs a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_continued_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x)) throw InputError("incomplete gamma needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_continued_fraction(a, x);
}

inline void check_df(int df) {
  if (df <= 0) throw InputError("chi-square degrees of freedom must be positive, got " + std::to_string(df));
}

/// Upper tail P(X > x) of the chi-square distribution with `df` degrees of
/// freedom.
inline double chi_square_sf(double x, int df) {
  check_df(df);
  if (!(x >= 0.0)) throw InputError("chi-square statistic must be >= 0");
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

inline double chi_square_cdf(double x, int df) {
  check_df(df);
  if (!(x >= 0.0)) throw InputError("chi-square statistic must be >= 0");
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

/// x such that P(X <= x) = p.
inline double chi_square_quantile(double p, int df) {
  check_df(df);
  if (!(p > 0.0 && p < 1.0)) throw InputError("chi-square quantile needs p in (0, 1)");
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(df));
  while (chi_square_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi_square_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mcip
