#ifndef SKYLINE_NUMERICS_SPECIAL_FUNCTIONS_HPP
#define SKYLINE_NUMERICS_SPECIAL_FUNCTIONS_HPP

#include "skyline/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace skyline::numerics {

// Euler Gamma for x > 0.
inline double gamma_fn(double x) {
  skyline::detail::require_domain(x > 0.0, "gamma_fn: x must be positive");
  return std::tgamma(x);
}

namespace detail {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 10000;

// Lower incomplete gamma by its power series, scaled as
// gamma(a, x) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n)).  Requires a > 0.
inline double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) {
      break;
    }
  }
  return sum * std::exp(-x + a * std::log(x));
}

// Legendre continued fraction for the upper incomplete gamma (modified
// Lentz), returning cf with Gamma(s, x) = x^s e^-x cf. Valid for every real
// s once x is not small; used for x > 1.
inline double upper_gamma_cf_unscaled(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      break;
    }
  }
  return h;
}

inline double upper_gamma_cf(double s, double x) {
  return std::exp(-x + s * std::log(x)) * upper_gamma_cf_unscaled(s, x);
}

// E1(x) = Gamma(0, x) for 0 < x <= 1 by its convergent series.
inline double expint_e1_series(double x) {
  constexpr double euler_gamma = 0.57721566490153286060651209;
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum)) {
      break;
    }
  }
  return -euler_gamma - std::log(x) - sum;
}

} // namespace detail

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a), a > 0.
inline double gamma_q(double a, double x) {
  skyline::detail::require_domain(a > 0.0, "gamma_q: a must be positive");
  skyline::detail::require_domain(x >= 0.0, "gamma_q: x must be non-negative");
  if (x == 0.0) {
    return 1.0;
  }
  if (x < a + 1.0) {
    return 1.0 - detail::lower_gamma_series(a, x) / std::tgamma(a);
  }
  return detail::upper_gamma_cf(a, x) / std::tgamma(a);
}

// Upper incomplete gamma Gamma(s, x) for real s (including s <= 0) and x > 0.
inline double upper_incomplete_gamma(double s, double x) {
  if (x <= 0.0) {
    skyline::detail::require_domain(s > 0.0 && x == 0.0,
                                    "upper_incomplete_gamma: divergent for x <= 0");
    return std::tgamma(s);
  }
  if (x > 1.0) {
    return detail::upper_gamma_cf(s, x);
  }
  if (s > 0.0) {
    return std::tgamma(s) - detail::lower_gamma_series(s, x);
  }
  // s <= 0 and small x: start in (0, 1] (or at 0 for integer s) and apply
  // Gamma(s, x) = (Gamma(s + 1, x) - x^s e^-x) / s downward.
  const double steps = std::ceil(-s);
  double a = s + steps;
  double value;
  if (a == 0.0) {
    value = detail::expint_e1_series(x);
  } else {
    value = std::tgamma(a) - detail::lower_gamma_series(a, x);
  }
  while (a > s + 0.5) {
    a -= 1.0;
    value = (value - std::exp(-x + a * std::log(x))) / a;
  }
  return value;
}

// e^x * Gamma(s, x): the upper incomplete gamma with its exponential decay
// removed, for arguments where Gamma(s, x) itself would underflow.
inline double upper_incomplete_gamma_scaled(double s, double x) {
  skyline::detail::require_domain(x > 0.0, "upper_incomplete_gamma_scaled: x must be positive");
  if (x > 1.0) {
    return std::pow(x, s) * detail::upper_gamma_cf_unscaled(s, x);
  }
  return upper_incomplete_gamma(s, x) * std::exp(x);
}

// Modified Bessel function of the second kind, order one.
inline double bessel_k1(double x) {
  skyline::detail::require_domain(x > 0.0, "bessel_k1: x must be positive");
  if (x > 700.0) {
    return 0.0;
  }
  return std::cyl_bessel_k(1.0, x);
}

// Real dilogarithm Li2(z) for z <= 1.
inline double dilog(double z) {
  skyline::detail::require_domain(z <= 1.0, "dilog: z > 1 is on the complex branch");
  constexpr double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  if (z == 1.0) {
    return pi2_6;
  }
  if (z < -1.0) {
    const double l = std::log(-z);
    return -pi2_6 - 0.5 * l * l - dilog(1.0 / z);
  }
  if (z < -0.5) {
    // Landen: maps [-1, -0.5) into [1/3, 1/2].
    const double l = std::log1p(-z);
    return -dilog(z / (z - 1.0)) - 0.5 * l * l;
  }
  if (z > 0.5) {
    return pi2_6 - std::log(z) * std::log1p(-z) - dilog(1.0 - z);
  }
  double sum = 0.0;
  double power = z;
  for (int k = 1; k < 200; ++k) {
    const double add = power / (static_cast<double>(k) * k);
    sum += add;
    if (std::abs(add) <= detail::kEps * std::abs(sum) * 0.25) {
      break;
    }
    power *= z;
  }
  return sum;
}

} // namespace skyline::numerics

#endif // SKYLINE_NUMERICS_SPECIAL_FUNCTIONS_HPP
