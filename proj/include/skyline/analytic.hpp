#ifndef SKYLINE_ANALYTIC_HPP
#define SKYLINE_ANALYTIC_HPP

#include "skyline/error.hpp"
#include "skyline/numerics/quadrature.hpp"
#include "skyline/numerics/special_functions.hpp"
#include "skyline/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

// Closed-form laws of the blockage angle theta (user on the ground or
// elevated), of the blocking building (X+, H+) and of its index.
namespace skyline::analytic {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

namespace detail {

inline void require_angle(double phi) {
  skyline::detail::require_domain(phi >= 0.0 && phi < kHalfPi,
                                  "angle must lie in [0, pi/2)");
}

// Effective Frechet scale s with P[tan theta <= t] = exp(-s / t).
inline double frechet_scale(const EnvParams &p, ModelKind model) {
  switch (model) {
  case ModelKind::MM:
  case ModelKind::MD:
    return p.rho();
  case ModelKind::WEIBULL:
    return p.rho() * std::tgamma(1.0 + 1.0 / p.weibull_shape());
  case ModelKind::DM:
    break;
  }
  throw skyline::domain_error("no Frechet form for the D/M variant");
}

// exp(-s / t) with the t -> 0 and t -> inf limits.
inline double frechet_cdf(double s, double t) {
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  return std::exp(-s / t);
}

// E[X] = integral of P[X > phi] over [0, hi] for a variable supported there.
template <typename Survival> double mean_from_survival(Survival &&survival, double hi) {
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  spec.abs_tol = 1e-14;
  spec.max_subdivisions = 2000;
  return numerics::integrate(survival, 0.0, hi, spec).value;
}

} // namespace detail

// P[tan theta <= t] for the Poisson variants (MM, MD, WEIBULL).
inline double cdf_tan_theta(const EnvParams &p, ModelKind model, double t) {
  skyline::detail::require_domain(t >= 0.0, "cdf_tan_theta: t must be non-negative");
  return detail::frechet_cdf(detail::frechet_scale(p, model), t);
}

inline double pdf_tan_theta(const EnvParams &p, ModelKind model, double t) {
  skyline::detail::require_domain(t >= 0.0, "pdf_tan_theta: t must be non-negative");
  if (t == 0.0 || std::isinf(t)) return 0.0;
  const double s = detail::frechet_scale(p, model);
  return std::exp(-s / t) * s / (t * t);
}

namespace detail {

// Integral over the grid phase u in [0, spacing). The first factor rises
// from 0 over a width 1 / (mu t), which may be far below the spacing, so
// the range is split there.
template <typename F>
double dm_phase_integral(F &&f, double spacing, double width, double tol) {
  numerics::QuadratureSpec spec;
  spec.rel_tol = std::max(tol, 1e-14);
  spec.abs_tol = tol * 1e-3;
  spec.max_subdivisions = 2000;
  double total = 0.0;
  double lo = 0.0;
  for (double edge : {width, 40.0 * width, spacing}) {
    const double hi = std::min(edge, spacing);
    if (hi > lo) {
      total += numerics::integrate(f, lo, hi, spec).value;
      lo = hi;
    }
  }
  return total;
}

} // namespace detail

// D/M: lambda * int_0^{1/lambda} prod_i (1 - exp(-mu (u + (i-1)/lambda) t)) du.
// The product is cut once the remaining log-tail bound drops below tol.
inline double dm_cdf_tan_theta(const EnvParams &p, double t, double tol = 1e-10) {
  skyline::detail::require_domain(t >= 0.0, "dm_cdf_tan_theta: t must be non-negative");
  skyline::detail::require_domain(tol > 0.0, "dm_cdf_tan_theta: tol must be positive");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  const double lambda = p.lambda();
  const double mu = p.mu();
  const double spacing = 1.0 / lambda;
  // log(1 - y) >= -y / (1 - y); the tail from term n on is bounded by a
  // geometric series with ratio exp(-mu t / lambda).
  const double one_minus_ratio = -std::expm1(-mu * t * spacing);
  auto log_product = [&](double u) {
    double acc = 0.0;
    for (long n = 0;; ++n) {
      const double y = std::exp(-mu * (u + n * spacing) * t);
      const double tail = y / (one_minus_ratio * (1.0 - y));
      if (n > 0 && tail < tol) {
        break;
      }
      if (n >= 1000000) {
        throw skyline::truncation_error("dm_cdf_tan_theta: product did not converge");
      }
      acc += std::log1p(-y);
      if (acc < -745.0) {
        return -std::numeric_limits<double>::infinity();
      }
    }
    return acc;
  };
  const double v = detail::dm_phase_integral([&](double u) { return std::exp(log_product(u)); }, spacing,
                                     1.0 / (mu * t), tol);
  return std::clamp(lambda * v, 0.0, 1.0);
}

// Density of tan theta in the D/M case, by differentiating the product.
inline double dm_pdf_tan_theta(const EnvParams &p, double t, double tol = 1e-10) {
  skyline::detail::require_domain(t >= 0.0, "dm_pdf_tan_theta: t must be non-negative");
  if (t == 0.0 || std::isinf(t)) return 0.0;
  const double lambda = p.lambda();
  const double mu = p.mu();
  const double spacing = 1.0 / lambda;
  const double one_minus_ratio = -std::expm1(-mu * t * spacing);
  auto integrand = [&](double u) {
    double log_prod = 0.0;
    double score = 0.0; // d/dt log product
    for (long n = 0;; ++n) {
      const double a = mu * (u + n * spacing);
      const double y = std::exp(-a * t);
      const double tail = y / (one_minus_ratio * (1.0 - y));
      // The derivative tail is bounded by the same series times a / t.
      if (n > 0 && tail * (1.0 + a * t) < tol * t) {
        break;
      }
      if (n >= 1000000) {
        throw skyline::truncation_error("dm_pdf_tan_theta: product did not converge");
      }
      log_prod += std::log1p(-y);
      if (log_prod < -745.0) {
        return 0.0;
      }
      // a y / (1 - y), finite as a -> 0 (limit 1 / t).
      const double term = a * t < 1e-12 ? 1.0 / t : a * y / -std::expm1(-a * t);
      score += term;
    }
    return std::exp(log_prod) * score;
  };
  return lambda * detail::dm_phase_integral(integrand, spacing, 1.0 / (mu * t), tol);
}

// P[theta <= phi] for the ground user, any variant.
inline double cdf_theta(const EnvParams &p, ModelKind model, double phi, double tol = 1e-10) {
  detail::require_angle(phi);
  const double t = std::tan(phi);
  if (model == ModelKind::DM) {
    return dm_cdf_tan_theta(p, t, tol);
  }
  return cdf_tan_theta(p, model, t);
}

inline double pdf_theta(const EnvParams &p, ModelKind model, double phi, double tol = 1e-10) {
  detail::require_angle(phi);
  if (phi == 0.0) return 0.0;
  const double t = std::tan(phi);
  const double sec2 = 1.0 + t * t;
  if (model == ModelKind::DM) {
    return dm_pdf_tan_theta(p, t, tol) * sec2;
  }
  const double s = detail::frechet_scale(p, model);
  const double sin_phi = std::sin(phi);
  return std::exp(-s / t) * s / (sin_phi * sin_phi);
}

// Visibility angle psi = pi/2 - theta.
inline double cdf_psi(const EnvParams &p, ModelKind model, double phi, double tol = 1e-10) {
  skyline::detail::require_domain(phi > 0.0 && phi <= kHalfPi, "cdf_psi: angle in (0, pi/2]");
  return 1.0 - cdf_theta(p, model, kHalfPi - phi, tol);
}

// Observer at height h (M/M). The law does not depend on the observer's x.
inline double cdf_tan_theta_xh(const EnvParams &p, double h, double t) {
  skyline::detail::require_domain(h >= 0.0, "observer height must be non-negative");
  skyline::detail::require_domain(t >= 0.0, "t must be non-negative");
  return detail::frechet_cdf(p.rho() * std::exp(-p.mu() * h), t);
}

inline double cdf_theta_xh(const EnvParams &p, double h, double phi) {
  detail::require_angle(phi);
  return cdf_tan_theta_xh(p, h, std::tan(phi));
}

inline double pdf_theta_xh(const EnvParams &p, double h, double phi) {
  skyline::detail::require_domain(h >= 0.0, "observer height must be non-negative");
  detail::require_angle(phi);
  if (phi == 0.0) return 0.0;
  const double s = p.rho() * std::exp(-p.mu() * h);
  const double sin_phi = std::sin(phi);
  return std::exp(-s / std::tan(phi)) * s / (sin_phi * sin_phi);
}

inline double cdf_psi_xh(const EnvParams &p, double h, double phi) {
  skyline::detail::require_domain(phi > 0.0 && phi <= kHalfPi, "cdf_psi_xh: angle in (0, pi/2]");
  return -std::expm1(-p.rho() * std::exp(-p.mu() * h) * std::tan(phi));
}

// P[theta_{x,h} <= zeta]: the probability that a user at height h sees the
// sky above elevation zeta.
inline double los_probability(const EnvParams &p, double h, double zeta) {
  skyline::detail::require_domain(zeta > 0.0 && zeta < kHalfPi,
                                  "los_probability: zeta must lie in (0, pi/2)");
  skyline::detail::require_domain(h >= 0.0, "observer height must be non-negative");
  return std::exp(-p.rho() * std::exp(-p.mu() * h) / std::tan(zeta));
}

// E[theta] as the integral of P[theta > phi] over [0, pi/2). A positive
// observer height is only defined for the M/M model.
inline double mean_theta(const EnvParams &p, ModelKind model, double h = 0.0) {
  skyline::detail::require_domain(h >= 0.0, "mean_theta: height must be non-negative");
  if (model == ModelKind::DM) {
    skyline::detail::require_domain(h == 0.0, "mean_theta: elevated observer needs M/M");
    return detail::mean_from_survival(
        [&](double phi) { return 1.0 - dm_cdf_tan_theta(p, std::tan(phi), 1e-12); }, kHalfPi);
  }
  if (h > 0.0) {
    skyline::detail::require_domain(model == ModelKind::MM,
                                    "mean_theta: elevated observer needs M/M");
  }
  const double s = detail::frechet_scale(p, model) * std::exp(-p.mu() * h);
  return detail::mean_from_survival([s](double phi) { return -std::expm1(-s / std::tan(phi)); },
                                    kHalfPi);
}

inline double mean_psi(const EnvParams &p, ModelKind model, double h = 0.0) {
  return kHalfPi - mean_theta(p, model, h);
}

// Joint density of the blocking building (X+, H+) in the M/M model.
inline double joint_density(const EnvParams &p, double x, double h) {
  skyline::detail::require_domain(x > 0.0, "joint_density: x must be positive");
  skyline::detail::require_domain(h >= 0.0, "joint_density: h must be non-negative");
  if (h == 0.0) return 0.0;
  const double lambda = p.lambda();
  const double mu = p.mu();
  return lambda * mu * std::exp(-mu * h - lambda * x / (mu * h));
}

// Gamma(2, 1/mu) density of H+.
inline double marginal_h(const EnvParams &p, double h) {
  skyline::detail::require_domain(h > 0.0, "marginal_h: h must be positive");
  const double mu = p.mu();
  return mu * mu * h * std::exp(-mu * h);
}

// Density of X+: 2 lambda sqrt(lambda x) K1(2 sqrt(lambda x)).
inline double marginal_x(const EnvParams &p, double x) {
  skyline::detail::require_domain(x > 0.0, "marginal_x: x must be positive");
  const double lambda = p.lambda();
  const double z = 2.0 * std::sqrt(lambda * x);
  return lambda * z * numerics::bessel_k1(z);
}

struct BlockingMeans {
  double height; // E[H+] = 2 / mu
  double distance; // E[X+] = 2 / lambda
};

inline BlockingMeans blocking_means(const EnvParams &p) {
  return {2.0 / p.mu(), 2.0 / p.lambda()};
}

// Mean number of buildings in front of a blocker at (x, h):
// lambda x (1 - (1 - e^{-mu h}) / (mu h)).
inline double blocking_index_mean(const EnvParams &p, double x, double h) {
  skyline::detail::require_domain(x > 0.0 && h > 0.0, "blocking_index_mean: x, h > 0");
  const double u = p.mu() * h;
  // 1 - (1 - e^-u)/u, with its Taylor form where the difference cancels.
  const double shortfall = u < 1e-4 ? u / 2.0 - u * u / 6.0 + u * u * u / 24.0
                                    : 1.0 + std::expm1(-u) / u;
  return p.lambda() * x * shortfall;
}

// P[k = i | (X+, H+) = (x, h)]: a Poisson(m) law shifted to start at 1.
inline double blocking_index_pmf(const EnvParams &p, double x, double h, long i) {
  skyline::detail::require_domain(i >= 1, "blocking_index_pmf: index starts at 1");
  const double m = blocking_index_mean(p, x, h);
  const double j = static_cast<double>(i - 1);
  if (m == 0.0) {
    return i == 1 ? 1.0 : 0.0;
  }
  return std::exp(j * std::log(m) - m - std::lgamma(j + 1.0));
}

} // namespace skyline::analytic

#endif // SKYLINE_ANALYTIC_HPP
