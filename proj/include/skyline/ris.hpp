#ifndef SKYLINE_RIS_HPP
#define SKYLINE_RIS_HPP

#include "skyline/analytic.hpp"
#include "skyline/error.hpp"
#include "skyline/montecarlo.hpp"
#include "skyline/numerics/quadrature.hpp"
#include "skyline/numerics/special_functions.hpp"
#include "skyline/parallel.hpp"
#include "skyline/params.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

// Blockage seen from a RIS on the roof of the blocking building (M/M model,
// user at the origin). Transmissive: the RIS sits on the positive-side
// blocker (x > 0) and forwards over the buildings beyond it. Reflective: it
// sits on the negative-side blocker (x < 0) and reflects over the positive
// half-line.
namespace skyline::ris {

using analytic::kHalfPi;

enum class RisMode { TRANSMISSIVE, REFLECTIVE };

inline std::string_view to_string(RisMode m) {
  return m == RisMode::TRANSMISSIVE ? "transmissive" : "reflective";
}

// Location and height of the building carrying the RIS. x = 0 is accepted
// in both modes as the degenerate case of a user lifted to height h.
struct RisCondition {
  RisMode mode;
  double x;
  double h;

  static RisCondition transmissive(double x, double h) {
    return validated({RisMode::TRANSMISSIVE, x, h});
  }
  static RisCondition reflective(double x, double h) {
    return validated({RisMode::REFLECTIVE, x, h});
  }

  static RisCondition validated(RisCondition c) {
    skyline::detail::require_domain(c.h > 0.0, "RisCondition: h must be positive");
    if (c.mode == RisMode::TRANSMISSIVE) {
      skyline::detail::require_domain(c.x >= 0.0, "RisCondition: transmissive needs x >= 0");
    } else {
      skyline::detail::require_domain(c.x <= 0.0, "RisCondition: reflective needs x <= 0");
    }
    return c;
  }
};

namespace detail {

inline void require_mode(const RisCondition &c, RisMode mode) {
  RisCondition::validated(c);
  skyline::detail::require_domain(c.mode == mode, "RIS condition has the wrong mode");
}

inline double attenuated_rho(const EnvParams &p, double h) {
  return p.rho() * std::exp(-p.mu() * h);
}

} // namespace detail

// Upper end of the transmissive support in tangent space, h / x.
inline double trans_tan_cap(const RisCondition &c) {
  return c.x == 0.0 ? std::numeric_limits<double>::infinity() : c.h / c.x;
}

inline double trans_cdf_tan(const EnvParams &p, const RisCondition &c, double t) {
  detail::require_mode(c, RisMode::TRANSMISSIVE);
  skyline::detail::require_domain(t >= 0.0, "trans_cdf_tan: t must be non-negative");
  if (t >= trans_tan_cap(c)) return 1.0;
  if (t == 0.0) return 0.0;
  return std::exp(-detail::attenuated_rho(p, c.h) * (1.0 / t - c.x / c.h));
}

inline double trans_pdf_tan(const EnvParams &p, const RisCondition &c, double t) {
  detail::require_mode(c, RisMode::TRANSMISSIVE);
  skyline::detail::require_domain(t >= 0.0, "trans_pdf_tan: t must be non-negative");
  if (t == 0.0 || t > trans_tan_cap(c)) return 0.0;
  const double a = detail::attenuated_rho(p, c.h);
  return a / (t * t) * std::exp(-a * (1.0 / t - c.x / c.h));
}

// E[(tan Theta^T)^k] = c(x,h) alpha^{k-1} Gamma(1 - k, alpha x / h) with
// alpha = rho e^{-mu h}; c(x,h) alpha^{-1} carries e^{alpha x / h}, which is
// folded into the scaled incomplete gamma.
inline double trans_moment(const EnvParams &p, const RisCondition &c, int k) {
  detail::require_mode(c, RisMode::TRANSMISSIVE);
  skyline::detail::require_domain(k >= 0, "trans_moment: order must be non-negative");
  skyline::detail::require_domain(c.x > 0.0, "trans_moment: needs x > 0");
  const double alpha = detail::attenuated_rho(p, c.h);
  const double z = alpha * c.x / c.h;
  return std::pow(alpha, k) * numerics::upper_incomplete_gamma_scaled(1.0 - k, z);
}

inline double trans_cdf(const EnvParams &p, const RisCondition &c, double phi) {
  skyline::detail::require_domain(phi >= 0.0 && phi < kHalfPi, "angle must lie in [0, pi/2)");
  return trans_cdf_tan(p, c, std::tan(phi));
}

inline double trans_pdf(const EnvParams &p, const RisCondition &c, double phi) {
  skyline::detail::require_domain(phi >= 0.0 && phi < kHalfPi, "angle must lie in [0, pi/2)");
  const double t = std::tan(phi);
  return trans_pdf_tan(p, c, t) * (1.0 + t * t);
}

// Support top arctan(h / x) of Theta^T_{x,h}.
inline double trans_angle_cap(const RisCondition &c) {
  return c.x == 0.0 ? kHalfPi : std::atan2(c.h, c.x);
}

inline double trans_mean(const EnvParams &p, const RisCondition &c) {
  detail::require_mode(c, RisMode::TRANSMISSIVE);
  const double a = detail::attenuated_rho(p, c.h);
  const double shift = c.x / c.h;
  return analytic::detail::mean_from_survival(
      [&](double phi) { return -std::expm1(-a * (1.0 / std::tan(phi) - shift)); },
      trans_angle_cap(c));
}

inline double refl_cdf_tan(const EnvParams &p, const RisCondition &c, double t) {
  detail::require_mode(c, RisMode::REFLECTIVE);
  skyline::detail::require_domain(t >= 0.0, "refl_cdf_tan: t must be non-negative");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  return std::exp(-detail::attenuated_rho(p, c.h) / t * std::exp(p.mu() * t * c.x));
}

inline double refl_pdf_tan(const EnvParams &p, const RisCondition &c, double t) {
  detail::require_mode(c, RisMode::REFLECTIVE);
  skyline::detail::require_domain(t >= 0.0, "refl_pdf_tan: t must be non-negative");
  if (t == 0.0 || std::isinf(t)) return 0.0;
  const double a = detail::attenuated_rho(p, c.h) * std::exp(p.mu() * t * c.x);
  return std::exp(-a / t) * a * (1.0 / (t * t) - p.mu() * c.x / t);
}

inline double refl_cdf(const EnvParams &p, const RisCondition &c, double phi) {
  skyline::detail::require_domain(phi >= 0.0 && phi < kHalfPi, "angle must lie in [0, pi/2)");
  return refl_cdf_tan(p, c, std::tan(phi));
}

inline double refl_pdf(const EnvParams &p, const RisCondition &c, double phi) {
  skyline::detail::require_domain(phi >= 0.0 && phi < kHalfPi, "angle must lie in [0, pi/2)");
  const double t = std::tan(phi);
  return refl_pdf_tan(p, c, t) * (1.0 + t * t);
}

inline double refl_mean(const EnvParams &p, const RisCondition &c) {
  detail::require_mode(c, RisMode::REFLECTIVE);
  return analytic::detail::mean_from_survival(
      [&](double phi) { return 1.0 - refl_cdf_tan(p, c, std::tan(phi)); }, kHalfPi);
}

inline double conditional_mean(const EnvParams &p, const RisCondition &c) {
  return c.mode == RisMode::TRANSMISSIVE ? trans_mean(p, c) : refl_mean(p, c);
}

// E over the blocker law j(x, h) of g(x, h). With x = mu h s / lambda the
// measure j dx dh factorises into Gamma(2, 1/mu) in h times Exp(1) in s; both
// axes are cut at their 1 - 1e-8 quantiles.
template <typename G>
double decondition(const EnvParams &p, G &&g, double rel_tol = 1e-9) {
  const double mu = p.mu();
  const double lambda = p.lambda();
  const double s_top = std::log(1e8);
  // Gamma(2) survival (1 + u) e^-u = 1e-8, i.e. u - log1p(u) = ln 1e8.
  double u = s_top + 3.0;
  for (int i = 0; i < 50; ++i) {
    u -= (u - std::log1p(u) - s_top) / (u / (1.0 + u));
  }
  const double h_top = u / mu;
  numerics::QuadratureSpec spec;
  spec.rel_tol = rel_tol;
  spec.abs_tol = 1e-13;
  spec.max_subdivisions = 400;
  auto over_s = [&](double h) {
    auto inner = [&](double s) { return g(mu * h * s / lambda, h) * std::exp(-s); };
    return mu * mu * h * std::exp(-mu * h) * numerics::integrate(inner, 0.0, s_top, spec).value;
  };
  return numerics::integrate(over_s, 0.0, h_top, spec).value;
}

// E[Theta^T] or E[Theta^R] with the blocker drawn from j(x, h).
inline double deconditioned_mean(const EnvParams &p, RisMode mode) {
  if (mode == RisMode::TRANSMISSIVE) {
    return decondition(p, [&](double x, double h) {
      return trans_mean(p, {RisMode::TRANSMISSIVE, x, h});
    });
  }
  return decondition(p, [&](double x, double h) {
    return refl_mean(p, {RisMode::REFLECTIVE, -x, h});
  });
}

struct GainMethod {
  enum class Kind { QUADRATURE, MC } kind = Kind::QUADRATURE;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;

  static GainMethod quadrature() { return {}; }
  static GainMethod monte_carlo(std::size_t n, std::uint64_t seed, unsigned workers = 0) {
    return {Kind::MC, n, seed, workers};
  }
};

// gamma1 = E[Psi] / E[psi] and gamma2 = E[Psi / psi]. gamma2 has no
// quadrature route and is empty for QUADRATURE.
struct AngularGains {
  double gamma1 = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> gamma2;
  double gamma1_stderr = 0.0;
  double gamma2_stderr = 0.0;
  std::size_t n = 0;
  bool small_sample_warning = false;
};

struct CoupledGains {
  AngularGains transmissive;
  AngularGains reflective;
};

// Both RIS modes from the same replications; the user's psi is shared.
inline CoupledGains coupled_gains_mc(const EnvParams &p, std::size_t n, std::uint64_t seed,
                                     unsigned workers = 0) {
  struct Sample {
    double psi = 0.0, psi_t = 0.0, psi_r = 0.0;
  };
  mc::ObserveOptions opt;
  opt.t_min = mc::auto_t_min(p, ModelKind::MM);
  opt.transmissive = true;
  opt.reflective = true;
  // Tangents scale with rho; a RIS maximum below 1% of that scale moves the
  // angle by under 0.01 rho radians and almost never occurs.
  opt.ris_t_floor = std::min(1e-2 * p.rho(), opt.t_min);
  auto samples = map_replications<Sample>(
      n,
      [&](std::size_t i) {
        const auto o = mc::observe(p, ModelKind::MM, derive_seed(seed, i), opt);
        Sample s;
        s.psi = kHalfPi - o.direct.theta;
        // Without a blocker there is no RIS to use; the user keeps psi.
        s.psi_t = o.direct.has_blocker() ? kHalfPi - std::atan(o.tan_trans) : s.psi;
        s.psi_r = o.negative.has_blocker() ? kHalfPi - std::atan(o.tan_refl) : s.psi;
        return s;
      },
      workers);

  auto summarize = [&](auto pick) {
    AngularGains g;
    g.n = n;
    g.small_sample_warning = n < 1000;
    const double nn = static_cast<double>(n);
    double m_psi = 0, m_big = 0, m_ratio = 0;
    for (const auto &s : samples) {
      m_psi += s.psi;
      m_big += pick(s);
      m_ratio += pick(s) / s.psi;
    }
    m_psi /= nn;
    m_big /= nn;
    m_ratio /= nn;
    double v_psi = 0, v_big = 0, c_pb = 0, v_ratio = 0;
    for (const auto &s : samples) {
      const double a = s.psi - m_psi, b = pick(s) - m_big, r = pick(s) / s.psi - m_ratio;
      v_psi += a * a;
      v_big += b * b;
      c_pb += a * b;
      v_ratio += r * r;
    }
    const double d = std::max(nn - 1.0, 1.0);
    v_psi /= d;
    v_big /= d;
    c_pb /= d;
    v_ratio /= d;
    g.gamma1 = m_big / m_psi;
    // Delta method for a ratio of means.
    const double var_g1 =
        (v_big / (m_psi * m_psi) - 2.0 * m_big * c_pb / (m_psi * m_psi * m_psi) +
         m_big * m_big * v_psi / (m_psi * m_psi * m_psi * m_psi)) /
        nn;
    g.gamma1_stderr = std::sqrt(std::max(var_g1, 0.0));
    g.gamma2 = m_ratio;
    g.gamma2_stderr = std::sqrt(v_ratio / nn);
    return g;
  };
  return {summarize([](const Sample &s) { return s.psi_t; }),
          summarize([](const Sample &s) { return s.psi_r; })};
}

inline AngularGains angular_gains(const EnvParams &p, RisMode mode, const GainMethod &method) {
  if (method.kind == GainMethod::Kind::QUADRATURE) {
    AngularGains g;
    const double e_psi = kHalfPi - analytic::mean_theta(p, ModelKind::MM);
    g.gamma1 = (kHalfPi - deconditioned_mean(p, mode)) / e_psi;
    return g;
  }
  if (method.n == 0) {
    throw sample_size_error("angular_gains: MC needs n > 0");
  }
  const auto both = coupled_gains_mc(p, method.n, method.seed, method.workers);
  return mode == RisMode::TRANSMISSIVE ? both.transmissive : both.reflective;
}

} // namespace skyline::ris

#endif // SKYLINE_RIS_HPP
