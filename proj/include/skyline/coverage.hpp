#ifndef SKYLINE_COVERAGE_HPP
#define SKYLINE_COVERAGE_HPP

#include "skyline/analytic.hpp"
#include "skyline/error.hpp"
#include "skyline/numerics/special_functions.hpp"
#include "skyline/params.hpp"
#include "skyline/ris.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

// Linear visibility gain of transmissive RISs: lengths of the visible
// strip at altitude h + H and the probability that a RIS restores a link
// to an aerial node when none is directly visible.
namespace skyline::coverage {

// Aerial nodes form a PPP of intensity nu on a line at height H above the
// blocking roof.
class CoverageScenario {
public:
  CoverageScenario(const EnvParams &env, double H, double nu) : env_(env), H_(H), nu_(nu) {
    if (!(H > 0.0) || !std::isfinite(H)) {
      throw parameter_error("CoverageScenario: H must be positive");
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw parameter_error("CoverageScenario: nu must be positive");
    }
  }

  const EnvParams &env() const noexcept { return env_; }
  double H() const noexcept { return H_; }
  double nu() const noexcept { return nu_; }
  double h_nu() const noexcept { return H_ * nu_; }

private:
  EnvParams env_;
  double H_;
  double nu_;
};

// Typed result for an expectation that is +infinity.
struct Divergent {
  friend bool operator==(Divergent, Divergent) { return true; }
};

using LengthExpectation = std::variant<double, Divergent>;

namespace detail {

inline void require_blocker(double x, double h) {
  skyline::detail::require_domain(x > 0.0, "blocker location must be positive");
  skyline::detail::require_domain(h > 0.0, "blocker height must be positive");
}

} // namespace detail

// |l(x, h, H)| = x + H x / h, the strip seen past the blocker's roof line.
inline double visible_length(double x, double h, double H) {
  detail::require_blocker(x, h);
  skyline::detail::require_domain(H > 0.0, "H must be positive");
  return x + H * x / h;
}

// |L(x, h, H)| = x + H / tan(Theta^T) for one realised RIS angle.
inline double visible_length_with_ris(double x, double h, double H, double tan_trans) {
  detail::require_blocker(x, h);
  skyline::detail::require_domain(H > 0.0, "H must be positive");
  skyline::detail::require_domain(tan_trans > 0.0, "RIS tangent must be positive");
  return x + H / tan_trans;
}

// E|L(x, h, H)| = x + (e^{mu h} h + x rho) H / (h rho).
inline double expected_visible_length_with_ris(const EnvParams &p, double x, double h, double H) {
  detail::require_blocker(x, h);
  skyline::detail::require_domain(H > 0.0, "H must be positive");
  const double rho = p.rho();
  return x + (std::exp(p.mu() * h) * h + x * rho) * H / (h * rho);
}

// E|L| - |l| = e^{mu h} H / rho.
inline double ris_extension(const EnvParams &p, double h, double H) {
  skyline::detail::require_domain(h >= 0.0, "blocker height must be non-negative");
  skyline::detail::require_domain(H > 0.0, "H must be positive");
  return std::exp(p.mu() * h) * H / p.rho();
}

// E[l] = (2 + H mu) / lambda.
inline double mean_l(const CoverageScenario &sc) {
  return (2.0 + sc.H() * sc.env().mu()) / sc.env().lambda();
}

// E[L] diverges: the extension e^{mu h} H / rho is not integrable against
// the Gamma(2, 1/mu) law of H+.
inline LengthExpectation mean_L(const CoverageScenario &) { return Divergent{}; }

// tau_H(x, h) = 1 - rho / (e^{mu h} H nu + rho). Independent of x.
inline double tau_conditional(const CoverageScenario &sc, double x, double h) {
  detail::require_blocker(x, h);
  const double ratio = sc.env().rho() * std::exp(-sc.env().mu() * h) / sc.h_nu();
  return 1.0 / (1.0 + ratio);
}

// tau_H deconditioned over j(x, h), via the dilogarithm closed form. With
// r = rho / (H nu) it equals -Li2(-r) / r, which is used where the closed
// form cancels catastrophically (r outside [1e-6, 1e6]).
inline double tau_unconditional(const CoverageScenario &sc) {
  const double a = sc.h_nu();
  const double rho = sc.env().rho();
  const double r = rho / a;
  if (r < 1e-6 || r > 1e6) {
    return -numerics::dilog(-r) / r;
  }
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double l1 = std::log1p(r);
  return a / (6.0 * rho) *
         (pi2 + 6.0 * std::log(r) * l1 - 3.0 * l1 * l1 - 6.0 * numerics::dilog(a / (a + rho)));
}

// Aerial deployments of the case study.
struct AerialTier {
  const char *name;
  double altitude; // H (m)
  double density;  // nu (1/m)
};

inline constexpr AerialTier kHap{"HAP", 1e4, 5e-5};
inline constexpr AerialTier kSatellite{"satellite", 5e5, 2.3163e-6};

struct CityCase {
  const char *name;
  double lambda;
  double mu;
};

inline constexpr std::array<CityCase, 3> kCityCases{{
    {"dense_urban", 0.012, 0.02},
    {"urban", 0.007, 0.02},
    {"suburban", 0.001, 0.02},
}};

struct CaseStudyRow {
  std::string name;
  double lambda = 0.0;
  double mu = 0.0;
  double e_theta = 0.0;
  double e_theta_t = 0.0;
  double e_theta_r = 0.0;
  double e_l_hap = 0.0;
  double e_l_sat = 0.0;
  double tau_hap = 0.0;
  double tau_sat = 0.0;
};

// One row of the visibility case study. The deconditioned RIS means are the
// slow part; pass with_ris_means = false to skip them (left as NaN).
inline CaseStudyRow case_study_row(const CityCase &c, bool with_ris_means = true) {
  const EnvParams p(c.lambda, c.mu);
  CaseStudyRow row;
  row.name = c.name;
  row.lambda = c.lambda;
  row.mu = c.mu;
  row.e_theta = analytic::mean_theta(p, ModelKind::MM);
  if (with_ris_means) {
    row.e_theta_t = ris::deconditioned_mean(p, ris::RisMode::TRANSMISSIVE);
    row.e_theta_r = ris::deconditioned_mean(p, ris::RisMode::REFLECTIVE);
  } else {
    row.e_theta_t = row.e_theta_r = std::numeric_limits<double>::quiet_NaN();
  }
  const CoverageScenario hap(p, kHap.altitude, kHap.density);
  const CoverageScenario sat(p, kSatellite.altitude, kSatellite.density);
  row.e_l_hap = mean_l(hap);
  row.e_l_sat = mean_l(sat);
  row.tau_hap = tau_unconditional(hap);
  row.tau_sat = tau_unconditional(sat);
  return row;
}

inline std::vector<CaseStudyRow> case_study(bool with_ris_means = true) {
  std::vector<CaseStudyRow> rows;
  for (const auto &c : kCityCases) {
    rows.push_back(case_study_row(c, with_ris_means));
  }
  return rows;
}

} // namespace skyline::coverage

#endif // SKYLINE_COVERAGE_HPP
