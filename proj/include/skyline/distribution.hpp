#ifndef SKYLINE_DISTRIBUTION_HPP
#define SKYLINE_DISTRIBUTION_HPP

#include "skyline/analytic.hpp"
#include "skyline/error.hpp"
#include "skyline/params.hpp"
#include "skyline/ris.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>

namespace skyline {

enum class AngleVariant { MM, MD, DM, WEIBULL, ELEVATED, TRANSMISSIVE, REFLECTIVE };

inline std::string_view to_string(AngleVariant v) {
  switch (v) {
  case AngleVariant::MM: return "mm";
  case AngleVariant::MD: return "md";
  case AngleVariant::DM: return "dm";
  case AngleVariant::WEIBULL: return "weibull";
  case AngleVariant::ELEVATED: return "elevated";
  case AngleVariant::TRANSMISSIVE: return "transmissive";
  case AngleVariant::REFLECTIVE: return "reflective";
  }
  return "?";
}

// One evaluable angle law: the ground-level skyline variants, the elevated
// observer (M/M, height h) and the RIS angles conditioned on (x, h).
class AngleDistribution {
public:
  static AngleDistribution ground(const EnvParams &p, ModelKind model) {
    AngleDistribution d(p);
    switch (model) {
    case ModelKind::MM: d.variant_ = AngleVariant::MM; break;
    case ModelKind::MD: d.variant_ = AngleVariant::MD; break;
    case ModelKind::DM: d.variant_ = AngleVariant::DM; break;
    case ModelKind::WEIBULL: d.variant_ = AngleVariant::WEIBULL; break;
    }
    d.model_ = model;
    return d;
  }

  static AngleDistribution elevated(const EnvParams &p, double h) {
    detail::require_domain(h >= 0.0, "elevated: height must be non-negative");
    AngleDistribution d(p);
    d.variant_ = AngleVariant::ELEVATED;
    d.h_ = h;
    return d;
  }

  static AngleDistribution ris(const EnvParams &p, const ris::RisCondition &c) {
    const auto cond = ris::RisCondition::validated(c);
    AngleDistribution d(p);
    d.variant_ = cond.mode == ris::RisMode::TRANSMISSIVE ? AngleVariant::TRANSMISSIVE
                                                          : AngleVariant::REFLECTIVE;
    d.x_ = cond.x;
    d.h_ = cond.h;
    return d;
  }

  AngleVariant variant() const noexcept { return variant_; }
  const EnvParams &params() const noexcept { return params_; }
  double x() const noexcept { return x_; }
  double h() const noexcept { return h_; }

  // [lo, hi] in radians; hi = pi/2 is open.
  std::pair<double, double> support() const {
    if (variant_ == AngleVariant::TRANSMISSIVE) return {0.0, ris::trans_angle_cap(cond())};
    return {0.0, analytic::kHalfPi};
  }

  double cdf(double phi) const {
    detail::require_domain(phi >= 0.0, "cdf: angle must be non-negative");
    if (phi >= support().second) return 1.0;
    switch (variant_) {
    case AngleVariant::ELEVATED: return analytic::cdf_theta_xh(params_, h_, phi);
    case AngleVariant::TRANSMISSIVE: return ris::trans_cdf(params_, cond(), phi);
    case AngleVariant::REFLECTIVE: return ris::refl_cdf(params_, cond(), phi);
    default: return analytic::cdf_theta(params_, model_, phi);
    }
  }

  double pdf(double phi) const {
    detail::require_domain(phi >= 0.0, "pdf: angle must be non-negative");
    if (phi >= support().second) return 0.0;
    switch (variant_) {
    case AngleVariant::ELEVATED: return analytic::pdf_theta_xh(params_, h_, phi);
    case AngleVariant::TRANSMISSIVE: return ris::trans_pdf(params_, cond(), phi);
    case AngleVariant::REFLECTIVE: return ris::refl_pdf(params_, cond(), phi);
    default: return analytic::pdf_theta(params_, model_, phi);
    }
  }

  double cdf_tan(double t) const {
    detail::require_domain(t >= 0.0, "cdf_tan: t must be non-negative");
    switch (variant_) {
    case AngleVariant::ELEVATED: return analytic::cdf_tan_theta_xh(params_, h_, t);
    case AngleVariant::TRANSMISSIVE: return ris::trans_cdf_tan(params_, cond(), t);
    case AngleVariant::REFLECTIVE: return ris::refl_cdf_tan(params_, cond(), t);
    case AngleVariant::DM: return analytic::dm_cdf_tan_theta(params_, t);
    default: return analytic::cdf_tan_theta(params_, model_, t);
    }
  }

  double mean() const {
    switch (variant_) {
    case AngleVariant::ELEVATED: return analytic::mean_theta(params_, ModelKind::MM, h_);
    case AngleVariant::TRANSMISSIVE:
    case AngleVariant::REFLECTIVE: return ris::conditional_mean(params_, cond());
    default: return analytic::mean_theta(params_, model_);
    }
  }

  // Law of the complementary angle pi/2 - angle.
  double cdf_psi(double phi) const {
    detail::require_domain(phi > 0.0 && phi <= analytic::kHalfPi, "cdf_psi: angle in (0, pi/2]");
    return 1.0 - cdf(analytic::kHalfPi - phi);
  }

private:
  explicit AngleDistribution(const EnvParams &p) : params_(p) {}

  ris::RisCondition cond() const {
    return {variant_ == AngleVariant::TRANSMISSIVE ? ris::RisMode::TRANSMISSIVE
                                                   : ris::RisMode::REFLECTIVE,
            x_, h_};
  }

  EnvParams params_;
  AngleVariant variant_ = AngleVariant::MM;
  ModelKind model_ = ModelKind::MM;
  double x_ = 0.0;
  double h_ = 0.0;
};

inline AngleDistribution trans_angle_distribution(const EnvParams &p, double x, double h) {
  return AngleDistribution::ris(p, ris::RisCondition::transmissive(x, h));
}

inline AngleDistribution refl_angle_distribution(const EnvParams &p, double x, double h) {
  return AngleDistribution::ris(p, ris::RisCondition::reflective(x, h));
}

// Blocker law j(x, h) of the M/M model as an object.
class BlockingJointDensity {
public:
  explicit BlockingJointDensity(const EnvParams &p) : params_(p) {}

  double operator()(double x, double h) const { return analytic::joint_density(params_, x, h); }
  double marginal_h(double h) const { return analytic::marginal_h(params_, h); }
  double marginal_x(double x) const { return analytic::marginal_x(params_, x); }
  analytic::BlockingMeans means() const { return analytic::blocking_means(params_); }

private:
  EnvParams params_;
};

enum class TableAxis { ANGLE, TANGENT };

// Long-format table on n angles of [0, hi - 1e-6]. ANGLE writes
// "phi,cdf,pdf"; TANGENT writes "t,cdf,pdf" with t = tan(phi) and the
// density taken with respect to t.
inline void write_table(std::ostream &os, const AngleDistribution &d, int n = 512,
                        TableAxis axis = TableAxis::ANGLE) {
  detail::require_domain(n >= 2, "write_table: need at least 2 points");
  const double hi = d.support().second - 1e-6;
  os << (axis == TableAxis::ANGLE ? "phi" : "t") << ",cdf,pdf\n";
  char buf[96];
  for (int i = 0; i < n; ++i) {
    const double phi = hi * i / (n - 1);
    double coord = phi, density = d.pdf(phi);
    if (axis == TableAxis::TANGENT) {
      coord = std::tan(phi);
      density /= 1.0 + coord * coord;
    }
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", coord, d.cdf(phi), density);
    os << buf;
  }
}

} // namespace skyline

#endif // SKYLINE_DISTRIBUTION_HPP
