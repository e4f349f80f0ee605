#ifndef SKYLINE_PARAMS_HPP
#define SKYLINE_PARAMS_HPP

#include "skyline/error.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace skyline {

// City model parameters: building intensity lambda (1/length), inverse mean
// building height mu (1/length) and the Weibull shape of the heights.
// rho = lambda / mu is always derived from its factors.
class EnvParams {
public:
  EnvParams(double lambda, double mu, double weibull_shape = 1.0)
      : lambda_(lambda), mu_(mu), shape_(weibull_shape) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw parameter_error("lambda must be positive and finite");
    }
    if (!(mu > 0.0) || !std::isfinite(mu)) {
      throw parameter_error("mu must be positive and finite");
    }
    if (!(weibull_shape > 0.0) || !std::isfinite(weibull_shape)) {
      throw parameter_error("weibull shape must be positive and finite");
    }
  }

  // Parameters with lambda = rho and mu = 1. Every M/M angle law depends on
  // (lambda, mu) only through rho.
  static EnvParams from_rho(double rho) { return EnvParams(rho, 1.0); }

  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }
  double weibull_shape() const noexcept { return shape_; }
  double rho() const noexcept { return lambda_ / mu_; }

  EnvParams with_shape(double k) const { return EnvParams(lambda_, mu_, k); }

  friend bool operator==(const EnvParams &, const EnvParams &) = default;

private:
  double lambda_;
  double mu_;
  double shape_;
};

// Building layout and height law.
//   MM: Poisson locations, exponential heights.
//   MD: Poisson locations, constant height 1/mu.
//   DM: grid with spacing 1/lambda and uniform phase, exponential heights.
//   WEIBULL: Poisson locations, Weibull(shape, 1/mu) heights.
enum class ModelKind { MM, MD, DM, WEIBULL };

inline std::string_view to_string(ModelKind m) {
  switch (m) {
  case ModelKind::MM:
    return "mm";
  case ModelKind::MD:
    return "md";
  case ModelKind::DM:
    return "dm";
  case ModelKind::WEIBULL:
    return "weibull";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model(std::string_view s) {
  if (s == "mm") return ModelKind::MM;
  if (s == "md") return ModelKind::MD;
  if (s == "dm") return ModelKind::DM;
  if (s == "weibull") return ModelKind::WEIBULL;
  return std::nullopt;
}

} // namespace skyline

#endif // SKYLINE_PARAMS_HPP
