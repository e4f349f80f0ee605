#ifndef SKYLINE_PROCESS_HPP
#define SKYLINE_PROCESS_HPP

#include "skyline/error.hpp"
#include "skyline/numerics/special_functions.hpp"
#include "skyline/params.hpp"
#include "skyline/rng.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace skyline {

struct Building {
  double x;
  double h;

  friend bool operator==(const Building &, const Building &) = default;
};

// One sampled skyline on (0, x_max]. Buildings are ordered nearest first.
// t_min and the tail bound epsilon record how the window was chosen; both
// are zero for hand-built realizations.
struct Realization {
  std::vector<Building> buildings;
  double x_max = 0.0;
  std::uint64_t seed = 0;
  double t_min = 0.0;
  double epsilon = 0.0;

  bool empty() const noexcept { return buildings.empty(); }
  std::size_t size() const noexcept { return buildings.size(); }

  friend bool operator==(const Realization &, const Realization &) = default;
};

// A point in the vertical plane from which the skyline is observed.
struct Observer {
  double x = 0.0;
  double h = 0.0;
};

struct BlockageResult {
  double theta = 0.0;
  double tan_theta = 0.0;
  double x_plus = 0.0;
  double h_plus = 0.0;
  std::size_t index_k = 0; // 1-based; 0 means nothing rises above the observer
  bool truncation_warning = false;

  bool has_blocker() const noexcept { return index_k != 0; }
};

inline constexpr double kDefaultEpsilon = 1e-8;
inline const double kDefaultTanMin = std::tan(0.5 * std::numbers::pi / 180.0);
inline constexpr double kMaxWindow = 1e9;

namespace detail {

// Integral of the height survival function S(y) = P[H > y] over [a, inf).
inline double survival_tail_integral(const EnvParams &p, ModelKind model, double a) {
  const double mu = p.mu();
  const double neg = a < 0.0 ? -a : 0.0;
  a = std::max(a, 0.0);
  switch (model) {
  case ModelKind::MM:
  case ModelKind::DM:
    return neg + std::exp(-mu * a) / mu;
  case ModelKind::WEIBULL: {
    const double k = p.weibull_shape();
    return neg + numerics::upper_incomplete_gamma(1.0 / k, std::pow(mu * a, k)) / (mu * k);
  }
  case ModelKind::MD:
    return neg + std::max(0.0, 1.0 / mu - a);
  }
  return std::numeric_limits<double>::infinity();
}

} // namespace detail

// Upper bound on the probability that some building beyond x_max has a
// tangent larger than t when seen from `view` (which must lie at or before
// x_max). Exact for the Poisson variants, a union bound for DM.
inline double tail_probability(const EnvParams &p, ModelKind model, Observer view, double t,
                               double x_max) {
  detail::require_domain(t > 0.0, "tail_probability: t must be positive");
  detail::require_domain(x_max >= view.x, "tail_probability: x_max before viewpoint");
  const double a0 = view.h + t * (x_max - view.x);
  if (model == ModelKind::DM) {
    if (a0 < 0.0) {
      return 1.0;
    }
    const double ratio = std::exp(-p.mu() * t / p.lambda());
    return std::min(1.0, std::exp(-p.mu() * a0) / -std::expm1(std::log(ratio)));
  }
  const double count = p.lambda() / t * detail::survival_tail_integral(p, model, a0);
  return -std::expm1(-count);
}

// Smallest window end (up to a relative 1e-9) such that tail_probability is
// below epsilon. Never returns less than the viewpoint's x.
inline double truncation_distance(const EnvParams &p, ModelKind model, Observer view,
                                  double t_min, double epsilon) {
  detail::require_domain(t_min > 0.0, "truncation_distance: t_min must be positive");
  detail::require_domain(epsilon > 0.0 && epsilon < 1.0,
                         "truncation_distance: epsilon must lie in (0, 1)");
  auto tail = [&](double x) { return tail_probability(p, model, view, t_min, x); };
  if (tail(view.x) < epsilon) {
    return view.x;
  }
  if (model == ModelKind::MM) {
    // (lambda / (mu t)) exp(-mu (h + t (x - x0))) = -log(1 - eps)
    const double target = -std::log1p(-epsilon);
    const double mu = p.mu();
    const double x = view.x +
                     (std::log(p.lambda() / (mu * t_min * target)) / mu - view.h) / t_min;
    if (!(x - view.x <= kMaxWindow)) {
      throw truncation_error("truncation window exceeds the 1e9 cap");
    }
    return x;
  }
  double lo = view.x;
  double step = 1.0 / p.lambda();
  double hi = view.x + step;
  while (tail(hi) >= epsilon) {
    lo = hi;
    step *= 2.0;
    hi = view.x + step;
    if (step > kMaxWindow) {
      throw truncation_error("truncation window exceeds the 1e9 cap");
    }
  }
  while (hi - lo > 1e-9 * (hi - view.x)) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) < epsilon ? hi : lo) = mid;
  }
  return hi;
}

// Incremental sampler of one skyline. Extending a realization to a larger
// window draws only the new buildings, so a realization can be grown until
// a maximum is certified.
class SkylineGenerator {
public:
  SkylineGenerator(const EnvParams &params, ModelKind model, std::uint64_t seed)
      : params_(params), model_(model), seed_(seed), rng_(seed) {
    if (model_ == ModelKind::DM) {
      phase_ = rng_.uniform() / params_.lambda();
    }
  }

  Realization start() const {
    Realization r;
    r.seed = seed_;
    return r;
  }

  // Adds the buildings in (r.x_max, x_max].
  void extend(Realization &r, double x_max) {
    if (x_max <= r.x_max) {
      return;
    }
    if (!(x_max <= kMaxWindow)) {
      throw truncation_error("window exceeds the 1e9 cap");
    }
    const double lambda = params_.lambda();
    if (model_ == ModelKind::DM) {
      for (std::size_t j = r.buildings.size();; ++j) {
        const double x = phase_ + static_cast<double>(j) / lambda;
        if (x > x_max) {
          break;
        }
        r.buildings.push_back({x, draw_height()});
      }
    } else {
      // Memorylessness lets the walk restart at the old window end.
      double x = r.x_max;
      for (;;) {
        x += rng_.exponential(lambda);
        if (x > x_max) {
          break;
        }
        r.buildings.push_back({x, draw_height()});
      }
    }
    r.x_max = x_max;
  }

  const EnvParams &params() const noexcept { return params_; }
  ModelKind model() const noexcept { return model_; }
  Rng &rng() noexcept { return rng_; }

private:
  double draw_height() {
    switch (model_) {
    case ModelKind::MM:
    case ModelKind::DM:
      return rng_.exponential(params_.mu());
    case ModelKind::MD:
      return 1.0 / params_.mu();
    case ModelKind::WEIBULL:
      return rng_.weibull(params_.weibull_shape(), 1.0 / params_.mu());
    }
    return 0.0;
  }

  EnvParams params_;
  ModelKind model_;
  std::uint64_t seed_;
  Rng rng_;
  double phase_ = 0.0;
};

inline Realization sample_realization(const EnvParams &params, ModelKind model,
                                      double observer_height, double t_min, double epsilon,
                                      std::uint64_t seed) {
  detail::require_domain(observer_height >= 0.0,
                         "sample_realization: observer height must be non-negative");
  const double x_max =
      truncation_distance(params, model, {0.0, observer_height}, t_min, epsilon);
  SkylineGenerator gen(params, model, seed);
  Realization r = gen.start();
  r.t_min = t_min;
  r.epsilon = epsilon;
  gen.extend(r, x_max);
  return r;
}

inline Realization sample_realization(const EnvParams &params, ModelKind model,
                                      std::uint64_t seed) {
  return sample_realization(params, model, 0.0, kDefaultTanMin, kDefaultEpsilon, seed);
}

// Argmax of the rooftop tangent seen from `observer`; nearest building wins
// ties. Buildings not taller than the observer never block.
inline BlockageResult blockage_angle(const Realization &r, Observer observer = {}) {
  if (r.empty()) {
    throw empty_realization_error("blockage_angle: empty realization");
  }
  BlockageResult out;
  double best = 0.0;
  for (std::size_t i = 0; i < r.buildings.size(); ++i) {
    const auto &b = r.buildings[i];
    detail::require_domain(b.x > observer.x, "blockage_angle: building behind observer");
    if (b.h <= observer.h) {
      continue;
    }
    const double tangent = (b.h - observer.h) / (b.x - observer.x);
    if (tangent > best) {
      best = tangent;
      out.index_k = i + 1;
      out.x_plus = b.x;
      out.h_plus = b.h;
    }
  }
  out.tan_theta = best;
  out.theta = std::atan(best);
  if (r.t_min > 0.0) {
    out.truncation_warning = !out.has_blocker() || best <= 1.01 * r.t_min;
  }
  return out;
}

// Reflection x -> -x. Order (nearest first) is preserved.
inline Realization mirror_realization(const Realization &r) {
  Realization out = r;
  for (auto &b : out.buildings) {
    b.x = -b.x;
  }
  out.x_max = -r.x_max;
  return out;
}

// CSV layout: one comment line with the sampling metadata, then a header
// "index,x,h" and one row per building (index is 1-based).
inline void write_csv(std::ostream &os, const Realization &r) {
  std::ostringstream meta;
  meta.precision(17);
  meta << "# x_max=" << r.x_max << " seed=" << r.seed << " t_min=" << r.t_min
       << " epsilon=" << r.epsilon << '\n';
  os << meta.str() << "index,x,h\n";
  char buf[64];
  for (std::size_t i = 0; i < r.buildings.size(); ++i) {
    os << (i + 1);
    for (double v : {r.buildings[i].x, r.buildings[i].h}) {
      auto res = std::to_chars(buf, buf + sizeof(buf), v);
      os << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    os << '\n';
  }
}

inline Realization read_csv(std::istream &is) {
  Realization r;
  std::string line;
  bool header_seen = false;
  auto parse = [](std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) {
      throw parameter_error("read_csv: bad number '" + std::string(s) + "'");
    }
    return v;
  };
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "x_max") r.x_max = parse(value);
        else if (key == "t_min") r.t_min = parse(value);
        else if (key == "epsilon") r.epsilon = parse(value);
        else if (key == "seed") r.seed = std::stoull(value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "index,x,h") {
        throw parameter_error("read_csv: expected header 'index,x,h'");
      }
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw parameter_error("read_csv: malformed row '" + line + "'");
    }
    const std::string_view sv(line);
    r.buildings.push_back({parse(sv.substr(c1 + 1, c2 - c1 - 1)), parse(sv.substr(c2 + 1))});
  }
  return r;
}

} // namespace skyline

#endif // SKYLINE_PROCESS_HPP
