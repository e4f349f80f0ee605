#ifndef SKYLINE_MONTECARLO_HPP
#define SKYLINE_MONTECARLO_HPP

#include "skyline/analytic.hpp"
#include "skyline/error.hpp"
#include "skyline/process.hpp"
#include "skyline/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

// One Monte-Carlo replication: the user's blockage angle and, on the same
// skyline, the angles seen by RISs on the blocking buildings.
namespace skyline::mc {

struct ObserveOptions {
  double observer_h = 0.0;
  // Tangent below which the direct maximum is not certified.
  double t_min = kDefaultTanMin;
  double epsilon = kDefaultEpsilon;
  bool transmissive = false;
  bool reflective = false;
  // Tangent below which RIS maxima are not certified.
  double ris_t_floor = 1e-4;
  // Direct window end; 0 derives it from t_min and epsilon.
  double window = 0.0;
};

struct Observation {
  BlockageResult direct;
  // Transmissive: tangent of the best rooftop beyond the blocker, seen from
  // the blocker's roof.
  double tan_trans = 0.0;
  // Reflective: blocker of the mirrored (negative) half-line, x_plus < 0,
  // and the best positive-side rooftop tangent seen from its roof.
  BlockageResult negative;
  double tan_refl = 0.0;
  std::size_t buildings = 0;
};

// P[tan theta <= t] = q quantile of the analytic law; DM by bisection.
inline double tan_quantile(const EnvParams &p, ModelKind model, double observer_h, double q) {
  skyline::detail::require_domain(q > 0.0 && q < 1.0, "tan_quantile: q in (0, 1)");
  if (model != ModelKind::DM) {
    const double s = analytic::detail::frechet_scale(p, model) * std::exp(-p.mu() * observer_h);
    skyline::detail::require_domain(observer_h == 0.0 || model == ModelKind::MM,
                                    "tan_quantile: elevated observer needs M/M");
    return s / -std::log(q);
  }
  skyline::detail::require_domain(observer_h == 0.0, "tan_quantile: elevated observer needs M/M");
  double lo = 0.0;
  double hi = p.rho();
  while (analytic::dm_cdf_tan_theta(p, hi) < q) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 60 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (analytic::dm_cdf_tan_theta(p, mid) < q ? lo : hi) = mid;
  }
  return lo > 0.0 ? lo : 0.5 * hi;
}

// Window threshold for Monte-Carlo use: the analytic 1e-6 quantile of
// tan theta, so uncertified replications carry at most 1e-6 probability.
inline double auto_t_min(const EnvParams &p, ModelKind model, double observer_h = 0.0) {
  return tan_quantile(p, model, observer_h, 1e-6);
}

namespace detail {

// Max of (h_i - view.h) / (x_i - view.x) over buildings [first, end) that
// rise above the viewpoint; 0 if none does.
inline double best_tangent(const Realization &r, std::size_t first, Observer view) {
  double best = 0.0;
  for (std::size_t i = first; i < r.buildings.size(); ++i) {
    const auto &b = r.buildings[i];
    if (b.h > view.h && b.x > view.x) {
      best = std::max(best, (b.h - view.h) / (b.x - view.x));
    }
  }
  return best;
}

// Grows the window until no building beyond it can beat the current best
// tangent (or `floor`) from `view`, up to probability epsilon. The result
// is exact unless the true maximum lies below `floor`.
inline double certified_best(SkylineGenerator &gen, Realization &r, std::size_t first,
                             Observer view, double floor, double epsilon) {
  double best = best_tangent(r, first, view);
  for (;;) {
    const double need =
        truncation_distance(gen.params(), gen.model(), view, std::max(best, floor), epsilon);
    if (need <= r.x_max) {
      return best;
    }
    // Grow geometrically: a taller rooftop found early shrinks `need`.
    const double doubled = view.x + 2.0 * std::max(r.x_max - view.x, 1.0 / gen.params().lambda());
    const std::size_t old_size = r.buildings.size();
    gen.extend(r, std::min(need, doubled));
    best = std::max(best, best_tangent(r, std::max(first, old_size), view));
  }
}

} // namespace detail

// Options with the direct window precomputed, for repeated replications.
inline ObserveOptions with_window(const EnvParams &p, ModelKind model, ObserveOptions opt) {
  opt.window = truncation_distance(p, model, {0.0, opt.observer_h}, opt.t_min, opt.epsilon);
  return opt;
}

inline Observation observe(const EnvParams &p, ModelKind model, std::uint64_t seed,
                           const ObserveOptions &opt) {
  Observation out;
  const Observer user{0.0, opt.observer_h};
  const double x_max =
      opt.window > 0.0 ? opt.window : truncation_distance(p, model, user, opt.t_min, opt.epsilon);

  SkylineGenerator gen(p, model, seed);
  Realization r = gen.start();
  r.t_min = opt.t_min;
  r.epsilon = opt.epsilon;
  // Grow from a short window; x_max is the worst case and is rarely needed.
  gen.extend(r, std::min(x_max, 4.0 / p.lambda()));
  if (r.x_max < x_max) {
    detail::certified_best(gen, r, 0, user, opt.t_min, opt.epsilon);
  }
  if (!r.empty()) {
    out.direct = blockage_angle(r, user);
  } else {
    out.direct.truncation_warning = true;
  }

  if (opt.transmissive && out.direct.has_blocker()) {
    const Observer roof{out.direct.x_plus, out.direct.h_plus};
    out.tan_trans =
        detail::certified_best(gen, r, out.direct.index_k, roof, opt.ris_t_floor, opt.epsilon);
  }

  if (opt.reflective) {
    // Independent skyline on the negative half-line, sampled in positive
    // coordinates and mirrored.
    SkylineGenerator neg_gen(p, model, splitmix64(seed ^ 0x5EEDF00DCAFEULL));
    Realization neg = neg_gen.start();
    neg.t_min = opt.t_min;
    neg.epsilon = opt.epsilon;
    neg_gen.extend(neg, std::min(x_max, 4.0 / p.lambda()));
    if (neg.x_max < x_max) {
      detail::certified_best(neg_gen, neg, 0, user, opt.t_min, opt.epsilon);
    }
    if (!neg.empty()) {
      out.negative = blockage_angle(neg, user);
      out.negative.x_plus = -out.negative.x_plus;
    }
    if (out.negative.has_blocker()) {
      const Observer roof{out.negative.x_plus, out.negative.h_plus};
      out.tan_refl = detail::certified_best(gen, r, 0, roof, opt.ris_t_floor, opt.epsilon);
    }
    out.buildings += neg.size();
  }
  out.buildings += r.size();
  return out;
}

} // namespace skyline::mc

#endif // SKYLINE_MONTECARLO_HPP
