#ifndef SKYLINE_VALIDATE_HPP
#define SKYLINE_VALIDATE_HPP

#include "skyline/analytic.hpp"
#include "skyline/coverage.hpp"
#include "skyline/montecarlo.hpp"
#include "skyline/parallel.hpp"
#include "skyline/ris.hpp"
#include "skyline/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

// Monte-Carlo checks of the closed forms against simulated skylines.
namespace skyline::validate {

inline constexpr double kDefaultAlpha = 0.01;

struct ConditioningBin {
  double x_lo, x_hi, h_lo, h_hi;

  bool contains(double x, double h) const {
    return x >= x_lo && x <= x_hi && h >= h_lo && h <= h_hi;
  }
};

struct ValidationReport {
  std::string target;
  std::string test; // "ks", "chi2" or "z"
  std::size_t n = 0; // samples entering the statistic
  std::size_t replications = 0;
  double statistic = 0.0;
  double p_value = 0.0;
  double alpha = kDefaultAlpha;
  bool pass = false;
  std::optional<double> mc_estimate;
  std::optional<double> std_error;
  std::optional<double> expected;
  std::uint64_t seed = 0;
  std::optional<ConditioningBin> bin;
  std::vector<std::pair<std::string, double>> extras;

  void decide() { pass = p_value > alpha; }
};

inline nlohmann::ordered_json to_json(const ValidationReport &r) {
  nlohmann::ordered_json j;
  j["target"] = r.target;
  j["test"] = r.test;
  j["n"] = r.n;
  j["replications"] = r.replications;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["alpha"] = r.alpha;
  j["pass"] = r.pass;
  if (r.mc_estimate) j["mc_estimate"] = *r.mc_estimate;
  if (r.std_error) j["std_error"] = *r.std_error;
  if (r.expected) j["expected"] = *r.expected;
  j["seed"] = r.seed;
  if (r.bin) {
    j["bin"] = {{"x_lo", r.bin->x_lo}, {"x_hi", r.bin->x_hi}, {"h_lo", r.bin->h_lo},
                {"h_hi", r.bin->h_hi}};
  }
  for (const auto &[k, v] : r.extras) j["extras"][k] = v;
  return j;
}

inline void write_json_line(std::ostream &os, const ValidationReport &r) {
  os << to_json(r).dump() << '\n';
}

// Fixed-width summary line: PASS/FAIL, target, statistic, p-value.
inline std::string summary_line(const ValidationReport &r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-4s  %-44s %-4s stat=%-11.5g p=%-10.4g n=%zu",
                r.pass ? "PASS" : "FAIL", r.target.c_str(), r.test.c_str(), r.statistic,
                r.p_value, r.n);
  std::string out(buf);
  if (r.mc_estimate && r.expected) {
    std::snprintf(buf, sizeof(buf), "  mc=%.6g+-%.2g expected=%.6g", *r.mc_estimate,
                  r.std_error.value_or(0.0), *r.expected);
    out += buf;
  }
  return out;
}

// Square conditioning box around (x, h) with relative half-width
// 2 n^{-1/5}, capped at 0.5.
inline ConditioningBin shrinking_bin(double x, double h, std::size_t n) {
  const double delta = std::min(0.5, 2.0 * std::pow(static_cast<double>(n), -0.2));
  const double ax = std::abs(x);
  return {ax * (1.0 - delta), ax * (1.0 + delta), h * (1.0 - delta), h * (1.0 + delta)};
}

// ---------------------------------------------------------------------------
// Blockage angle laws.

struct AngleTarget {
  ModelKind model = ModelKind::MM;
  double observer_h = 0.0; // > 0 only with MM (elevated observer)

  std::string name(const EnvParams &p) const {
    std::string s(to_string(model));
    if (model == ModelKind::WEIBULL) s += "(k=" + std::to_string(p.weibull_shape()) + ")";
    if (observer_h > 0.0) s = "elevated(h=" + std::to_string(observer_h) + ")";
    return s;
  }
};

inline double analytic_cdf_theta(const EnvParams &p, const AngleTarget &target, double phi) {
  if (phi >= analytic::kHalfPi) return 1.0;
  if (target.observer_h > 0.0) {
    return analytic::cdf_theta_xh(p, target.observer_h, phi);
  }
  return analytic::cdf_theta(p, target.model, phi);
}

// Simulated blockage angles (radians) of n independent skylines.
inline std::vector<double> simulate_theta(const EnvParams &p, const AngleTarget &target,
                                          std::size_t n, std::uint64_t seed,
                                          unsigned workers = 0) {
  mc::ObserveOptions opt;
  opt.observer_h = target.observer_h;
  opt.t_min = mc::auto_t_min(p, target.model, target.observer_h);
  opt = mc::with_window(p, target.model, opt);
  return map_replications<double>(
      n,
      [&](std::size_t i) {
        return mc::observe(p, target.model, derive_seed(seed, i), opt).direct.theta;
      },
      workers);
}

inline ValidationReport validate_angle(const EnvParams &p, const AngleTarget &target,
                                       std::size_t n, std::uint64_t seed,
                                       double alpha = kDefaultAlpha, unsigned workers = 0) {
  const auto theta = simulate_theta(p, target, n, seed, workers);
  const auto ks =
      stats::ks_test(theta, [&](double phi) { return analytic_cdf_theta(p, target, phi); });
  ValidationReport r;
  r.target = "theta:" + target.name(p);
  r.test = "ks";
  r.n = theta.size();
  r.replications = n;
  r.statistic = ks.statistic;
  r.p_value = ks.p_value;
  r.alpha = alpha;
  r.seed = seed;
  const auto m = stats::mean_and_stderr(theta);
  r.mc_estimate = m.mean;
  r.std_error = m.std_error;
  if (target.model != ModelKind::DM || target.observer_h == 0.0) {
    r.expected = analytic::mean_theta(p, target.model, target.observer_h);
  }
  r.extras = {{"lambda", p.lambda()}, {"mu", p.mu()}, {"shape", p.weibull_shape()}};
  r.decide();
  return r;
}

// Runs `check(seed)` for every seed; the combined verdict passes when at
// least `required` runs pass.
template <typename Check>
std::pair<bool, std::vector<ValidationReport>>
majority_vote(Check &&check, std::span<const std::uint64_t> seeds, std::size_t required) {
  std::vector<ValidationReport> reports;
  std::size_t passed = 0;
  for (auto s : seeds) {
    reports.push_back(check(s));
    passed += reports.back().pass ? 1 : 0;
  }
  return {passed >= required, std::move(reports)};
}

inline constexpr std::array<std::uint64_t, 3> kAcceptanceSeeds{7, 1234, 98765};

// ---------------------------------------------------------------------------
// Blocking building.

struct BlockerSample {
  double x = 0.0;
  double h = 0.0;
  std::size_t index = 0;
  double tan_trans = 0.0;
};

inline std::vector<BlockerSample> simulate_blockers(const EnvParams &p, std::size_t n,
                                                    std::uint64_t seed, double t_min,
                                                    bool transmissive, double ris_t_floor,
                                                    unsigned workers = 0) {
  mc::ObserveOptions opt;
  opt.t_min = t_min;
  opt.transmissive = transmissive;
  opt.ris_t_floor = ris_t_floor;
  return map_replications<BlockerSample>(
      n,
      [&](std::size_t i) {
        const auto o = mc::observe(p, ModelKind::MM, derive_seed(seed, i), opt);
        return BlockerSample{o.direct.x_plus, o.direct.h_plus, o.direct.index_k, o.tan_trans};
      },
      workers);
}

namespace detail {

// q-quantile of Gamma(2, 1): solves 1 - (1 + u) e^{-u} = q.
inline double gamma2_quantile(double q) {
  double lo = 0.0, hi = 1.0;
  auto cdf = [](double u) { return 1.0 - (1.0 + u) * std::exp(-u); };
  while (cdf(hi) < q) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

template <typename Edges> std::size_t cell_of(double v, const Edges &edges) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) -
                                  edges.begin());
}

} // namespace detail

// 2-D chi-square of (X+, H+) against j(x, h) on equal-probability cells,
// plus 3-standard-error checks of the means (2/lambda, 2/mu). Cells are
// products of quantile bins in mu H (Gamma(2)) and lambda X / (mu H)
// (Exp(1)), which are independent under j.
inline ValidationReport validate_joint(const EnvParams &p, std::size_t n, std::uint64_t seed,
                                       double alpha = kDefaultAlpha, int cells = 20,
                                       unsigned workers = 0) {
  const int nh = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(cells))));
  const int ns = std::max(2, cells / nh);
  std::vector<double> h_edges, s_edges;
  for (int i = 1; i < nh; ++i) h_edges.push_back(detail::gamma2_quantile(double(i) / nh));
  for (int i = 1; i < ns; ++i) s_edges.push_back(-std::log1p(-double(i) / ns));

  const auto samples =
      simulate_blockers(p, n, seed, mc::auto_t_min(p, ModelKind::MM), false, 1e-4, workers);
  std::vector<double> observed(static_cast<std::size_t>(nh * ns), 0.0);
  std::vector<double> xs, hs;
  xs.reserve(n);
  hs.reserve(n);
  for (const auto &s : samples) {
    if (s.index == 0) continue;
    const double u = p.mu() * s.h;
    const double v = p.lambda() * s.x / (p.mu() * s.h);
    observed[detail::cell_of(u, h_edges) * ns + detail::cell_of(v, s_edges)] += 1.0;
    xs.push_back(s.x);
    hs.push_back(s.h);
  }
  const std::vector<double> probs(observed.size(), 1.0 / static_cast<double>(observed.size()));
  const auto chi = stats::chi_square_test(observed, probs);
  const auto mx = stats::mean_and_stderr(xs);
  const auto mh = stats::mean_and_stderr(hs);
  const auto means = analytic::blocking_means(p);

  ValidationReport r;
  r.target = "joint(X+,H+)";
  r.test = "chi2";
  r.n = xs.size();
  r.replications = n;
  r.statistic = chi.statistic;
  r.p_value = chi.p_value;
  r.alpha = alpha;
  r.seed = seed;
  r.mc_estimate = mx.mean;
  r.std_error = mx.std_error;
  r.expected = means.distance;
  const double zx = (mx.mean - means.distance) / mx.std_error;
  const double zh = (mh.mean - means.height) / mh.std_error;
  r.extras = {{"dof", chi.dof},         {"mean_x", mx.mean},     {"mean_x_stderr", mx.std_error},
              {"mean_h", mh.mean},      {"mean_h_stderr", mh.std_error},
              {"z_mean_x", zx},         {"z_mean_h", zh}};
  r.pass = chi.p_value > alpha && std::abs(zx) <= 3.0 && std::abs(zh) <= 3.0;
  return r;
}

// Index of the blocking building among realizations whose blocker falls in
// a small box around (x, h), against the shifted Poisson law. Expected cell
// probabilities average the pmf over the conditioned samples' own (x, h).
inline ValidationReport validate_blocking_index(const EnvParams &p, double x, double h,
                                                std::size_t n, std::uint64_t seed,
                                                double alpha = kDefaultAlpha,
                                                unsigned workers = 0) {
  const auto bin = shrinking_bin(x, h, n);
  const double t_min = 0.9 * bin.h_lo / bin.x_hi;
  const auto samples = simulate_blockers(p, n, seed, t_min, false, 1e-4, workers);
  std::vector<const BlockerSample *> hits;
  for (const auto &s : samples) {
    if (s.index != 0 && bin.contains(s.x, s.h)) hits.push_back(&s);
  }
  // Cells 1..K-1 and a lumped tail K+; K grows while the tail expects >= 5.
  const double nhits = static_cast<double>(hits.size());
  auto mixture_pmf = [&](long i) {
    double acc = 0.0;
    for (const auto *s : hits) acc += analytic::blocking_index_pmf(p, s->x, s->h, i);
    return nhits > 0 ? acc / nhits : 0.0;
  };
  std::vector<double> probs;
  double cum = 0.0;
  long K = 1;
  for (;; ++K) {
    const double pk = mixture_pmf(K);
    if (nhits * (1.0 - cum - pk) < 5.0 || K > 200) break;
    probs.push_back(pk);
    cum += pk;
  }
  probs.push_back(1.0 - cum);
  std::vector<double> observed(probs.size(), 0.0);
  double mean_index = 0.0, expected_index = 0.0;
  for (const auto *s : hits) {
    const std::size_t cell = std::min<std::size_t>(s->index, probs.size()) - 1;
    observed[cell] += 1.0;
    mean_index += static_cast<double>(s->index);
    expected_index += 1.0 + analytic::blocking_index_mean(p, s->x, s->h);
  }
  ValidationReport r;
  r.target = "blocking_index";
  r.test = "chi2";
  r.n = hits.size();
  r.replications = n;
  r.alpha = alpha;
  r.seed = seed;
  r.bin = bin;
  if (hits.size() >= 10 && probs.size() >= 2) {
    const auto chi = stats::chi_square_test(observed, probs);
    r.statistic = chi.statistic;
    r.p_value = chi.p_value;
    r.extras.emplace_back("dof", chi.dof);
  }
  if (nhits > 0) {
    r.mc_estimate = mean_index / nhits;
    r.expected = expected_index / nhits;
  }
  r.decide();
  return r;
}

// ---------------------------------------------------------------------------
// RIS conditional laws.

// Among n skylines, those whose RIS-carrying blocker lands in a box around
// cond's (x, h) are mapped through their own conditional CDF; the values
// must be Uniform(0, 1) (KS). The transmissive second moment is compared
// with the mixture of closed-form moments as an extra.
inline ValidationReport validate_ris(const EnvParams &p, const ris::RisCondition &cond,
                                     std::size_t n, std::uint64_t seed,
                                     double alpha = kDefaultAlpha, unsigned workers = 0) {
  ris::RisCondition::validated(cond);
  const bool trans = cond.mode == ris::RisMode::TRANSMISSIVE;
  const auto bin = shrinking_bin(cond.x, cond.h, n);
  struct Hit {
    bool in_bin = false;
    double x = 0.0, h = 0.0, t = 0.0;
  };
  mc::ObserveOptions opt;
  opt.t_min = 0.9 * bin.h_lo / bin.x_hi;
  opt.transmissive = trans;
  opt.reflective = !trans;
  opt.ris_t_floor = 1e-6;
  const auto hits = map_replications<Hit>(
      n,
      [&](std::size_t i) {
        const auto o = mc::observe(p, ModelKind::MM, derive_seed(seed, i), opt);
        const auto &b = trans ? o.direct : o.negative;
        Hit hit;
        if (b.has_blocker() && bin.contains(std::abs(b.x_plus), b.h_plus)) {
          hit = {true, b.x_plus, b.h_plus, trans ? o.tan_trans : o.tan_refl};
        }
        return hit;
      },
      workers);
  std::vector<double> pit;
  double m2 = 0.0, m2_expected = 0.0, m2_sq = 0.0;
  for (const auto &hit : hits) {
    if (!hit.in_bin) continue;
    const auto c = ris::RisCondition::validated({cond.mode, hit.x, hit.h});
    pit.push_back(trans ? ris::trans_cdf_tan(p, c, hit.t) : ris::refl_cdf_tan(p, c, hit.t));
    if (trans) {
      m2 += hit.t * hit.t;
      m2_sq += hit.t * hit.t * hit.t * hit.t;
      m2_expected += ris::trans_moment(p, c, 2);
    }
  }
  ValidationReport r;
  r.target = std::string(ris::to_string(cond.mode)) + "_cdf";
  r.test = "ks";
  r.n = pit.size();
  r.replications = n;
  r.alpha = alpha;
  r.seed = seed;
  r.bin = bin;
  if (pit.size() >= 10) {
    const auto ks = stats::ks_test(pit, [](double u) { return std::clamp(u, 0.0, 1.0); });
    r.statistic = ks.statistic;
    r.p_value = ks.p_value;
  }
  if (trans && !pit.empty()) {
    const double k = static_cast<double>(pit.size());
    const double mean = m2 / k;
    const double se = std::sqrt(std::max(m2_sq / k - mean * mean, 0.0) / k);
    r.mc_estimate = mean;
    r.std_error = se;
    r.expected = m2_expected / k;
    r.extras.emplace_back("z_second_moment", (mean - m2_expected / k) / se);
  }
  r.decide();
  return r;
}

// ---------------------------------------------------------------------------
// Connectivity through transmissive RISs.

struct TauOptions {
  // Conditioning point (x, h) of the blocker; unset = deconditioned tau_H.
  std::optional<std::pair<double, double>> blocker;
  // Cap on aerial redraws per skyline in the deconditioned estimator.
  std::size_t max_redraws = 1000000;
};

// Aerial nodes at altitude h + H are a PPP of intensity nu along the
// horizontal axis; the user sees those in [0, |l|] directly and those in
// [0, |L|] through the RIS. Only the first aerial point matters for both
// events, and it is simulated directly.
//
// Conditional form (blocker given): among skylines with the blocker in a
// box around (x, h), the ratio #(no node in l, node in L) / #(no node in l)
// is compared with the same ratio of closed-form expectations over the
// conditioned samples. Deconditioned form: per skyline the aerial process
// is redrawn until no node falls in l, which yields the j-average of
// tau_H(x, h), compared with the dilogarithm closed form.
inline ValidationReport validate_tau(const coverage::CoverageScenario &sc, std::size_t n,
                                     std::uint64_t seed, const TauOptions &options = {},
                                     double alpha = kDefaultAlpha, unsigned workers = 0) {
  const EnvParams &p = sc.env();
  const double H = sc.H();
  const double nu = sc.nu();
  std::optional<ConditioningBin> bin;
  mc::ObserveOptions opt;
  opt.transmissive = true;
  // Below this tangent |L| exceeds H / floor, which the first aerial node
  // overshoots with probability e^{-50}.
  opt.ris_t_floor = sc.h_nu() / 50.0;
  if (options.blocker) {
    bin = shrinking_bin(options.blocker->first, options.blocker->second, n);
    opt.t_min = 0.9 * bin->h_lo / bin->x_hi;
  } else {
    opt.t_min = mc::auto_t_min(p, ModelKind::MM);
  }
  struct Outcome {
    bool used = false;
    bool blind = false;     // no aerial node in l
    bool rescued = false;   // ... and one in L
    double weight = 0.0;    // closed-form P[no node in l]
    double weighted_tau = 0.0;
    std::size_t redraws = 0;
    bool censored = false;
  };
  auto outcomes = map_replications<Outcome>(
      n,
      [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, i);
        const auto o = mc::observe(p, ModelKind::MM, s, opt);
        Outcome out;
        if (!o.direct.has_blocker()) return out;
        const double x = o.direct.x_plus, h = o.direct.h_plus;
        if (bin && !bin->contains(x, h)) return out;
        out.used = true;
        const double l = coverage::visible_length(x, h, H);
        const double L = o.tan_trans > 0.0 ? coverage::visible_length_with_ris(x, h, H, o.tan_trans)
                                           : INFINITY;
        Rng aerial(derive_seed(seed, i, 1));
        if (bin) {
          const double first = aerial.exponential(nu);
          out.blind = first > l;
          out.rescued = out.blind && first <= L;
          out.weight = std::exp(-nu * l);
          out.weighted_tau = out.weight * coverage::tau_conditional(sc, x, h);
          return out;
        }
        for (;;) {
          const double first = aerial.exponential(nu);
          ++out.redraws;
          if (first > l) {
            out.blind = true;
            out.rescued = first <= L;
            break;
          }
          if (out.redraws >= options.max_redraws) {
            out.censored = true;
            out.used = false;
            break;
          }
        }
        return out;
      },
      workers);

  ValidationReport r;
  r.test = "z";
  r.replications = n;
  r.alpha = alpha;
  r.seed = seed;
  r.bin = bin;
  std::size_t censored = 0;
  if (bin) {
    r.target = "tau_conditional";
    double blind = 0, rescued = 0, w = 0, wt = 0;
    std::size_t used = 0;
    for (const auto &o : outcomes) {
      if (!o.used) continue;
      ++used;
      blind += o.blind;
      rescued += o.rescued;
      w += o.weight;
      wt += o.weighted_tau;
    }
    r.n = static_cast<std::size_t>(blind);
    if (blind > 0) {
      const double est = rescued / blind;
      r.mc_estimate = est;
      r.std_error = std::sqrt(est * (1.0 - est) / blind);
      r.expected = wt / w;
      r.extras = {{"conditioned_skylines", static_cast<double>(used)},
                  {"tau_at_center", coverage::tau_conditional(sc, options.blocker->first,
                                                              options.blocker->second)}};
    }
  } else {
    r.target = "tau_unconditional";
    double rescued = 0;
    std::size_t used = 0;
    double redraws = 0;
    for (const auto &o : outcomes) {
      censored += o.censored;
      if (!o.used) continue;
      ++used;
      rescued += o.rescued;
      redraws += static_cast<double>(o.redraws);
    }
    r.n = used;
    if (used > 0) {
      const double est = rescued / static_cast<double>(used);
      r.mc_estimate = est;
      r.std_error = std::sqrt(est * (1.0 - est) / static_cast<double>(used));
      r.expected = coverage::tau_unconditional(sc);
      r.extras = {{"censored", static_cast<double>(censored)},
                  {"mean_redraws", redraws / static_cast<double>(used)}};
    }
  }
  if (r.mc_estimate && r.std_error && *r.std_error > 0.0) {
    r.statistic = (*r.mc_estimate - *r.expected) / *r.std_error;
    r.p_value = stats::normal_two_sided_p(r.statistic);
  }
  r.decide();
  return r;
}

} // namespace skyline::validate

#endif // SKYLINE_VALIDATE_HPP
