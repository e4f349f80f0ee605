#include "skyline/montecarlo.hpp"
#include "skyline/parallel.hpp"
#include "skyline/process.hpp"
#include "skyline/rng.hpp"
#include "skyline/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace skyline;

TEST(EnvParams, ValidatesAndDerivesRho) {
  const EnvParams p(0.012, 0.02);
  EXPECT_EQ(p.rho(), 0.012 / 0.02);
  EXPECT_THROW(EnvParams(0.0, 1.0), parameter_error);
  EXPECT_THROW(EnvParams(1.0, -1.0), parameter_error);
  EXPECT_THROW(EnvParams(1.0, 1.0, 0.0), parameter_error);
  EXPECT_THROW(EnvParams(std::nan(""), 1.0), parameter_error);
  EXPECT_EQ(EnvParams::from_rho(0.35).lambda(), 0.35);
}

TEST(ModelKind, ParsesNames) {
  EXPECT_EQ(parse_model("mm"), ModelKind::MM);
  EXPECT_EQ(parse_model("weibull"), ModelKind::WEIBULL);
  EXPECT_FALSE(parse_model("xx").has_value());
  for (auto m : {ModelKind::MM, ModelKind::MD, ModelKind::DM, ModelKind::WEIBULL}) {
    EXPECT_EQ(parse_model(to_string(m)), m);
  }
}

TEST(SampleRealization, DeterministicPerSeed) {
  const EnvParams p(1.0, 1.0);
  for (auto m : {ModelKind::MM, ModelKind::MD, ModelKind::DM, ModelKind::WEIBULL}) {
    const auto a = sample_realization(p.with_shape(2.0), m, 0.0, 0.01, 1e-8, 42);
    const auto b = sample_realization(p.with_shape(2.0), m, 0.0, 0.01, 1e-8, 42);
    const auto c = sample_realization(p.with_shape(2.0), m, 0.0, 0.01, 1e-8, 43);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
  }
}

TEST(SampleRealization, OrderedAndCoversTailWindow) {
  const EnvParams p(1.0, 1.0);
  const auto r = sample_realization(p, ModelKind::MM, 0.0, 0.01, 1e-8, 42);
  ASSERT_FALSE(r.empty());
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LT(r.buildings[i - 1].x, r.buildings[i].x);
  EXPECT_GT(r.buildings.front().x, 0.0);
  EXPECT_LE(r.buildings.back().x, r.x_max);
  EXPECT_GE(r.x_max, -std::log(1e-8 * 0.01) / 0.01 - 1e-6);
}

TEST(SampleRealization, DeterministicGridSpacing) {
  const EnvParams p(2.0, 1.0);
  const auto r = sample_realization(p, ModelKind::DM, 0.0, 0.01, 1e-8, 5);
  ASSERT_GT(r.size(), 10u);
  EXPECT_GE(r.buildings[0].x, 0.0);
  EXPECT_LT(r.buildings[0].x, 0.5);
  for (std::size_t i = 1; i < r.size(); ++i) {
    EXPECT_NEAR(r.buildings[i].x - r.buildings[i - 1].x, 0.5, 1e-12 * r.buildings[i].x);
  }
}

TEST(SampleRealization, ConstantHeights) {
  const EnvParams p(0.012, 0.02);
  const auto r = sample_realization(p, ModelKind::MD, 0.0, 0.01, 1e-8, 5);
  ASSERT_FALSE(r.empty());
  for (const auto &b : r.buildings) EXPECT_DOUBLE_EQ(b.h, 50.0);
}

TEST(SampleRealization, WindowCapThrows) {
  EXPECT_THROW(sample_realization(EnvParams(1.0, 1.0), ModelKind::MM, 0.0, 1e-12, 1e-8, 1),
               truncation_error);
  EXPECT_THROW(sample_realization(EnvParams(1.0, 1.0), ModelKind::MM, 0.0, 0.01, 0.0, 1),
               domain_error);
}

TEST(TruncationDistance, TailBoundHoldsEmpirically) {
  // With epsilon = 0.05 the MM bound is exact, so about 5% of skylines
  // carry a building beyond x_max that beats t_min.
  const EnvParams p(1.0, 1.0);
  const double t = 0.05, eps = 0.05;
  const double x_max = truncation_distance(p, ModelKind::MM, {}, t, eps);
  const int n = 20000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    SkylineGenerator gen(p, ModelKind::MM, derive_seed(11, i));
    auto r = gen.start();
    gen.extend(r, x_max);
    const auto inside = r.size();
    gen.extend(r, x_max + 2000.0);
    bool beyond = false;
    for (std::size_t k = inside; k < r.size(); ++k) beyond |= r.buildings[k].h / r.buildings[k].x > t;
    hits += beyond;
  }
  const double sd = std::sqrt(eps * (1 - eps) / n);
  EXPECT_NEAR(double(hits) / n, eps, 4 * sd);
}

TEST(TruncationDistance, VariantsMeetEpsilon) {
  const EnvParams p(0.5, 2.0, 0.5);
  for (auto m : {ModelKind::MM, ModelKind::MD, ModelKind::DM, ModelKind::WEIBULL}) {
    const Observer o{0.0, 0.3};
    const double x = truncation_distance(p, m, o, 0.02, 1e-8);
    EXPECT_LT(tail_probability(p, m, o, 0.02, x), 1e-8) << to_string(m);
    if (m != ModelKind::MD) EXPECT_GE(tail_probability(p, m, o, 0.02, 0.9 * x), 1e-8);
  }
}

TEST(BlockageAngle, HandBuiltCases) {
  Realization r;
  r.buildings = {{1.0, 1.0}};
  auto b = blockage_angle(r);
  EXPECT_DOUBLE_EQ(b.theta, std::atan(1.0));
  EXPECT_EQ(b.index_k, 1u);

  r.buildings = {{1.0, 1.0}, {2.0, 3.0}};
  b = blockage_angle(r);
  EXPECT_DOUBLE_EQ(b.theta, std::atan(1.5));
  EXPECT_EQ(b.index_k, 2u);
  EXPECT_EQ(b.x_plus, 2.0);
  EXPECT_EQ(b.h_plus, 3.0);

  r.buildings = {{1.0, 1.0}};
  b = blockage_angle(r, {0.0, 0.5});
  EXPECT_DOUBLE_EQ(b.theta, std::atan(0.5));

  b = blockage_angle(r, {0.0, 2.0});
  EXPECT_EQ(b.theta, 0.0);
  EXPECT_EQ(b.index_k, 0u);
  EXPECT_FALSE(b.has_blocker());
}

TEST(BlockageAngle, Errors) {
  Realization r;
  EXPECT_THROW(blockage_angle(r), empty_realization_error);
  r.buildings = {{1.0, 1.0}};
  EXPECT_THROW(blockage_angle(r, {2.0, 0.0}), domain_error);
}

TEST(BlockageAngle, MaxDominatesEveryBuilding) {
  const EnvParams p(1.0, 1.0);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = sample_realization(p, ModelKind::MM, 0.4, 0.01, 1e-8, s);
    const auto b = blockage_angle(r, {0.0, 0.4});
    for (const auto &bd : r.buildings) EXPECT_LE((bd.h - 0.4) / bd.x, b.tan_theta);
    if (b.has_blocker()) {
      EXPECT_NEAR(std::tan(b.theta), (b.h_plus - 0.4) / b.x_plus, 1e-12);
    }
  }
}

TEST(BlockageAngle, InvariantUnderLowerAppends) {
  const EnvParams p(1.0, 1.0);
  auto r = sample_realization(p, ModelKind::MM, 7);
  const auto before = blockage_angle(r);
  const double tail = r.x_max;
  for (int i = 1; i <= 20; ++i) {
    const double x = tail + i;
    r.buildings.push_back({x, 0.5 * before.tan_theta * x});
  }
  const auto after = blockage_angle(r);
  EXPECT_EQ(after.theta, before.theta);
  EXPECT_EQ(after.index_k, before.index_k);
}

TEST(MirrorRealization, ReflectsAndIsInvolution) {
  Realization r;
  r.buildings = {{1.0, 2.0}};
  r.x_max = 3.0;
  const auto m = mirror_realization(r);
  EXPECT_EQ(m.buildings.front(), (Building{-1.0, 2.0}));
  EXPECT_EQ(mirror_realization(m), r);
  const auto s = sample_realization(EnvParams(1.0, 1.0), ModelKind::MM, 3);
  EXPECT_EQ(mirror_realization(mirror_realization(s)), s);
}

TEST(MirrorRealization, NegativeBlockerHasSameLaw) {
  const EnvParams p(1.0, 1.0);
  mc::ObserveOptions opt;
  opt.t_min = mc::auto_t_min(p, ModelKind::MM);
  opt.reflective = true;
  const std::size_t n = 100000;
  std::vector<double> xp, hp, xn, hn;
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = mc::observe(p, ModelKind::MM, derive_seed(21, i), opt);
    xp.push_back(o.direct.x_plus);
    hp.push_back(o.direct.h_plus);
    xn.push_back(-o.negative.x_plus);
    hn.push_back(o.negative.h_plus);
  }
  EXPECT_GT(stats::ks_two_sample(xp, xn).p_value, 0.001);
  EXPECT_GT(stats::ks_two_sample(hp, hn).p_value, 0.001);
}

TEST(Csv, RoundTripIsExact) {
  const auto r = sample_realization(EnvParams(0.7, 1.3), ModelKind::MM, 0.0, 0.05, 1e-6, 99);
  std::stringstream ss;
  write_csv(ss, r);
  const auto back = read_csv(ss);
  EXPECT_EQ(back, r);
}

TEST(Csv, RejectsGarbage) {
  std::stringstream ss("index,x,h\n1,abc,2\n");
  EXPECT_THROW(read_csv(ss), parameter_error);
}

TEST(Poisson, CountsInWindowFollowPoisson) {
  // Counts in (0, 10] at lambda = 1 against Poisson(10), cells lumped at
  // both tails.
  const EnvParams p(1.0, 1.0);
  const int n = 10000;
  const int lo = 4, hi = 17;
  std::vector<double> obs(hi - lo + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    SkylineGenerator gen(p, ModelKind::MM, derive_seed(3, i));
    auto r = gen.start();
    gen.extend(r, 10.0);
    const int k = std::clamp(static_cast<int>(r.size()), lo, hi);
    obs[k - lo] += 1.0;
  }
  std::vector<double> probs(obs.size(), 0.0);
  double pk = std::exp(-10.0), cum = 0.0;
  for (int k = 0; k <= hi; ++k) {
    if (k > 0) pk *= 10.0 / k;
    if (k < hi) probs[std::max(k, lo) - lo] += pk, cum += pk;
  }
  probs.back() += 1.0 - cum;
  EXPECT_GT(stats::chi_square_test(obs, probs).p_value, 0.01);
}

TEST(Weibull, ShapeOneMatchesExponentialHeights) {
  const EnvParams mm(0.5, 1.0);
  const EnvParams wb(0.5, 1.0, 1.0);
  mc::ObserveOptions opt;
  opt.t_min = mc::auto_t_min(mm, ModelKind::MM);
  const std::size_t n = 100000;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = mc::observe(mm, ModelKind::MM, derive_seed(1, i), opt).direct.tan_theta;
    b[i] = mc::observe(wb, ModelKind::WEIBULL, derive_seed(2, i), opt).direct.tan_theta;
  }
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.01);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(7, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(derive_seed(7, 0, 0), derive_seed(7, 0, 1));
}

TEST(Rng, UniformOpenInterval) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, PoissonMean) {
  Rng rng(4);
  for (double m : {0.3, 4.0, 60.0}) {
    double s = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) s += static_cast<double>(rng.poisson(m));
    EXPECT_NEAR(s / n, m, 5 * std::sqrt(m / n));
  }
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
  const EnvParams p(1.0, 1.0);
  auto fn = [&](std::size_t i) {
    return mc::observe(p, ModelKind::MM, derive_seed(9, i), {}).direct.theta;
  };
  const auto one = map_replications<double>(2000, fn, 1);
  EXPECT_EQ(map_replications<double>(2000, fn, 3), one);
  EXPECT_EQ(map_replications<double>(2000, fn, 8), one);
}

TEST(Parallel, PropagatesExceptions) {
  auto fn = [](std::size_t i) -> int {
    if (i == 777) throw domain_error("boom");
    return static_cast<int>(i);
  };
  EXPECT_THROW(map_replications<int>(1000, fn, 4), domain_error);
}
