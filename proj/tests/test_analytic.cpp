#include "skyline/analytic.hpp"
#include "skyline/distribution.hpp"
#include "skyline/numerics/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

using namespace skyline;
using namespace skyline::analytic;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Random parameter draws shared by the property tests.
std::vector<EnvParams> random_params(int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> lr(-2.0, 1.0);
  std::uniform_real_distribution<double> kr(0.4, 3.0);
  std::vector<EnvParams> out;
  for (int i = 0; i < count; ++i) {
    out.emplace_back(std::pow(10.0, lr(g)), std::pow(10.0, lr(g)), kr(g));
  }
  return out;
}

std::vector<AngleDistribution> all_ground_and_elevated(const EnvParams &p) {
  return {AngleDistribution::ground(p, ModelKind::MM), AngleDistribution::ground(p, ModelKind::MD),
          AngleDistribution::ground(p, ModelKind::DM),
          AngleDistribution::ground(p, ModelKind::WEIBULL), AngleDistribution::elevated(p, 0.7)};
}

} // namespace

TEST(CdfTanTheta, FrechetValues) {
  const auto p = EnvParams::from_rho(1.0);
  EXPECT_NEAR(cdf_tan_theta(p, ModelKind::MM, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(cdf_tan_theta(p.with_shape(2.0), ModelKind::WEIBULL, 1.0),
              std::exp(-std::sqrt(std::numbers::pi) / 2.0), 1e-15);
  EXPECT_EQ(cdf_tan_theta(p, ModelKind::MM, 0.0), 0.0);
  EXPECT_EQ(cdf_tan_theta(p, ModelKind::MM, kInf), 1.0);
  EXPECT_THROW(cdf_tan_theta(p, ModelKind::MM, -1.0), domain_error);
}

TEST(CdfTheta, QuarterPi) {
  EXPECT_NEAR(cdf_theta(EnvParams::from_rho(1.0), ModelKind::MM, std::numbers::pi / 4),
              std::exp(-1.0), 1e-15);
  EXPECT_THROW(cdf_theta(EnvParams::from_rho(1.0), ModelKind::MM, kHalfPi), domain_error);
  EXPECT_THROW(cdf_theta(EnvParams::from_rho(1.0), ModelKind::MM, -0.1), domain_error);
}

TEST(Identities, MMEqualsMDAndWeibullOne) {
  for (const auto &p : random_params(20, 1)) {
    for (int i = 0; i < 200; ++i) {
      const double phi = kHalfPi * i / 200.0;
      const double mm = cdf_theta(p, ModelKind::MM, phi);
      EXPECT_NEAR(cdf_theta(p, ModelKind::MD, phi), mm, 1e-12);
      EXPECT_NEAR(cdf_theta(p.with_shape(1.0), ModelKind::WEIBULL, phi), mm, 1e-12);
      EXPECT_NEAR(cdf_theta_xh(p, 0.0, phi), mm, 1e-15);
    }
    EXPECT_NEAR(mean_theta(p, ModelKind::MM), mean_theta(p, ModelKind::MD), 1e-12);
  }
}

TEST(Means, QuotedValues) {
  EXPECT_NEAR(mean_theta(EnvParams::from_rho(1.0), ModelKind::MM), 0.9493, 1e-3);
  EXPECT_NEAR(mean_theta(EnvParams::from_rho(0.6), ModelKind::MM), 0.7732, 1e-3);
  EXPECT_NEAR(mean_theta(EnvParams::from_rho(0.35), ModelKind::MM), 0.5935, 1e-3);
  EXPECT_NEAR(mean_psi(EnvParams::from_rho(1.0), ModelKind::MM), kHalfPi - 0.9493, 1e-3);
  EXPECT_LT(mean_theta(EnvParams::from_rho(1e-6), ModelKind::MM), 1e-4);
}

TEST(Means, TailIntegralOracle) {
  // E[theta] = int_0^inf arctan(t) f(t) dt with the Frechet density, checked
  // against a Riemann sum in t.
  const double rho = 0.6;
  double riemann = 0.0;
  const double du = 1e-5;
  for (double u = 0.5 * du; u < 1.0; u += du) {
    // t = u / (1 - u)
    const double t = u / (1 - u);
    riemann += std::atan(t) * rho / (t * t) * std::exp(-rho / t) / ((1 - u) * (1 - u)) * du;
  }
  EXPECT_NEAR(mean_theta(EnvParams::from_rho(rho), ModelKind::MM), riemann, 1e-7);
}

TEST(Means, ElevatedObserverLowersMean) {
  const EnvParams p(1.0, 1.0);
  double prev = mean_theta(p, ModelKind::MM, 0.0);
  for (double h : {0.5, 1.0, 2.0, 4.0}) {
    const double m = mean_theta(p, ModelKind::MM, h);
    EXPECT_LT(m, prev);
    prev = m;
  }
  EXPECT_THROW(mean_theta(p, ModelKind::DM, 1.0), domain_error);
}

TEST(DmCdf, LimitsAndMonotone) {
  const EnvParams p(0.1, 2.0);
  EXPECT_EQ(dm_cdf_tan_theta(p, 0.0), 0.0);
  // 1 - F ~ lambda E[h] / t for large t.
  EXPECT_NEAR(dm_cdf_tan_theta(p, 1e6), 1.0 - 0.1 * 0.5 / 1e6, 1e-10);
  EXPECT_NEAR(dm_cdf_tan_theta(p, 1e12), 1.0, 1e-12);
  double prev = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double v = dm_cdf_tan_theta(p, 0.002 * i);
    EXPECT_GE(v, prev - 1e-14);
    prev = v;
  }
}

TEST(DmCdf, DirectProductOracle) {
  // Brute-force midpoint rule on the phase with an untruncated product.
  const EnvParams p(0.5, 1.0);
  for (double t : {0.05, 0.2, 0.5, 2.0}) {
    const int m = 20000;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      const double u = (j + 0.5) / m / p.lambda();
      double prod = 1.0;
      for (int i = 1; i < 5000; ++i) {
        prod *= 1.0 - std::exp(-p.mu() * (u + (i - 1) / p.lambda()) * t);
      }
      acc += prod;
    }
    EXPECT_NEAR(dm_cdf_tan_theta(p, t), acc / m, 1e-7) << t;
  }
}

TEST(ElevatedObserver, ValuesAndDominance) {
  const EnvParams p(1.0, 1.0);
  EXPECT_NEAR(cdf_theta_xh(p, 1.0, std::numbers::pi / 4), std::exp(-std::exp(-1.0)), 1e-15);
  EXPECT_THROW(cdf_theta_xh(p, -1.0, 0.3), domain_error);
  for (int i = 1; i < 100; ++i) {
    const double phi = kHalfPi * i / 100.0;
    EXPECT_GE(cdf_theta_xh(p, 2.0, phi), cdf_theta_xh(p, 1.0, phi));
  }
}

TEST(LosProbability, SpotValuesAndMonotone) {
  const auto p = EnvParams::from_rho(0.35);
  EXPECT_NEAR(los_probability(p, 0.0, std::numbers::pi / 4), std::exp(-0.35), 1e-15);
  EXPECT_NEAR(los_probability(p, 0.0, kHalfPi - 1e-9), 1.0, 1e-8);
  for (double rho : {0.05, 0.35, 0.57}) {
    double prev = 0.0;
    for (int i = 1; i < 90; ++i) {
      const double v = los_probability(EnvParams::from_rho(rho), 0.0, i * std::numbers::pi / 180);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(Psi, ComplementRelation) {
  for (const auto &p : random_params(5, 2)) {
    for (int i = 1; i <= 50; ++i) {
      const double phi = kHalfPi * i / 50.0;
      EXPECT_NEAR(cdf_psi(p, ModelKind::MM, phi), 1.0 - cdf_theta(p, ModelKind::MM, kHalfPi - phi),
                  1e-15);
      EXPECT_NEAR(cdf_psi_xh(p, 0.4, phi), 1.0 - cdf_theta_xh(p, 0.4, kHalfPi - phi), 1e-12);
    }
  }
}

TEST(Properties, CdfsNondecreasing) {
  for (const auto &p : random_params(20, 3)) {
    for (const auto &d : all_ground_and_elevated(p)) {
      double prev = 0.0;
      for (int i = 0; i < 1000; ++i) {
        const double v = d.cdf(kHalfPi * i / 1000.0);
        ASSERT_GE(v, prev - 1e-14) << to_string(d.variant());
        ASSERT_LE(v, 1.0 + 1e-14);
        prev = v;
      }
    }
  }
}

TEST(Properties, PdfIsDerivativeOfCdf) {
  for (const auto &p : random_params(6, 4)) {
    for (const auto &d : all_ground_and_elevated(p)) {
      for (int i = 1; i < 40; ++i) {
        const double phi = kHalfPi * i / 40.0;
        const double h = 1e-6;
        const double fd = (d.cdf(phi + h) - d.cdf(phi - h)) / (2 * h);
        const double pdf = d.pdf(phi);
        EXPECT_NEAR(fd, pdf, 1e-5 * std::max(1.0, pdf)) << to_string(d.variant()) << " " << phi;
      }
    }
  }
}

TEST(Properties, PdfsNormalize) {
  for (const auto &p : random_params(6, 5)) {
    for (const auto &d : all_ground_and_elevated(p)) {
      const auto r = numerics::integrate([&](double phi) { return d.pdf(phi); }, 0.0, kHalfPi,
                                         {1e-11, 1e-13, 2000});
      EXPECT_NEAR(r.value, 1.0, 1e-8) << to_string(d.variant());
    }
  }
}

TEST(Properties, MeanMatchesDensityMoment) {
  const EnvParams p(0.3, 0.8, 1.7);
  for (const auto &d : all_ground_and_elevated(p)) {
    const auto r = numerics::integrate([&](double phi) { return phi * d.pdf(phi); }, 0.0, kHalfPi,
                                       {1e-11, 1e-13, 2000});
    EXPECT_NEAR(d.mean(), r.value, 1e-7) << to_string(d.variant());
  }
}

TEST(JointDensity, NormalizesAndMarginals) {
  const EnvParams p(1.0, 1.0);
  const auto outer = numerics::integrate(
      [&](double h) {
        return numerics::integrate([&](double x) { return joint_density(p, x, h); }, 0.0, kInf,
                                   {1e-11, 1e-14, 500})
            .value;
      },
      0.0, kInf, {1e-10, 1e-13, 500});
  EXPECT_NEAR(outer.value, 1.0, 1e-6);
  for (double h : {0.1, 0.5, 1.0, 3.0}) {
    const auto r = numerics::integrate([&](double x) { return joint_density(p, x, h); }, 0.0, kInf,
                                       {1e-11, 1e-14, 500});
    EXPECT_NEAR(r.value, marginal_h(p, h), 1e-8);
  }
  for (double x : {0.2, 1.0, 4.0}) {
    const auto r = numerics::integrate([&](double h) { return joint_density(p, x, h); }, 0.0, kInf,
                                       {1e-11, 1e-14, 500});
    EXPECT_NEAR(r.value / marginal_x(p, x), 1.0, 1e-8);
  }
  EXPECT_EQ(joint_density(p, 1.0, 0.0), 0.0);
  EXPECT_THROW(joint_density(p, 0.0, 1.0), domain_error);
}

TEST(JointDensity, MarginalsNormalizeAndMeans) {
  const EnvParams p(0.3, 2.0);
  const auto gh = numerics::integrate([&](double h) { return marginal_h(p, h); }, 0.0, kInf);
  const auto kx = numerics::integrate([&](double x) { return marginal_x(p, x); }, 0.0, kInf,
                                      {1e-10, 1e-13, 1000});
  EXPECT_NEAR(gh.value, 1.0, 1e-9);
  EXPECT_NEAR(kx.value, 1.0, 1e-6);
  const auto mx = numerics::integrate([&](double x) { return x * marginal_x(p, x); }, 0.0, kInf,
                                      {1e-10, 1e-13, 1000});
  EXPECT_NEAR(mx.value, 2.0 / p.lambda(), 1e-5);
  const auto m = blocking_means(p);
  EXPECT_EQ(m.height, 2.0 / p.mu());
  EXPECT_EQ(m.distance, 2.0 / p.lambda());
  // g(h) peaks at 1 / mu.
  const double peak = 1.0 / p.mu();
  EXPECT_GT(marginal_h(p, peak), marginal_h(p, peak * 1.01));
  EXPECT_GT(marginal_h(p, peak), marginal_h(p, peak * 0.99));
}

TEST(BlockingIndex, PoissonShape) {
  const EnvParams p(1.0, 1.0);
  const double m = blocking_index_mean(p, 2.0, 2.0);
  EXPECT_NEAR(m, 2.0 * (1.0 - (1.0 - std::exp(-2.0)) / 2.0), 1e-15);
  double total = 0.0, mean = 0.0;
  for (long i = 1; i < 200; ++i) {
    const double q = blocking_index_pmf(p, 2.0, 2.0, i);
    total += q;
    mean += (i - 1) * q;
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_NEAR(mean, m, 1e-12);
  EXPECT_NEAR(blocking_index_pmf(p, 1.0, 1e-9, 1), 1.0, 1e-8);
  EXPECT_THROW(blocking_index_pmf(p, 1.0, 1.0, 0), domain_error);
}

TEST(Distribution, TableExport) {
  const auto d = AngleDistribution::ground(EnvParams::from_rho(1.0), ModelKind::MM);
  std::ostringstream os;
  write_table(os, d, 8);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "phi,cdf,pdf");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 8);
}

TEST(Distribution, TableExportTangentAxis) {
  const EnvParams p = EnvParams::from_rho(0.7);
  const auto d = AngleDistribution::ground(p, ModelKind::MM);
  std::ostringstream os;
  write_table(os, d, 16, TableAxis::TANGENT);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,cdf,pdf");
  while (std::getline(is, line)) {
    double t = 0, c = 0, f = 0;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &c, &f), 3);
    EXPECT_NEAR(c, cdf_tan_theta(p, ModelKind::MM, t), 1e-12);
    EXPECT_NEAR(f, pdf_tan_theta(p, ModelKind::MM, t), 1e-9 * std::max(1.0, f));
  }
}
