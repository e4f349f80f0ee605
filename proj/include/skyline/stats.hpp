#ifndef SKYLINE_STATS_HPP
#define SKYLINE_STATS_HPP

#include "skyline/error.hpp"
#include "skyline/numerics/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

// The handful of goodness-of-fit tools the validation harness needs.
namespace skyline::stats {

class EmpiricalCdf {
public:
  explicit EmpiricalCdf(std::span<const double> samples)
      : sorted_(samples.begin(), samples.end()) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  // Fraction of samples <= x.
  double operator()(double x) const {
    if (sorted_.empty()) return 0.0;
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

  std::span<const double> sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return sorted_.size(); }

private:
  std::vector<double> sorted_;
};

inline EmpiricalCdf empirical_cdf(std::span<const double> samples) {
  return EmpiricalCdf(samples);
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
  double dof = 0.0;
};

// Kolmogorov limiting survival function Q(z) = 2 sum (-1)^{k-1} e^{-2 k^2 z^2}.
inline double kolmogorov_q(double z) {
  if (z < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * z * z);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// One-sample two-sided KS test with the asymptotic p-value (Stephens'
// small-sample correction of the argument).
template <typename Cdf> TestResult ks_test(std::span<const double> samples, Cdf &&cdf) {
  if (samples.size() < 10) {
    throw sample_size_error("ks_test: need at least 10 samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - f, f - lo});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_q((root + 0.12 + 0.11 / root) * d), 0.0};
}

// Two-sample two-sided KS test, asymptotic p-value with the effective size
// n m / (n + m).
inline TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 10 || b.size() < 10) {
    throw sample_size_error("ks_two_sample: need at least 10 samples per side");
  }
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double root = std::sqrt(n * m / (n + m));
  return {d, kolmogorov_q((root + 0.12 + 0.11 / root) * d), 0.0};
}

// Pearson chi-square of observed counts against cell probabilities.
// dof = cells - 1 - fitted_parameters.
inline TestResult chi_square_test(std::span<const double> observed,
                                  std::span<const double> probabilities,
                                  int fitted_parameters = 0) {
  if (observed.size() != probabilities.size() || observed.size() < 2) {
    throw sample_size_error("chi_square_test: need matching vectors of >= 2 cells");
  }
  double total = 0.0;
  for (double o : observed) total += o;
  if (total < 10.0) {
    throw sample_size_error("chi_square_test: need at least 10 observations");
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probabilities[i];
    if (e <= 0.0) {
      if (observed[i] > 0.0) return {INFINITY, 0.0, 0.0};
      continue;
    }
    stat += (observed[i] - e) * (observed[i] - e) / e;
  }
  const double dof = static_cast<double>(observed.size()) - 1.0 - fitted_parameters;
  return {stat, numerics::gamma_q(0.5 * dof, 0.5 * stat), dof};
}

// Two-sided normal p-value of a z score.
inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanEstimate mean_and_stderr(std::span<const double> xs) {
  MeanEstimate m;
  if (xs.empty()) return m;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - m.mean) * (x - m.mean);
  if (xs.size() > 1) var /= (n - 1.0);
  m.std_error = std::sqrt(var / n);
  return m;
}

} // namespace skyline::stats

#endif // SKYLINE_STATS_HPP
