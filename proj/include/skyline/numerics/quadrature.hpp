#ifndef SKYLINE_NUMERICS_QUADRATURE_HPP
#define SKYLINE_NUMERICS_QUADRATURE_HPP

#include "skyline/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace skyline::numerics {

struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;
};

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
  int subdivisions = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Segment &other) const { return error < other.error; }
};

template <typename F> Segment gauss_kronrod_15(F &f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) {
      gauss += kGaussWeights[j / 2] * sum;
    }
  }
  kronrod *= half;
  gauss *= half;
  double err = std::abs(kronrod - gauss);
  if (!std::isfinite(kronrod)) {
    err = std::numeric_limits<double>::infinity();
  }
  return {a, b, kronrod, err};
}

template <typename F>
QuadratureResult adaptive(F &f, double a, double b, const QuadratureSpec &spec) {
  std::vector<Segment> segments;
  segments.reserve(2 * spec.max_subdivisions + 1);
  segments.push_back(gauss_kronrod_15(f, a, b));
  auto resum = [&segments](double &value, double &error) {
    value = 0.0;
    error = 0.0;
    for (const auto &s : segments) {
      value += s.value;
      error += s.error;
    }
  };
  double total = segments.front().value;
  double total_err = segments.front().error;
  int splits = 0;
  auto converged = [&] {
    return total_err <= std::max(spec.rel_tol * std::abs(total), spec.abs_tol);
  };
  while (!converged()) {
    if (splits >= spec.max_subdivisions) {
      throw quadrature_error("integrate: no convergence within max_subdivisions",
                             total, total_err);
    }
    // segments is kept as a max-heap on error.
    std::pop_heap(segments.begin(), segments.end());
    const Segment worst = segments.back();
    segments.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw quadrature_error("integrate: interval underflow", total, total_err);
    }
    const Segment left = gauss_kronrod_15(f, worst.a, mid);
    const Segment right = gauss_kronrod_15(f, mid, worst.b);
    segments.push_back(left);
    std::push_heap(segments.begin(), segments.end());
    segments.push_back(right);
    std::push_heap(segments.begin(), segments.end());
    ++splits;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    if (converged()) {
      resum(total, total_err);
    }
  }
  resum(total, total_err);
  return {total, total_err, splits};
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b]; b may be +infinity, in
// which case [a, inf) is mapped onto (0, 1] through u = 1 / (1 + x - a).
// Nodes never touch the interval ends, so integrable endpoint singularities
// are tolerated.  Throws quadrature_error with the best estimate on failure.
template <typename F>
QuadratureResult integrate(F &&f, double a, double b, const QuadratureSpec &spec = {}) {
  if (!(spec.rel_tol > 0.0)) {
    throw parameter_error("integrate: rel_tol must be positive");
  }
  if (a == b) {
    return {};
  }
  if (std::isinf(b)) {
    skyline::detail::require_domain(b > 0.0 && std::isfinite(a),
                                    "integrate: only [a, +inf) is supported");
    auto mapped = [&](double u) {
      const double x = a + (1.0 - u) / u;
      return f(x) / (u * u);
    };
    return detail::adaptive(mapped, 0.0, 1.0, spec);
  }
  if (b < a) {
    auto r = integrate(f, b, a, spec);
    r.value = -r.value;
    return r;
  }
  return detail::adaptive(f, a, b, spec);
}

} // namespace skyline::numerics

#endif // SKYLINE_NUMERICS_QUADRATURE_HPP
