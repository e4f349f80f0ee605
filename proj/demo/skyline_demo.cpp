// Small tour of the library: angle laws, blocker statistics, RIS gains and
// a Monte Carlo cross-check.

#include "skyline/skyline.hpp"

#include <cstdio>

using namespace skyline;

int main() {
  const EnvParams city(0.012, 0.02); // buildings per metre, 1 / mean height

  std::printf("rho = %.2f\n", city.rho());
  for (auto m : {ModelKind::MM, ModelKind::MD, ModelKind::DM}) {
    std::printf("  E[theta] %-3s = %.4f rad\n", std::string(to_string(m)).c_str(),
                analytic::mean_theta(city, m));
  }
  std::printf("  E[theta] at 10 m = %.4f rad\n", analytic::mean_theta(city, ModelKind::MM, 10.0));

  const auto b = analytic::blocking_means(city);
  std::printf("blocking building: E[X] = %.1f m, E[H] = %.1f m\n", b.distance, b.height);

  const auto trans = trans_angle_distribution(city, 80.0, 60.0);
  const auto refl = refl_angle_distribution(city, -80.0, 60.0);
  std::printf("RIS on a 60 m roof 80 m away: E[T] = %.4f, E[R] = %.4f\n", trans.mean(), refl.mean());

  const coverage::CoverageScenario hap(city, coverage::kHap.altitude, coverage::kHap.density);
  std::printf("HAP: E|l| = %.0f m, tau = %.6f\n", coverage::mean_l(hap),
              coverage::tau_unconditional(hap));

  const auto report = validate::validate_angle(city, {ModelKind::MM, 0.0}, 20000, 7);
  std::printf("%s\n", validate::summary_line(report).c_str());
  return report.pass ? 0 : 1;
}
