#ifndef SKYLINE_RNG_HPP
#define SKYLINE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace skyline {

// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of replication `index` (and sub-stream `stream`) under `master`.
// Depends only on its arguments, never on which worker runs the replication.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t stream = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ index) + stream * 0xD1B54A32D192ED03ULL);
}

// mt19937_64 with hand-written variate transforms, so streams are
// bit-identical across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double weibull(double shape, double scale) {
    return scale * std::pow(-std::log(uniform()), 1.0 / shape);
  }

  // Knuth multiplication for small means, inversion by sequential search
  // otherwise (the means used here are modest).
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) {
      return 0;
    }
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double p = uniform();
      while (p > limit) {
        ++k;
        p *= uniform();
      }
      return k;
    }
    // Gap counting on [0, mean] with unit-rate exponentials.
    std::uint64_t k = 0;
    double t = exponential(1.0);
    while (t <= mean) {
      ++k;
      t += exponential(1.0);
    }
    return k;
  }

private:
  std::mt19937_64 engine_;
};

} // namespace skyline

#endif // SKYLINE_RNG_HPP
