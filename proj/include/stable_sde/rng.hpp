#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "numeric.hpp"

namespace stable_sde {

/// SplitMix64 finaliser. Used to expand a root seed into statistically
/// independent sub-seeds: sub_seed(root, i) depends only on (root, i), never on
/// the order in which sub-streams are requested.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(splitmix64(root) ^ splitmix64(index * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
}

inline std::uint64_t sub_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  return sub_seed(sub_seed(root, a), b);
}

/// Seeded generator with platform-independent variate transforms. The
/// engine is mt19937_64; the conversions below are written out so that the
/// same seed gives the same doubles with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  /// Standard normal via Box-Muller, caching the second variate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double theta = 2.0 * kPi * uniform_open();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stable_sde
