#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace panelcf {

// All randomized routines draw through this wrapper. The mt19937_64 output
// sequence is fixed by the standard, and the uniform/normal transforms below
// avoid std::*_distribution (whose streams differ across standard libraries),
// so identical seeds give identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent substream: mixes (seed, stream) through splitmix64 so that
  // replicate/unit indexed work can run in any order, or in parallel, and
  // still reproduce the serial draws bit for bit.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    return Rng(splitmix64(s));
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo bias is negligible for n << 2^64 and
  // keeps the draw count per call fixed, which substream determinism relies on.
  std::uint64_t uniform_index(std::uint64_t n) { return engine_() % n; }

  // Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace panelcf
