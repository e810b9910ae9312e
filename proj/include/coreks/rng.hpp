#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace coreks {

// Counter-based generator built on the splitmix64 finalizer. Each draw is
// mix(key + GOLDEN * counter), so a stream is fully determined by
// (seed, stream id) and reruns are bit-identical across platforms.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream = 0)
      : key_(mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(stream + 0xBF58476D1CE4E5B9ull))) {}

  uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0.
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller; draws come in deterministic pairs.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex Gaussian with total variance var
  // (var/2 per real/imaginary component).
  std::complex<double> cgaussian(double var) {
    double s = std::sqrt(var / 2.0);
    double re = gaussian();
    double im = gaussian();
    return {s * re, s * im};
  }

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace coreks
