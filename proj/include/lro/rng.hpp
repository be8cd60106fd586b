#pragma once

#include <cmath>
#include <cstdint>

namespace lro {

// Counter-based generator: output i of stream (seed, stream) is a fixed
// 64-bit mix of (key, i). Streams can be handed to replications in any
// order without coupling results to scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^
                 mix(stream + 0xD1B54A32D192ED03ULL))),
        counter_(0) {}

  std::uint64_t next_u64() {
    ++counter_;
    return mix(key_ ^ (counter_ * 0x9E3779B97F4A7C15ULL));
  }

  // Uniform on (0,1), never exactly 0 or 1.
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double a, double b) { return a + (b - a) * next_double(); }

  // Marsaglia polar method; pairs are cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double r = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * r;
    have_spare_ = true;
    return u * r;
  }

  double next_exponential(double rate) { return -std::log(next_double()) / rate; }

  // Inversion by pmf walk; adequate for small rates.
  long next_poisson(double lambda) {
    const double u = next_double();
    double p = std::exp(-lambda);
    double cum = p;
    long k = 0;
    while (u > cum && k < 4000) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cum += p;
    }
    return k;
  }

  long next_binomial(long n, double p) {
    long k = 0;
    for (long i = 0; i < n; ++i) {
      if (next_double() < p) ++k;
    }
    return k;
  }

  // Uniform integer in [0, bound), bound > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace lro
