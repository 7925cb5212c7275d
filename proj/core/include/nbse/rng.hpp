#pragma once

#include <cstdint>
#include <random>

namespace nbse {

// Seeded sampling helpers. std::uniform_int_distribution and
// std::normal_distribution are implementation-defined, so every seeded code
// path goes through these instead; identical seeds then give identical
// streams on any standard library.

/// Mix a base seed with a stream id (splitmix64 finalizer). Used to derive
/// independent per-trial / per-class seeds from one user-facing seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform integer in [0, n) by rejection; n must be positive.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// One standard normal draw (Box-Muller, polar form discarded half).
class GaussianDraw {
 public:
  double operator()(std::mt19937_64& gen) {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform_unit(gen) - 1.0;
      v = 2.0 * uniform_unit(gen) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

 private:
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nbse
