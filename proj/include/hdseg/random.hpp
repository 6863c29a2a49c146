#ifndef HDSEG_RANDOM_HPP
#define HDSEG_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace hdseg {

// All randomness in the library is built on std::mt19937_64 plus the helpers
// below. The standard pins down mt19937_64's output sequence exactly, but NOT
// the distributions (std::normal_distribution and std::uniform_int_distribution
// differ between standard libraries), so the transforms are implemented here.

/// splitmix64 step (Steele/Lea/Flood mixer). Advances `state`, returns one word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent substream seed from a base seed and stream tags.
inline std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t tag0,
                             std::uint64_t tag1 = 0) {
  std::uint64_t s = seed;
  std::uint64_t out = splitmix64(s);
  s ^= tag0;
  out ^= splitmix64(s);
  s ^= tag1;
  out ^= splitmix64(s);
  return out;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double canonicalDouble(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
inline std::uint64_t uniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Standard normal draws via Box-Muller over mt19937_64.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = canonicalDouble(rng_);
    } while (u1 <= 0.0);
    const double u2 = canonicalDouble(rng_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hdseg

#endif  // HDSEG_RANDOM_HPP
