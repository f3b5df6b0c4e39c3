#ifndef ROBUSTLSQ_RNG_HPP_
#define ROBUSTLSQ_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace robustlsq {

/// SplitMix64 step; used to derive independent substream seeds from a base
/// seed, e.g. one stream per mini-batch so generation order never matters.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x632be59bd9b4e019ULL);
}

/// Seedable generator with fully specified transforms. The engine is
/// std::mt19937_64 (its output sequence is pinned by the standard) and the
/// uniform/normal mappings are implemented here rather than through
/// std::*_distribution, whose algorithms are implementation-defined. A fixed
/// seed therefore reproduces the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Standard normal via Box-Muller; pairs are cached, so draws come two per
  /// pair of uniforms in a fixed order.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    // 1 - u1 lies in (0, 1], keeping the log argument positive.
    double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
    double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Unbiased integer in [0, bound) via rejection on the top of the range.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  /// k distinct indices from [0, n), ascending. Partial Fisher-Yates over an
  /// index array, then sort of the selected prefix.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace robustlsq

#endif  // ROBUSTLSQ_RNG_HPP_
