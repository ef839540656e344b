#ifndef NHPP_RNG_HPP
#define NHPP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace nhpp {

// PCG32 (XSH-RR variant). Hand-rolled so draw sequences are identical across
// platforms and standard-library versions; std::gamma_distribution is
// implementation-defined and would break byte-exact reproducibility.
class Rng {
 public:
  static constexpr std::string_view algorithm = "pcg32-xsh-rr";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    state_ = 0U;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  // Derive an independent stream for a replicate/chain index.
  static Rng for_replicate(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1)), index + 1);
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    return (static_cast<std::uint64_t>(next_u32()) << 32) | next_u32();
  }

  // Uniform in (0,1); never returns 0 so log() is safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n).
  std::uint32_t uniform_index(std::uint32_t n) {
    // Lemire-style rejection keeps the distribution exact.
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
    auto lo = static_cast<std::uint32_t>(m);
    if (lo < n) {
      std::uint32_t t = (-n) % n;
      while (lo < t) {
        m = static_cast<std::uint64_t>(next_u32()) * n;
        lo = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  double normal() {
    // Marsaglia polar method with one cached value.
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Gamma(shape, rate) via Marsaglia-Tsang; shape < 1 boosted through the
  // Gamma(shape+1) * U^{1/shape} identity.
  double gamma(double shape, double rate) {
    if (shape < 1.0) {
      double u = uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  // Knuth for small means, PTRS-like normal cutover is unnecessary here:
  // cell intensities stay modest, but guard large means with a gamma trick.
  std::uint64_t poisson(double mean) {
    std::uint64_t count = 0;
    double mu = mean;
    // Peel off large chunks so the product below cannot underflow.
    while (mu > 30.0) {
      double half = std::floor(mu * 0.5);
      double g = gamma(half, 1.0);
      if (g > mu) {
        // The (half)th arrival exceeds the window: binomial thinning of half-1.
        return count + binomial_of_uniforms(static_cast<std::uint64_t>(half) - 1, mu / g);
      }
      count += static_cast<std::uint64_t>(half);
      mu -= g;
    }
    double limit = std::exp(-mu);
    double prod = uniform();
    while (prod > limit) {
      ++count;
      prod *= uniform();
    }
    return count;
  }

 private:
  std::uint64_t binomial_of_uniforms(std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i)
      if (uniform() < p) ++k;
    return k;
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace nhpp

#endif
