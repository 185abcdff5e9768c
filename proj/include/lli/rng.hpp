#pragma once

#include <cstdint>

// Deterministic random streams. Distributions are implemented here rather
// than taken from <random> so that a given seed produces the same draws on
// any standard library, which keeps run logs byte-reproducible.

namespace lli {

// SplitMix64, used both as a stream mixer and to derive child seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stable child seed for a named substream (block index, trial index, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t s = master ^ (0x6a09e667f3bcc909ull + stream);
  std::uint64_t a = splitmix64(s);
  s ^= index * 0x5851f42d4c957f2dull + 0x14057b7ef767814full;
  return a ^ splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : state_(seed ? seed : 0x9e3779b9ull) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller, one spare cached.
  double normal();

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Binomial(n, p). Direct Bernoulli sum below a size threshold, normal
  // approximation with continuity correction for large n*p(1-p).
  long binomial(long n, double p);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lli
