#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace causalaug {

// SplitMix64 finalizer; used for seeding and for deriving child seeds.
std::uint64_t splitmix64(std::uint64_t x);

// PCG32 (64-bit LCG state, xorshift-rotate output). Seedable, tiny, and
// the output stream depends only on (seed, stream), never on platform
// library internals, so sample streams are reproducible across builds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0x853c49e6748fea9bULL);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n); n must be > 0. Rejection sampling, unbiased.
  std::uint64_t uniform_below(std::uint64_t n);
  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// True with probability p.
  bool bernoulli(double p);

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();
  double normal(double mean, double stddev);

  /// Fisher-Yates random permutation of {0..n-1}.
  std::vector<std::size_t> permutation(std::size_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_below(i)]);
    }
  }

  // Child generator keyed on up to three values. Derivation uses the seed
  // this Rng was constructed with, not its current state, so derived
  // streams for a given key tuple never depend on how much of the parent
  // stream was consumed.
  Rng derive(std::uint64_t k1, std::uint64_t k2 = 0, std::uint64_t k3 = 0) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace causalaug
