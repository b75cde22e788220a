#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "msdn/matrix.hpp"

namespace msdn {

/// SplitMix64 finalizer. Used to derive independent seeds for substreams.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mixes a base seed with stream identifiers into a new seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Seeded random stream backed by std::mt19937_64, whose output sequence is
/// fixed by the C++ standard. All conversions to floating point are done here
/// rather than through <random> distributions, which are implementation
/// defined, so sequences are identical across platforms and compilers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi). Requires lo < hi.
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (no cached second value).
  double normal();
  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t below(std::size_t n);

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  /// Independent stream keyed by this stream's seed and `stream_id`.
  RngStream derive(std::uint64_t stream_id) const { return RngStream(derive_seed(seed_, stream_id)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// rows×cols matrix of Uniform[lo, hi) draws in row-major order.
Matrix sample_uniform(RngStream& rng, std::size_t rows, std::size_t cols, double lo, double hi);

}  // namespace msdn
