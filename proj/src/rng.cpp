#include "msdn/rng.hpp"

#include <cmath>
#include <numbers>

#include "msdn/errors.hpp"

namespace msdn {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) + b);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("uniform: lo must be < hi");
  const double x = lo + (hi - lo) * uniform();
  // Rounding can land exactly on hi for narrow ranges.
  return x < hi ? x : std::nextafter(hi, lo);
}

double RngStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RngStream::below(std::size_t n) {
  if (n == 0) throw ArgumentError("below: n must be positive");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

std::vector<std::size_t> RngStream::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = below(i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

Matrix sample_uniform(RngStream& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
  if (!(lo < hi)) {
    throw ArgumentError("sample_uniform: require lo < hi, got lo=" + std::to_string(lo) +
                        " hi=" + std::to_string(hi));
  }
  Matrix m(rows, cols);
  for (double& x : m.values()) x = rng.uniform(lo, hi);
  return m;
}

}  // namespace msdn
