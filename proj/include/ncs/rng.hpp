#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace ncs {

/// Seeded random stream. Child streams are derived from (seed, label), so a new
/// consumer never shifts the draws of an existing one.
///
/// Distribution transforms are implemented here rather than with the <random>
/// distributions, whose output is not specified bit-exactly across standard
/// libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  RandomStream child(std::string_view label) const;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);
  /// Standard normal (Box-Muller).
  double gaussian();
  /// N(0, sigma^2) conditioned on |z| <= bound_sds * sigma. Returns 0 when sigma == 0.
  double truncated_gaussian(double sigma, double bound_sds = 4.0);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace ncs
