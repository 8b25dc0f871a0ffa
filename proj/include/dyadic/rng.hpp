#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dyadic {

/// Pseudo-random source used by every sampler in the library.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard)
/// and implements the uniform, normal and gamma variates itself, so a given
/// seed reproduces the same draws with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x5eed) : engine_(seed) {}

  /// Independent stream for a replicate, keyed by (seed, tags...).
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open();

  double normal();

  /// Natural log of a Gamma(shape, 1) variate. Working on the log scale keeps
  /// small shapes from underflowing to zero.
  double log_gamma_variate(double shape);

  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dyadic
