#pragma once

#include <cstdint>
#include <random>

#include "afp/rational.hpp"

namespace afp {

/// Seeded generator whose output is identical on every platform.
///
/// std::mt19937_64's raw stream is fully specified, but the standard
/// distributions are not, so bounded draws are done here by rejection.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// k/denominator with k uniform in [0, denominator].
  Rational unit_rational(std::uint64_t denominator);
  /// Uniform grid rational in [lo, hi] with the given resolution.
  Rational rational_in(const Rational& lo, const Rational& hi,
                       std::uint64_t resolution);
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace afp
