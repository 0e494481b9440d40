#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace afp {

/// Arbitrary-precision natural number used as a coordinate index.
///
/// Values that fit in 64 bits are stored inline. Larger values live in a
/// shared immutable GMP integer, so copies are cheap and two indices built
/// from the same source compare equal without touching the limbs. Orbits of
/// the measure maps reach indices like 2^10000, which is why this is not a
/// plain integer.
class Index {
 public:
  Index() = default;
  Index(std::uint64_t value) : small_(value) {}  // NOLINT(implicit)
  Index(int value);                              // NOLINT(implicit)
  explicit Index(const mpz_class& value);

  static Index parse(std::string_view text);
  static Index power_of_two(std::uint64_t exponent);

  bool is_small() const { return big_ == nullptr; }
  /// Inline value; only meaningful when is_small().
  std::uint64_t small_value() const { return small_; }
  mpz_class to_mpz() const;
  std::string to_string() const;

  bool is_zero() const { return is_small() && small_ == 0; }

  /// Exponent of the largest power of `prime` dividing a nonzero index.
  std::uint64_t valuation(std::uint64_t prime) const;
  /// Number of trailing zero bits (2-adic valuation) of a nonzero index.
  std::uint64_t trailing_zeros() const;

  Index successor() const;

  friend bool operator==(const Index& a, const Index& b);
  friend std::strong_ordering operator<=>(const Index& a, const Index& b);

 private:
  // The value itself when inline; the cached trailing-zero count otherwise.
  std::uint64_t small_ = 0;
  std::shared_ptr<const mpz_class> big_;
};

}  // namespace afp
