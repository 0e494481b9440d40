#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace afp {

/// Exact rational scalar in canonical reduced form with a positive
/// denominator. Values whose numerator and denominator fit in a signed
/// 64-bit word live inline; anything larger is held by an immutable GMP
/// rational. The two representations never overlap, so equality can
/// compare representations directly.
class Rational {
 public:
  Rational() noexcept = default;

  template <std::integral T>
  Rational(T value) {  // NOLINT(google-explicit-constructor)
    if constexpr (std::is_signed_v<T>) {
      if (static_cast<std::int64_t>(value) != kMin) {
        num_ = static_cast<std::int64_t>(value);
        return;
      }
      big_ = std::make_shared<const mpq_class>(
          mpz_class(static_cast<long>(value)));
    } else {
      if (static_cast<std::uint64_t>(value) <=
          static_cast<std::uint64_t>(kMax)) {
        num_ = static_cast<std::int64_t>(value);
        return;
      }
      big_ = std::make_shared<const mpq_class>(
          mpz_class(static_cast<unsigned long>(value)));
    }
  }
  explicit Rational(const mpz_class& value);
  /// Accepts any mpq value; it is canonicalised first.
  explicit Rational(const mpq_class& value);

  /// num/den reduced. Throws std::invalid_argument when den == 0.
  static Rational from_parts(const mpz_class& num, const mpz_class& den);
  static Rational from_parts(std::int64_t num, std::int64_t den);

  bool is_inline() const { return !big_; }
  int sign() const;
  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_integer() const;

  mpz_class numerator() const;
  mpz_class denominator() const;
  mpq_class to_mpq() const;
  double to_double() const;
  std::string to_string() const;

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  /// Throws std::domain_error on division by zero.
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a);

  friend bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    return equal_slow(a, b);
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    if (!a.big_ && !b.big_) {
      if (a.den_ == b.den_) return a.num_ <=> b.num_;
      return static_cast<__int128>(a.num_) * b.den_ <=>
             static_cast<__int128>(b.num_) * a.den_;
    }
    return compare_slow(a, b);
  }

  /// Exact running sum that adds runs of equal inline denominators as
  /// plain integers and reduces only when the denominator changes.
  class Accumulator {
   public:
    void add(const Rational& v) {
      if (!v.big_ && v.den_ == den_ && count_ < kRunLimit) {
        num_ += v.num_;
        ++count_;
        return;
      }
      add_slow(v);
    }
    Rational result() const;

   private:
    static constexpr int kRunLimit = 1 << 30;
    void add_slow(const Rational& v);
    __int128 num_ = 0;
    std::int64_t den_ = 1;
    int count_ = 0;
    std::shared_ptr<const mpq_class> big_total_;
    Rational flushed() const;
  };

 private:
  static bool equal_slow(const Rational& a, const Rational& b);
  static std::strong_ordering compare_slow(const Rational& a,
                                           const Rational& b);

  static constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  static constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();

  static Rational from_wide(__int128 num, __int128 den);
  static Rational from_canonical_mpq(mpq_class value);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

Rational abs(const Rational& value);

std::ostream& operator<<(std::ostream& os, const Rational& value);

/// Parses "p/q", "p", or a finite decimal like "-0.25" into a canonical
/// rational. Throws std::invalid_argument on malformed input or q == 0.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" rendering; integers are written with denominator 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// num/den in canonical form.
Rational ratio(std::int64_t num, std::int64_t den);
Rational ratio(const mpz_class& num, const mpz_class& den);

inline Rational abs_value(const Rational& value) { return abs(value); }

inline const Rational& max_of(const Rational& a, const Rational& b) {
  return a < b ? b : a;
}
inline const Rational& min_of(const Rational& a, const Rational& b) {
  return b < a ? b : a;
}

/// 2^exponent for a possibly negative exponent.
Rational power_of_two(long exponent);
Rational power(const Rational& base, unsigned long exponent);

}  // namespace afp
