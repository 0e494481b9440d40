#include "afp/rational.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace afp {

namespace {

using u128 = unsigned __int128;

u128 magnitude(__int128 v) { return v < 0 ? -static_cast<u128>(v) : v; }

unsigned ctz128(u128 v) {
  const auto lo = static_cast<std::uint64_t>(v);
  if (lo != 0) return static_cast<unsigned>(__builtin_ctzll(lo));
  return 64 + static_cast<unsigned>(
                  __builtin_ctzll(static_cast<std::uint64_t>(v >> 64)));
}

u128 gcd128(u128 a, u128 b) {
  if ((a >> 64) == 0 && (b >> 64) == 0) {
    return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
  }
  if (a == 0) return b;
  if (b == 0) return a;
  const unsigned shift = ctz128(a | b);
  a >>= ctz128(a);
  do {
    b >>= ctz128(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b != 0);
  return a << shift;
}

mpz_class to_mpz(__int128 v) {
  const u128 m = magnitude(v);
  mpz_class out(static_cast<unsigned long>(m >> 64));
  out <<= 64;
  out += static_cast<unsigned long>(static_cast<std::uint64_t>(m));
  return v < 0 ? mpz_class(-out) : out;
}

bool fits_inline(const mpz_class& v) {
  return mpz_fits_slong_p(v.get_mpz_t()) &&
         v != std::numeric_limits<long>::min();
}

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  if (!is_integer_text(s)) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  if (s[0] == '+') s.remove_prefix(1);
  return mpz_class(std::string(s), 10);
}

}  // namespace

Rational::Rational(const mpz_class& value) {
  if (fits_inline(value)) {
    num_ = value.get_si();
  } else {
    big_ = std::make_shared<const mpq_class>(value);
  }
}

Rational::Rational(const mpq_class& value) {
  mpq_class c(value);
  c.canonicalize();
  *this = from_canonical_mpq(std::move(c));
}

Rational Rational::from_canonical_mpq(mpq_class value) {
  Rational out;
  if (fits_inline(value.get_num()) && fits_inline(value.get_den())) {
    out.num_ = value.get_num().get_si();
    out.den_ = value.get_den().get_si();
  } else {
    out.big_ = std::make_shared<const mpq_class>(std::move(value));
  }
  return out;
}

Rational Rational::from_parts(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return from_canonical_mpq(std::move(q));
}

Rational Rational::from_parts(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  return from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const u128 mag = magnitude(num);
  if ((mag >> 64) == 0 && (static_cast<u128>(den) >> 64) == 0) {
    auto n = static_cast<std::uint64_t>(mag);
    auto d = static_cast<std::uint64_t>(den);
    const std::uint64_t g = std::gcd(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n == 0) d = 1;
    if (n <= static_cast<std::uint64_t>(kMax) &&
        d <= static_cast<std::uint64_t>(kMax)) {
      Rational out;
      out.num_ = num < 0 ? -static_cast<std::int64_t>(n)
                         : static_cast<std::int64_t>(n);
      out.den_ = static_cast<std::int64_t>(d);
      return out;
    }
  }
  const u128 g = gcd128(magnitude(num), static_cast<u128>(den));
  if (g > 1) {
    num /= static_cast<__int128>(g);
    den /= static_cast<__int128>(g);
  }
  if (num == 0) den = 1;
  if (num >= -kMax && num <= kMax && den <= kMax) {
    Rational out;
    out.num_ = static_cast<std::int64_t>(num);
    out.den_ = static_cast<std::int64_t>(den);
    return out;
  }
  mpq_class q(to_mpz(num), to_mpz(den));
  return from_canonical_mpq(std::move(q));
}

int Rational::sign() const {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

bool Rational::is_integer() const {
  return big_ ? big_->get_den() == 1 : den_ == 1;
}

mpz_class Rational::numerator() const {
  return big_ ? big_->get_num() : mpz_class(static_cast<long>(num_));
}

mpz_class Rational::denominator() const {
  return big_ ? big_->get_den() : mpz_class(static_cast<long>(den_));
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(mpz_class(static_cast<long>(num_)),
                   mpz_class(static_cast<long>(den_)));
}

namespace {

// Round-to-nearest-even quotient of two integers: at least 55 bits of
// the quotient plus a sticky bit let the final integer-to-double
// conversion do the rounding.
double nearest_double(const mpz_class& num, const mpz_class& den) {
  if (num == 0) return 0.0;
  mpz_class n = abs(num);
  mpz_class d = den;
  const long shift = 55 - (static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2)) -
                           static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 2)));
  if (shift > 0) {
    mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  } else if (shift < 0) {
    mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
  }
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  std::uint64_t bits = mpz_get_ui(q.get_mpz_t());
  if (r != 0) bits |= 1;
  const double magnitude = std::ldexp(static_cast<double>(bits), static_cast<int>(-shift));
  return num < 0 ? -magnitude : magnitude;
}

}  // namespace

double Rational::to_double() const {
  if (big_) return nearest_double(big_->get_num(), big_->get_den());
  constexpr std::int64_t kExact = std::int64_t{1} << 53;
  if (num_ >= -kExact && num_ <= kExact && den_ <= kExact) {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  return nearest_double(mpz_class(static_cast<long>(num_)),
                        mpz_class(static_cast<long>(den_)));
}

std::string Rational::to_string() const {
  if (big_) return big_->get_num().get_str() + "/" + big_->get_den().get_str();
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational& Rational::operator+=(const Rational& o) {
  if (!big_ && !o.big_) {
    if (den_ == o.den_) {
      const __int128 n = static_cast<__int128>(num_) + o.num_;
      if (den_ == 1 && n >= -kMax && n <= kMax) {
        num_ = static_cast<std::int64_t>(n);
        return *this;
      }
      return *this = from_wide(n, den_);
    }
    return *this = from_wide(static_cast<__int128>(num_) * o.den_ +
                                 static_cast<__int128>(o.num_) * den_,
                             static_cast<__int128>(den_) * o.den_);
  }
  return *this = from_canonical_mpq(mpq_class(to_mpq() + o.to_mpq()));
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  if (!big_ && !o.big_) {
    if (num_ == 0 || o.num_ == 0) return *this = Rational();
    const auto cross_gcd = [](std::int64_t n, std::int64_t d) -> std::int64_t {
      if (d == 1 || n == 1 || n == -1) return 1;
      return static_cast<std::int64_t>(std::gcd(
          static_cast<std::uint64_t>(n < 0 ? -n : n), static_cast<std::uint64_t>(d)));
    };
    const std::int64_t g1 = cross_gcd(num_, o.den_);
    const std::int64_t g2 = cross_gcd(o.num_, den_);
    const __int128 n = static_cast<__int128>(num_ / g1) * (o.num_ / g2);
    const __int128 d = static_cast<__int128>(den_ / g2) * (o.den_ / g1);
    if (n >= -kMax && n <= kMax && d <= kMax) {
      num_ = static_cast<std::int64_t>(n);
      den_ = static_cast<std::int64_t>(d);
      return *this;
    }
    mpq_class q(to_mpz(n), to_mpz(d));
    return *this = from_canonical_mpq(std::move(q));
  }
  return *this = from_canonical_mpq(mpq_class(to_mpq() * o.to_mpq()));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational: division by zero");
  if (!o.big_) {
    Rational inv;
    inv.num_ = o.num_ < 0 ? -o.den_ : o.den_;
    inv.den_ = o.num_ < 0 ? -o.num_ : o.num_;
    return *this *= inv;
  }
  return *this = from_canonical_mpq(mpq_class(to_mpq() / o.to_mpq()));
}

Rational operator-(const Rational& a) {
  if (!a.big_) {
    Rational out;
    out.num_ = -a.num_;
    out.den_ = a.den_;
    return out;
  }
  return Rational::from_canonical_mpq(mpq_class(-*a.big_));
}

bool Rational::equal_slow(const Rational& a, const Rational& b) {
  if (!a.big_ || !b.big_) return false;
  return a.big_ == b.big_ || *a.big_ == *b.big_;
}

std::strong_ordering Rational::compare_slow(const Rational& a,
                                            const Rational& b) {
  const int c = cmp(a.to_mpq(), b.to_mpq());
  return c <=> 0;
}

Rational Rational::Accumulator::flushed() const {
  Rational run = from_wide(num_, den_);
  if (big_total_) run += from_canonical_mpq(*big_total_);
  return run;
}

void Rational::Accumulator::add_slow(const Rational& v) {
  Rational total = flushed();
  total += v;
  if (total.big_) {
    big_total_ = total.big_;
    num_ = 0;
    den_ = 1;
  } else {
    big_total_.reset();
    num_ = total.num_;
    den_ = total.den_;
  }
  count_ = 0;
}

Rational Rational::Accumulator::result() const { return flushed(); }

Rational abs(const Rational& value) {
  return value.sign() < 0 ? -value : value;
}

std::ostream& operator<<(std::ostream& os, const Rational& value) {
  return os << value.to_string();
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const mpz_class num = parse_integer(text.substr(0, slash));
    const mpz_class den = parse_integer(text.substr(slash + 1));
    if (den == 0) {
      throw std::invalid_argument("zero denominator in '" + std::string(text) +
                                  "'");
    }
    return Rational::from_parts(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string whole(text.substr(0, dot));
    const std::string frac(text.substr(dot + 1));
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    const bool negative = whole[0] == '-';
    const mpz_class int_part = parse_integer(whole);
    mpz_class scale = 1;
    mpz_class frac_part = 0;
    if (!frac.empty()) {
      if (frac[0] == '-' || frac[0] == '+') {
        throw std::invalid_argument("malformed decimal '" + std::string(text) +
                                    "'");
      }
      frac_part = parse_integer(frac);
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    }
    const Rational r =
        Rational::from_parts(mpz_class(abs(int_part) * scale + frac_part), scale);
    return negative ? -r : r;
  }
  return Rational(parse_integer(text));
}

std::string to_string(const Rational& value) { return value.to_string(); }

double to_double(const Rational& value) { return value.to_double(); }

Rational ratio(std::int64_t num, std::int64_t den) {
  return Rational::from_parts(num, den);
}

Rational ratio(const mpz_class& num, const mpz_class& den) {
  return Rational::from_parts(num, den);
}

Rational power_of_two(long exponent) {
  const unsigned long e =
      static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, e);
  if (exponent < 0) return Rational::from_parts(mpz_class(1), p);
  return Rational(p);
}

Rational power(const Rational& base, unsigned long exponent) {
  Rational out(1);
  for (unsigned long i = 0; i < exponent; ++i) out *= base;
  return out;
}

}  // namespace afp
