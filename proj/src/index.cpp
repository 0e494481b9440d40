#include "afp/index.hpp"

#include <limits>
#include <stdexcept>

namespace afp {

namespace {

bool fits_u64(const mpz_class& value) {
  return sgn(value) >= 0 && mpz_sizeinbase(value.get_mpz_t(), 2) <= 64;
}

std::uint64_t to_u64(const mpz_class& value) {
  std::uint64_t out = 0;
  std::size_t count = 0;
  mpz_export(&out, &count, -1, sizeof(out), 0, 0, value.get_mpz_t());
  return count == 0 ? 0 : out;
}

}  // namespace

Index::Index(int value) {
  if (value < 0) throw std::invalid_argument("Index: negative value");
  small_ = static_cast<std::uint64_t>(value);
}

Index::Index(const mpz_class& value) {
  if (sgn(value) < 0) throw std::invalid_argument("Index: negative value");
  if (fits_u64(value)) {
    small_ = to_u64(value);
  } else {
    big_ = std::make_shared<const mpz_class>(value);
    small_ = mpz_scan1(big_->get_mpz_t(), 0);
  }
}

Index Index::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("Index: empty string");
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("Index: not a natural number: " +
                                  std::string(text));
    }
  }
  return Index(mpz_class(std::string(text), 10));
}

Index Index::power_of_two(std::uint64_t exponent) {
  if (exponent < 64) return Index(std::uint64_t{1} << exponent);
  mpz_class v;
  mpz_setbit(v.get_mpz_t(), exponent);
  return Index(v);
}

mpz_class Index::to_mpz() const {
  if (big_) return *big_;
  mpz_class v;
  mpz_import(v.get_mpz_t(), 1, -1, sizeof(small_), 0, 0, &small_);
  return v;
}

std::string Index::to_string() const {
  if (big_) return big_->get_str();
  return std::to_string(small_);
}

std::uint64_t Index::trailing_zeros() const {
  if (is_zero()) throw std::domain_error("Index: valuation of zero");
  if (big_) return small_;
  return static_cast<std::uint64_t>(__builtin_ctzll(small_));
}

std::uint64_t Index::valuation(std::uint64_t prime) const {
  if (prime < 2) throw std::invalid_argument("Index: valuation base < 2");
  if (prime == 2) return trailing_zeros();
  if (is_zero()) throw std::domain_error("Index: valuation of zero");
  if (!big_) {
    std::uint64_t v = small_;
    std::uint64_t count = 0;
    while (v % prime == 0) {
      v /= prime;
      ++count;
    }
    return count;
  }
  mpz_class rest;
  mpz_class p(static_cast<unsigned long>(prime));
  return mpz_remove(rest.get_mpz_t(), big_->get_mpz_t(), p.get_mpz_t());
}

Index Index::successor() const {
  if (!big_ && small_ != std::numeric_limits<std::uint64_t>::max()) {
    return Index(small_ + 1);
  }
  return Index(to_mpz() + 1);
}

bool operator==(const Index& a, const Index& b) {
  if (a.big_ == nullptr || b.big_ == nullptr) {
    return a.big_ == b.big_ && a.small_ == b.small_;
  }
  return a.big_ == b.big_ || *a.big_ == *b.big_;
}

std::strong_ordering operator<=>(const Index& a, const Index& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) return a.small_ <=> b.small_;
  if (a.big_ == nullptr) return std::strong_ordering::less;
  if (b.big_ == nullptr) return std::strong_ordering::greater;
  if (a.big_ == b.big_) return std::strong_ordering::equal;
  const int c = cmp(*a.big_, *b.big_);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater
                        : std::strong_ordering::equal);
}

}  // namespace afp
