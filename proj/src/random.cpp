#include "afp/random.hpp"

#include <limits>
#include <stdexcept>

namespace afp {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t v = engine_();
    if (v < limit) return v % bound;
  }
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::between: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  return lo + static_cast<std::int64_t>(below(span));
}

Rational Rng::unit_rational(std::uint64_t denominator) {
  const std::uint64_t k = below(denominator + 1);
  return ratio(mpz_class(static_cast<unsigned long>(k)),
               mpz_class(static_cast<unsigned long>(denominator)));
}

Rational Rng::rational_in(const Rational& lo, const Rational& hi,
                          std::uint64_t resolution) {
  return lo + (hi - lo) * unit_rational(resolution);
}

}  // namespace afp
