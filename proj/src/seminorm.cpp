#include "afp/seminorm.hpp"

namespace afp {

std::string PolyhedralSeminorm::name() const {
  switch (kind_) {
    case Kind::L1:
      return "l1";
    case Kind::LInf:
      return "linf";
    case Kind::MaxOfFunctionals:
      return "max";
  }
  return "?";
}

Rational PolyhedralSeminorm::operator()(const SparseVector& x) const {
  switch (kind_) {
    case Kind::L1:
      return x.l1_norm();
    case Kind::LInf:
      return x.linf_norm();
    case Kind::MaxOfFunctionals: {
      Rational best(0);
      for (const auto& a : functionals_) {
        Rational v = abs(a.dot(x));
        if (v > best) best = std::move(v);
      }
      return best;
    }
  }
  return Rational(0);
}

Rational PolyhedralSeminorm::distance(const SparseVector& x,
                                      const SparseVector& y) const {
  if (kind_ == Kind::L1) return l1_distance(x, y);
  return (*this)(x - y);
}

}  // namespace afp
