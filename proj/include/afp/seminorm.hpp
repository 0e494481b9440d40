#pragma once

#include <string>
#include <vector>

#include "afp/rational.hpp"
#include "afp/sparse_vector.hpp"

namespace afp {

/// A seminorm of the form max_j |⟨a_j, x⟩|, with ℓ1 and ℓ∞ as built-ins.
///
/// Every continuous seminorm we can evaluate exactly is of this shape, and
/// the shape keeps distance-to-span computations a finite linear program.
class PolyhedralSeminorm {
 public:
  enum class Kind { L1, LInf, MaxOfFunctionals };

  static PolyhedralSeminorm l1() { return PolyhedralSeminorm(Kind::L1, {}); }
  static PolyhedralSeminorm linf() {
    return PolyhedralSeminorm(Kind::LInf, {});
  }
  static PolyhedralSeminorm max_of(std::vector<SparseVector> functionals) {
    return PolyhedralSeminorm(Kind::MaxOfFunctionals, std::move(functionals));
  }

  Kind kind() const { return kind_; }
  const std::vector<SparseVector>& functionals() const { return functionals_; }
  std::string name() const;

  Rational operator()(const SparseVector& x) const;
  Rational distance(const SparseVector& x, const SparseVector& y) const;

  friend bool operator==(const PolyhedralSeminorm&,
                         const PolyhedralSeminorm&) = default;

 private:
  PolyhedralSeminorm(Kind kind, std::vector<SparseVector> functionals)
      : kind_(kind), functionals_(std::move(functionals)) {}

  Kind kind_;
  std::vector<SparseVector> functionals_;
};

inline Rational seminorm_eval(const PolyhedralSeminorm& rho,
                              const SparseVector& x) {
  return rho(x);
}

}  // namespace afp
