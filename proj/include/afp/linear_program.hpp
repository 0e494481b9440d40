#pragma once

#include <vector>

#include "afp/rational.hpp"

namespace afp {

enum class Relation { LessEq, Equal, GreaterEq };

struct LinearConstraint {
  std::vector<Rational> coefficients;
  Relation relation = Relation::LessEq;
  Rational rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  std::vector<Rational> point;
};

/// Minimises c·z subject to the given constraints and z ≥ 0.
///
/// Dense two-phase tableau simplex over exact rationals with Bland's rule,
/// so it terminates on degenerate problems and the optimum is exact.
/// Sized for desk problems (tens of variables and constraints).
LpSolution solve_lp(const std::vector<Rational>& objective,
                    const std::vector<LinearConstraint>& constraints);

}  // namespace afp
