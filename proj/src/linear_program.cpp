#include "afp/linear_program.hpp"

#include <optional>
#include <stdexcept>

namespace afp {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : cells_(rows, std::vector<Rational>(cols + 1, Rational(0))),
        basis_(rows, 0),
        cols_(cols) {}

  Rational& at(std::size_t r, std::size_t c) { return cells_[r][c]; }
  Rational& rhs(std::size_t r) { return cells_[r][cols_]; }
  std::size_t rows() const { return cells_.size(); }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = cells_[r];
    const Rational inv = 1 / prow[c];
    for (auto& v : prow) {
      if (v != 0) v *= inv;
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (i == r || cells_[i][c] == 0) continue;
      const Rational factor = cells_[i][c];
      auto& row = cells_[i];
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (prow[j] != 0) row[j] -= factor * prow[j];
      }
    }
    basis_[r] = c;
  }

  void erase_row(std::size_t r) {
    cells_.erase(cells_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

  // Runs the simplex on `costs` over columns [0, allowed). Returns false
  // when the objective is unbounded below.
  bool optimise(const std::vector<Rational>& costs, std::size_t allowed) {
    for (;;) {
      // Reduced costs d_j = c_j − Σ_i c_{B(i)} T_ij.
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < allowed && !entering; ++j) {
        bool in_basis = false;
        for (const auto b : basis_) in_basis = in_basis || b == j;
        if (in_basis) continue;
        Rational d = costs[j];
        for (std::size_t i = 0; i < rows(); ++i) {
          if (cells_[i][j] != 0) d -= costs[basis_[i]] * cells_[i][j];
        }
        if (d < 0) entering = j;
      }
      if (!entering) return true;
      const std::size_t c = *entering;
      std::optional<std::size_t> leave;
      Rational best_ratio;
      for (std::size_t i = 0; i < rows(); ++i) {
        if (cells_[i][c] <= 0) continue;
        Rational ratio = cells_[i][cols_] / cells_[i][c];
        if (!leave || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[*leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (!leave) return false;
      pivot(*leave, c);
    }
  }

  Rational objective_value(const std::vector<Rational>& costs) {
    Rational v(0);
    for (std::size_t i = 0; i < rows(); ++i) {
      v += costs[basis_[i]] * cells_[i][cols_];
    }
    return v;
  }

 private:
  std::vector<std::vector<Rational>> cells_;
  std::vector<std::size_t> basis_;
  std::size_t cols_;
};

}  // namespace

LpSolution solve_lp(const std::vector<Rational>& objective,
                    const std::vector<LinearConstraint>& constraints) {
  const std::size_t n = objective.size();
  const std::size_t m = constraints.size();

  // Normalise to rhs ≥ 0 and count auxiliary columns.
  std::vector<LinearConstraint> rows = constraints;
  std::size_t slack_count = 0, artificial_count = 0;
  for (auto& row : rows) {
    if (row.coefficients.size() != n) {
      throw std::invalid_argument("solve_lp: constraint width mismatch");
    }
    if (row.rhs < 0) {
      for (auto& a : row.coefficients) a = -a;
      row.rhs = -row.rhs;
      if (row.relation == Relation::LessEq) {
        row.relation = Relation::GreaterEq;
      } else if (row.relation == Relation::GreaterEq) {
        row.relation = Relation::LessEq;
      }
    }
    if (row.relation != Relation::Equal) ++slack_count;
    if (row.relation != Relation::LessEq) ++artificial_count;
  }

  const std::size_t first_art = n + slack_count;
  const std::size_t total = first_art + artificial_count;
  Tableau t(m, total);
  std::size_t next_slack = n, next_art = first_art;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = rows[i].coefficients[j];
    t.rhs(i) = rows[i].rhs;
    switch (rows[i].relation) {
      case Relation::LessEq:
        t.at(i, next_slack) = 1;
        t.basis()[i] = next_slack++;
        break;
      case Relation::GreaterEq:
        t.at(i, next_slack++) = -1;
        t.at(i, next_art) = 1;
        t.basis()[i] = next_art++;
        break;
      case Relation::Equal:
        t.at(i, next_art) = 1;
        t.basis()[i] = next_art++;
        break;
    }
  }

  LpSolution out;
  if (artificial_count > 0) {
    std::vector<Rational> phase1(total, Rational(0));
    for (std::size_t j = first_art; j < total; ++j) phase1[j] = 1;
    t.optimise(phase1, total);
    if (t.objective_value(phase1) != 0) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Drive zero-valued artificials out of the basis or drop their rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (t.basis()[i] < first_art) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < first_art && !col; ++j) {
        if (t.at(i, j) != 0) col = j;
      }
      if (col) {
        t.pivot(i, *col);
        ++i;
      } else {
        t.erase_row(i);
      }
    }
  }

  std::vector<Rational> phase2(total, Rational(0));
  for (std::size_t j = 0; j < n; ++j) phase2[j] = objective[j];
  if (!t.optimise(phase2, first_art)) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.value = t.objective_value(phase2);
  out.point.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.rows(); ++i) {
    if (t.basis()[i] < n) out.point[t.basis()[i]] = t.rhs(i);
  }
  return out;
}

}  // namespace afp
