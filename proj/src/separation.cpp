#include "afp/separation.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "afp/errors.hpp"
#include "afp/linear_program.hpp"

namespace afp {

namespace {

std::vector<Index> joint_support(const SparseVector& x,
                                 std::span<const SparseVector> basis) {
  std::vector<Index> support;
  for (const auto& e : x.entries()) support.push_back(e.index);
  for (const auto& b : basis) {
    for (const auto& e : b.entries()) support.push_back(e.index);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  return support;
}

}  // namespace

SpanDistance distance_to_span_certified(const PolyhedralSeminorm& rho,
                                        const SparseVector& x,
                                        std::span<const SparseVector> basis) {
  for (const auto& b : basis) {
    if (!b.is_zero() && rho(b) == 0) {
      throw UnboundedBasis(
          "distance_to_span: basis vector with zero seminorm: " +
          to_string(b));
    }
  }
  const std::size_t m = basis.size();
  if (m == 0) return {rho(x), {}};

  // Each functional a_j contributes h_j = ⟨a_j, x⟩ and g_ji = ⟨a_j, b_i⟩.
  std::vector<SparseVector> functionals;
  if (rho.kind() == PolyhedralSeminorm::Kind::MaxOfFunctionals) {
    functionals = rho.functionals();
  } else {
    for (const auto& s : joint_support(x, basis)) {
      functionals.push_back(SparseVector::unit(s));
    }
  }
  const bool per_coordinate = rho.kind() == PolyhedralSeminorm::Kind::L1;
  const std::size_t k = functionals.size();
  const std::size_t bound_vars = per_coordinate ? k : 1;
  const std::size_t width = 2 * m + bound_vars;

  std::vector<Rational> objective(width, Rational(0));
  for (std::size_t v = 0; v < bound_vars; ++v) objective[2 * m + v] = 1;

  std::vector<LinearConstraint> rows;
  rows.reserve(2 * k);
  for (std::size_t j = 0; j < k; ++j) {
    const Rational h = functionals[j].dot(x);
    std::vector<Rational> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = functionals[j].dot(basis[i]);
    const std::size_t bound = 2 * m + (per_coordinate ? j : 0);
    for (int sign : {+1, -1}) {
      // sign·(h − Σβ_i g_i) ≤ bound  ⇔  −sign·Σ(p_i − q_i) g_i − bound ≤ −sign·h
      LinearConstraint row;
      row.coefficients.assign(width, Rational(0));
      for (std::size_t i = 0; i < m; ++i) {
        row.coefficients[2 * i] = -sign * g[i];
        row.coefficients[2 * i + 1] = sign * g[i];
      }
      row.coefficients[bound] = -1;
      row.relation = Relation::LessEq;
      row.rhs = -sign * h;
      rows.push_back(std::move(row));
    }
  }

  const LpSolution lp = solve_lp(objective, rows);
  if (lp.status != LpStatus::Optimal) {
    throw std::logic_error("distance_to_span: LP not optimal");
  }
  SpanDistance out;
  out.distance = lp.value;
  out.coefficients.resize(m);
  SparseVector residual = x;
  for (std::size_t i = 0; i < m; ++i) {
    out.coefficients[i] = lp.point[2 * i] - lp.point[2 * i + 1];
    residual -= basis[i] * out.coefficients[i];
  }
  if (rho(residual) != out.distance) {
    throw std::logic_error("distance_to_span: certificate mismatch");
  }
  return out;
}

PointStream stream_of(std::vector<SparseVector> points) {
  auto data = std::make_shared<std::vector<SparseVector>>(std::move(points));
  auto cursor = std::make_shared<std::size_t>(0);
  return [data, cursor]() -> std::optional<SparseVector> {
    if (*cursor >= data->size()) return std::nullopt;
    return (*data)[(*cursor)++];
  };
}

PointStream basis_stream() {
  auto next = std::make_shared<std::uint64_t>(1);
  return [next]() -> std::optional<SparseVector> {
    return SparseVector::unit(Index((*next)++));
  };
}

std::vector<SparseVector> greedy_separated_sequence(
    const PointStream& stream, const PolyhedralSeminorm& rho0,
    const Rational& delta, std::size_t limit) {
  if (delta <= 0) throw std::invalid_argument("separation: delta must be > 0");
  std::vector<SparseVector> kept;
  for (std::size_t consumed = 0; consumed < limit; ++consumed) {
    auto next = stream();
    if (!next) break;
    const bool separated =
        std::all_of(kept.begin(), kept.end(), [&](const SparseVector& y) {
          return rho0.distance(*next, y) > delta;
        });
    if (separated) kept.push_back(std::move(*next));
  }
  return kept;
}

std::vector<SparseVector> span_separated_sequence(
    const PointStream& stream, const PolyhedralSeminorm& rho0,
    const Rational& delta, std::size_t limit) {
  if (delta <= 0) throw std::invalid_argument("separation: delta must be > 0");
  std::vector<SparseVector> kept;
  for (std::size_t consumed = 0; consumed < limit; ++consumed) {
    auto next = stream();
    if (!next) break;
    if (distance_to_span(rho0, *next, kept) > delta) {
      kept.push_back(std::move(*next));
    }
  }
  return kept;
}

bool is_span_separated(std::span<const SparseVector> points,
                       const PolyhedralSeminorm& rho0, const Rational& delta) {
  for (std::size_t n = 0; n < points.size(); ++n) {
    if (distance_to_span(rho0, points[n], points.first(n)) <= delta) {
      return false;
    }
  }
  return true;
}

}  // namespace afp
