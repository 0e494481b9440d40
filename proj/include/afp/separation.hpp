#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "afp/rational.hpp"
#include "afp/seminorm.hpp"
#include "afp/sparse_vector.hpp"

namespace afp {

/// Optimal value of the distance LP together with the minimising
/// combination, so callers can re-check ρ(x − Σβ_i b_i) == distance.
struct SpanDistance {
  Rational distance;
  std::vector<Rational> coefficients;
};

/// inf over real β of ρ(x − Σ β_i b_i), solved as an exact LP over the
/// coordinates touched by x and the basis.
///
/// Throws UnboundedBasis when some nonzero b_i has ρ(b_i) = 0: the LP still
/// has a finite optimum, but the minimiser is not unique along b_i and we
/// report that rather than pick one.
SpanDistance distance_to_span_certified(const PolyhedralSeminorm& rho,
                                        const SparseVector& x,
                                        std::span<const SparseVector> basis);

inline Rational distance_to_span(const PolyhedralSeminorm& rho,
                                 const SparseVector& x,
                                 std::span<const SparseVector> basis) {
  return distance_to_span_certified(rho, x, basis).distance;
}

/// Pull-style point source; std::nullopt ends the stream.
using PointStream = std::function<std::optional<SparseVector>()>;

PointStream stream_of(std::vector<SparseVector> points);
/// e_1, e_2, e_3, ...
PointStream basis_stream();

/// Greedy δ-separated subsequence: a point is kept when its ρ0-distance to
/// every kept point exceeds δ. Consumes at most `limit` stream items.
std::vector<SparseVector> greedy_separated_sequence(
    const PointStream& stream, const PolyhedralSeminorm& rho0,
    const Rational& delta, std::size_t limit);

/// Greedy subsequence with ρ0(x_1) > δ and
/// dist_ρ0(x_{n+1}, span{x_1..x_n}) > δ. Consumes at most `limit` items.
std::vector<SparseVector> span_separated_sequence(
    const PointStream& stream, const PolyhedralSeminorm& rho0,
    const Rational& delta, std::size_t limit);

/// Re-checks the two span-separation conditions from scratch.
bool is_span_separated(std::span<const SparseVector> points,
                       const PolyhedralSeminorm& rho0, const Rational& delta);

}  // namespace afp
