#pragma once

#include <string>
#include <vector>

#include "afp/rational.hpp"
#include "afp/sparse_vector.hpp"

namespace afp {

/// Convex subset of ℚ^d with exactly decidable membership: a box, or a
/// polytope {x : ⟨a_i, x⟩ ≤ b_i} clipped to a bounding box. Points are
/// SparseVectors over coordinates 1..d.
class ConvexDomain {
 public:
  enum class Kind { Box, Polytope };

  static ConvexDomain box(std::vector<Rational> lower,
                          std::vector<Rational> upper);
  static ConvexDomain unit_cube(std::size_t dimension);
  static ConvexDomain polytope(std::vector<SparseVector> normals,
                               std::vector<Rational> bounds,
                               std::vector<Rational> lower,
                               std::vector<Rational> upper);

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return lower_.size(); }
  const std::vector<Rational>& lower() const { return lower_; }
  const std::vector<Rational>& upper() const { return upper_; }
  const std::vector<SparseVector>& normals() const { return normals_; }
  const std::vector<Rational>& bounds() const { return bounds_; }

  bool contains(const SparseVector& x) const;
  /// True when every inequality (box faces included) is strict at x.
  bool contains_in_interior(const SparseVector& x) const;

  /// Points lower + (upper − lower)·i/resolution of the bounding box that lie
  /// in the domain, in lexicographic order of the grid multi-index.
  std::vector<SparseVector> grid(std::size_t resolution) const;
  SparseVector box_centre() const;

 private:
  ConvexDomain(Kind kind, std::vector<Rational> lower,
               std::vector<Rational> upper, std::vector<SparseVector> normals,
               std::vector<Rational> bounds);

  Kind kind_;
  std::vector<Rational> lower_, upper_;
  std::vector<SparseVector> normals_;
  std::vector<Rational> bounds_;
};

}  // namespace afp
