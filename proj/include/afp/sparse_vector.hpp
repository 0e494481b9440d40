#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "afp/index.hpp"
#include "afp/rational.hpp"

namespace afp {

/// Finitely supported exact-rational sequence (an element of c00 ⊂ ℓ1).
///
/// Entries are kept sorted by index with no stored zeros, so equality is
/// structural and every norm is an exact finite sum.
class SparseVector {
 public:
  struct Entry {
    Index index;
    Rational value;
  };

  SparseVector() = default;
  SparseVector(std::initializer_list<std::pair<Index, Rational>> entries);

  /// Builds from arbitrary (index, value) pairs; duplicates are summed and
  /// zeros dropped.
  static SparseVector from_unsorted(std::vector<Entry> entries);
  /// Builds from entries already strictly increasing in index and nonzero.
  static SparseVector from_sorted_unchecked(std::vector<Entry> entries);
  /// Coordinates 1..values.size().
  static SparseVector from_dense(std::span<const Rational> values);
  static SparseVector unit(const Index& n);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  Rational get(const Index& n) const;
  void set(const Index& n, const Rational& value);
  void add_to(const Index& n, const Rational& value);

  /// Dense view of coordinates 1..dimension.
  std::vector<Rational> to_dense(std::size_t dimension) const;

  Rational l1_norm() const;
  Rational linf_norm() const;
  Rational sum() const;
  Rational dot(const SparseVector& other) const;
  /// Largest stored index; zero for the zero vector.
  Index max_index() const;
  bool is_nonnegative() const;

  SparseVector& operator+=(const SparseVector& other);
  SparseVector& operator-=(const SparseVector& other);
  SparseVector& operator*=(const Rational& scale);

  friend SparseVector operator+(const SparseVector& a, const SparseVector& b);
  friend SparseVector operator-(const SparseVector& a, const SparseVector& b);
  friend SparseVector operator-(const SparseVector& a);
  friend SparseVector operator*(const SparseVector& a, const Rational& t);
  friend SparseVector operator*(const Rational& t, const SparseVector& a);
  friend bool operator==(const SparseVector& a, const SparseVector& b);

 private:
  std::vector<Entry> entries_;
};

/// ‖a − b‖₁ without materialising the difference.
Rational l1_distance(const SparseVector& a, const SparseVector& b);

/// (1−t)·a + t·b.
SparseVector lerp(const SparseVector& a, const SparseVector& b,
                  const Rational& t);

std::string to_string(const SparseVector& v);

}  // namespace afp
