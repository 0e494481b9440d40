#include "afp/domain.hpp"

#include <stdexcept>

namespace afp {

ConvexDomain::ConvexDomain(Kind kind, std::vector<Rational> lower,
                           std::vector<Rational> upper,
                           std::vector<SparseVector> normals,
                           std::vector<Rational> bounds)
    : kind_(kind),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      normals_(std::move(normals)),
      bounds_(std::move(bounds)) {
  if (lower_.size() != upper_.size() || lower_.empty()) {
    throw std::invalid_argument("ConvexDomain: bad bounding box");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (upper_[i] < lower_[i]) {
      throw std::invalid_argument("ConvexDomain: empty interval");
    }
  }
  if (normals_.size() != bounds_.size()) {
    throw std::invalid_argument("ConvexDomain: normals/bounds mismatch");
  }
}

ConvexDomain ConvexDomain::box(std::vector<Rational> lower,
                               std::vector<Rational> upper) {
  return ConvexDomain(Kind::Box, std::move(lower), std::move(upper), {}, {});
}

ConvexDomain ConvexDomain::unit_cube(std::size_t dimension) {
  return box(std::vector<Rational>(dimension, Rational(0)),
             std::vector<Rational>(dimension, Rational(1)));
}

ConvexDomain ConvexDomain::polytope(std::vector<SparseVector> normals,
                                    std::vector<Rational> bounds,
                                    std::vector<Rational> lower,
                                    std::vector<Rational> upper) {
  return ConvexDomain(Kind::Polytope, std::move(lower), std::move(upper),
                      std::move(normals), std::move(bounds));
}

bool ConvexDomain::contains(const SparseVector& x) const {
  if (!x.is_zero() && Index(dimension()) < x.max_index()) return false;
  const auto coords = x.to_dense(dimension());
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (coords[i] < lower_[i] || coords[i] > upper_[i]) return false;
  }
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    if (normals_[i].dot(x) > bounds_[i]) return false;
  }
  return true;
}

bool ConvexDomain::contains_in_interior(const SparseVector& x) const {
  if (!x.is_zero() && Index(dimension()) < x.max_index()) return false;
  const auto coords = x.to_dense(dimension());
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (coords[i] <= lower_[i] || coords[i] >= upper_[i]) return false;
  }
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    if (normals_[i].dot(x) >= bounds_[i]) return false;
  }
  return true;
}

std::vector<SparseVector> ConvexDomain::grid(std::size_t resolution) const {
  if (resolution == 0) throw std::invalid_argument("grid: resolution 0");
  const std::size_t d = dimension();
  std::vector<std::size_t> counter(d, 0);
  std::vector<SparseVector> out;
  const Rational res(static_cast<unsigned long>(resolution));
  for (;;) {
    std::vector<Rational> coords(d);
    for (std::size_t i = 0; i < d; ++i) {
      coords[i] = lower_[i] + (upper_[i] - lower_[i]) *
                                  Rational(static_cast<unsigned long>(counter[i])) /
                                  res;
    }
    SparseVector p = SparseVector::from_dense(coords);
    if (contains(p)) out.push_back(std::move(p));
    // Odometer with the last coordinate fastest.
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (++counter[axis] <= resolution) break;
      counter[axis] = 0;
      if (axis == 0) return out;
    }
  }
}

SparseVector ConvexDomain::box_centre() const {
  std::vector<Rational> c(dimension());
  for (std::size_t i = 0; i < dimension(); ++i) {
    c[i] = (lower_[i] + upper_[i]) / 2;
  }
  return SparseVector::from_dense(c);
}

}  // namespace afp
