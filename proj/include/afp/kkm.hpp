#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "afp/affine.hpp"
#include "afp/domain.hpp"
#include "afp/rational.hpp"
#include "afp/seminorm.hpp"
#include "afp/sparse_vector.hpp"

namespace afp {

using PointMap = MapDescriptor<SparseVector>;

/// Greedy cover of sampled f-values by open ρ-balls of radius ε/2.
struct NetCover {
  std::vector<SparseVector> centers;
  Rational radius;
  std::size_t samples_used = 0;
  /// For every sample, the index of a center within distance < radius.
  std::vector<std::size_t> assignment;
};

/// Each step picks the f-value whose ball covers the most uncovered
/// f-values (lowest sample index on ties), so centers are f-values.
NetCover build_net(const PointMap& f, std::span<const SparseVector> samples,
                   const PolyhedralSeminorm& rho, const Rational& epsilon);

struct AlmostConvexWitness {
  std::vector<SparseVector> z_points;
  SparseVector interior_anchor;
  Rational shrink;  // θ
};

/// z_i = (1 − θ)x_i + θ·anchor. With allow_zero_shrink and every center in
/// C this is θ = 0; otherwise θ starts at min(ε/(2·max ρ(x_i − anchor)), 1/2)
/// and is halved until every ρ(z_i − x_i) < ε/2 and every z_i ∈ C.
/// Throws AnchorOutsideC, or DomainEscape when no θ works.
AlmostConvexWitness almost_convex_witness(const NetCover& net,
                                          const ConvexDomain& C,
                                          const SparseVector& anchor,
                                          const PolyhedralSeminorm& rho,
                                          const Rational& epsilon,
                                          bool allow_zero_shrink = true);

/// Weights over the z-points; the carrier is the set of positive weights.
struct BarycentricPoint {
  std::vector<Rational> weights;

  std::vector<std::size_t> carrier() const;
  bool valid() const;
  SparseVector embed(std::span<const SparseVector> vertices) const;
  friend bool operator==(const BarycentricPoint&,
                         const BarycentricPoint&) = default;
};

/// Vertices λ/order of the edgewise subdivision of the simplex on
/// `vertex_count` points, where λ ranges over compositions of `order`.
class SubdivisionLattice {
 public:
  SubdivisionLattice(std::size_t vertex_count, std::uint64_t order);

  std::size_t vertex_count() const { return n_; }
  std::size_t dimension() const { return n_ - 1; }
  std::uint64_t order() const { return r_; }
  /// C(n − 1 + r, r).
  std::uint64_t size() const;

  /// All compositions in lexicographic order.
  std::vector<std::vector<std::uint64_t>> vertices() const;
  BarycentricPoint point(std::span<const std::uint64_t> lambda) const;

 private:
  std::size_t n_;
  std::uint64_t r_;
};

/// Lowest carrier index i with ρ(f(v) − x_i) ≥ ε/2, or nullopt when v is
/// unlabelable.
std::optional<std::size_t> kkm_label(const BarycentricPoint& v,
                                     const PointMap& f,
                                     const PolyhedralSeminorm& rho,
                                     const NetCover& net,
                                     const AlmostConvexWitness& witness);

struct Witness {
  BarycentricPoint barycentric;
  SparseVector point;
  Rational residual;  // ρ(f(x) − x)
  Rational epsilon;
  std::uint64_t order = 0;
  std::vector<std::size_t> carrier;

  /// Re-evaluates the residual and throws std::logic_error unless it is
  /// below ε and the point lies in C.
  static Witness certify(BarycentricPoint barycentric, SparseVector point,
                         const PointMap& f, const ConvexDomain& C,
                         const PolyhedralSeminorm& rho, const Rational& epsilon,
                         std::uint64_t order, std::vector<std::size_t> carrier);
};

struct KkmOptions {
  /// Grid resolution of the sampler over C.
  std::size_t resolution = 20;
  std::uint64_t max_order = 64;
  /// Interior anchor; defaults to the box centre.
  std::optional<SparseVector> anchor;
  bool allow_zero_shrink = true;
};

struct KkmResult {
  Witness witness;
  std::size_t net_size = 0;
  std::uint64_t lattice_vertices_scanned = 0;
  Rational shrink;
};

/// Scans lattice orders 1, 2, 4, … ≤ max_order for an unlabelable vertex.
/// Only carriers that are cliques of {i ~ j : ρ(x_i − x_j) < ε} are
/// visited: an unlabelable vertex has every pair of its carrier centers
/// within ε of each other through f(v). Within an order, carriers go by
/// size then lexicographically and compositions lexicographically;
/// vertices already seen at half the order are skipped.
/// Throws DepthExhausted(max_order).
KkmResult find_epsilon_fixed_point(const PointMap& f, const ConvexDomain& C,
                                   const PolyhedralSeminorm& rho,
                                   const Rational& epsilon,
                                   const KkmOptions& options = {});

/// Label of a lattice vertex λ (0-based over vertex_count), or nullopt.
using SpernerLabeling =
    std::function<std::optional<std::size_t>(std::span<const std::uint64_t>)>;

/// One cell of the edgewise subdivision, as its d + 1 lattice vertices.
using SpernerCell = std::vector<std::vector<std::uint64_t>>;

/// Every cell of the order-r edgewise subdivision. There are r^d of them.
std::vector<SpernerCell> subdivision_cells(const SubdivisionLattice& lattice);

/// Cells whose vertices carry all n labels. Throws ImproperLabeling when a
/// vertex has no label or a label outside its carrier.
std::vector<SpernerCell> sperner_fully_labeled(const SubdivisionLattice& lattice,
                                               const SpernerLabeling& labeling);

struct GridMinimum {
  SparseVector point;
  Rational residual;
};

/// Exact argmin of ρ(x − f(x)) over the grid (first point on ties).
GridMinimum grid_oracle_min_displacement(const PointMap& f,
                                         std::span<const SparseVector> grid,
                                         const PolyhedralSeminorm& rho);

}  // namespace afp
