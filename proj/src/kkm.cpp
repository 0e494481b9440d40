#include "afp/kkm.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "afp/errors.hpp"

namespace afp {

NetCover build_net(const PointMap& f, std::span<const SparseVector> samples,
                   const PolyhedralSeminorm& rho, const Rational& epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("build_net: epsilon <= 0");
  NetCover net;
  net.radius = epsilon / 2;
  net.samples_used = samples.size();

  // Distinct f-values, remembering which sample produced each first.
  std::vector<SparseVector> values;
  std::vector<std::size_t> value_of_sample(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    SparseVector fx = f(samples[s]);
    if (!f.contains(fx)) {
      throw DomainEscape(f.name + ": image of sample " + std::to_string(s) +
                         " left the domain");
    }
    const auto it = std::find(values.begin(), values.end(), fx);
    value_of_sample[s] = static_cast<std::size_t>(it - values.begin());
    if (it == values.end()) values.push_back(std::move(fx));
  }

  const std::size_t u = values.size();
  std::vector<std::vector<std::size_t>> covers(u);
  for (std::size_t a = 0; a < u; ++a) {
    for (std::size_t b = 0; b < u; ++b) {
      if (a == b || rho.distance(values[a], values[b]) < net.radius) {
        covers[a].push_back(b);
      }
    }
  }

  std::vector<std::ptrdiff_t> center_of(u, -1);
  std::size_t uncovered = u;
  while (uncovered > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t a = 0; a < u; ++a) {
      std::size_t gain = 0;
      for (const std::size_t b : covers[a]) gain += center_of[b] < 0;
      if (gain > best_gain) {
        best = a;
        best_gain = gain;
      }
    }
    const auto id = static_cast<std::ptrdiff_t>(net.centers.size());
    net.centers.push_back(values[best]);
    for (const std::size_t b : covers[best]) {
      if (center_of[b] < 0) {
        center_of[b] = id;
        --uncovered;
      }
    }
  }

  net.assignment.resize(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    net.assignment[s] = static_cast<std::size_t>(center_of[value_of_sample[s]]);
  }
  return net;
}

AlmostConvexWitness almost_convex_witness(const NetCover& net,
                                          const ConvexDomain& C,
                                          const SparseVector& anchor,
                                          const PolyhedralSeminorm& rho,
                                          const Rational& epsilon,
                                          bool allow_zero_shrink) {
  if (!C.contains(anchor)) throw AnchorOutsideC("anchor is not in C");
  const Rational half = epsilon / 2;
  AlmostConvexWitness w;
  w.interior_anchor = anchor;

  const bool all_inside =
      std::all_of(net.centers.begin(), net.centers.end(),
                  [&](const SparseVector& x) { return C.contains(x); });
  if (allow_zero_shrink && all_inside) {
    w.shrink = 0;
    w.z_points = net.centers;
    return w;
  }

  Rational spread(0);
  for (const auto& x : net.centers) spread = max_of(spread, rho(x - anchor));
  Rational theta = ratio(1, 2);
  if (spread > 0) theta = min_of(epsilon / (2 * spread), theta);

  for (int attempt = 0; attempt < 256; ++attempt, theta /= 2) {
    std::vector<SparseVector> z;
    z.reserve(net.centers.size());
    bool ok = true;
    for (const auto& x : net.centers) {
      SparseVector zi = lerp(x, anchor, theta);
      if (!(rho(zi - x) < half) || !C.contains(zi)) {
        ok = false;
        break;
      }
      z.push_back(std::move(zi));
    }
    if (ok) {
      w.shrink = theta;
      w.z_points = std::move(z);
      return w;
    }
  }
  throw DomainEscape("almost_convex_witness: no shrink keeps the net in C");
}

std::vector<std::size_t> BarycentricPoint::carrier() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0) out.push_back(i);
  }
  return out;
}

bool BarycentricPoint::valid() const {
  Rational total(0);
  for (const auto& w : weights) {
    if (w < 0) return false;
    total += w;
  }
  return total == 1;
}

SparseVector BarycentricPoint::embed(
    std::span<const SparseVector> vertices) const {
  if (vertices.size() != weights.size()) {
    throw std::invalid_argument("BarycentricPoint: vertex count mismatch");
  }
  SparseVector out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != 0) out += vertices[i] * weights[i];
  }
  return out;
}

SubdivisionLattice::SubdivisionLattice(std::size_t vertex_count,
                                       std::uint64_t order)
    : n_(vertex_count), r_(order) {
  if (n_ < 1) throw std::invalid_argument("SubdivisionLattice: no vertices");
  if (r_ < 1) throw std::invalid_argument("SubdivisionLattice: order < 1");
}

std::uint64_t SubdivisionLattice::size() const {
  // C(n − 1 + r, n − 1), built incrementally so every quotient is exact.
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i < n_; ++i) {
    c = c * (r_ + i) / i;
  }
  return static_cast<std::uint64_t>(c);
}

namespace {

// Calls visit(λ) for every composition of `total` into `parts` parts, each
// at least `minimum`, in lexicographic order. Stops when visit returns false.
template <class Visit>
bool for_each_composition(std::size_t parts, std::uint64_t total,
                          std::uint64_t minimum, Visit&& visit) {
  std::vector<std::uint64_t> lambda(parts, 0);
  if (parts * minimum > total) return true;
  // Recursive fill of position p with the remainder still to place.
  auto fill = [&](auto&& self, std::size_t p, std::uint64_t left) -> bool {
    if (p + 1 == parts) {
      lambda[p] = left;
      return visit(static_cast<const std::vector<std::uint64_t>&>(lambda));
    }
    const std::uint64_t reserve = minimum * (parts - p - 1);
    for (std::uint64_t v = minimum; v + reserve <= left; ++v) {
      lambda[p] = v;
      if (!self(self, p + 1, left - v)) return false;
    }
    return true;
  };
  return fill(fill, 0, total);
}

}  // namespace

std::vector<std::vector<std::uint64_t>> SubdivisionLattice::vertices() const {
  std::vector<std::vector<std::uint64_t>> out;
  for_each_composition(n_, r_, 0, [&](const std::vector<std::uint64_t>& l) {
    out.push_back(l);
    return true;
  });
  return out;
}

BarycentricPoint SubdivisionLattice::point(
    std::span<const std::uint64_t> lambda) const {
  if (lambda.size() != n_) {
    throw std::invalid_argument("SubdivisionLattice: wrong vertex arity");
  }
  BarycentricPoint p;
  p.weights.reserve(n_);
  std::uint64_t total = 0;
  for (const auto l : lambda) {
    total += l;
    p.weights.push_back(ratio(static_cast<std::int64_t>(l),
                              static_cast<std::int64_t>(r_)));
  }
  if (total != r_) throw std::invalid_argument("SubdivisionLattice: bad sum");
  return p;
}

std::optional<std::size_t> kkm_label(const BarycentricPoint& v,
                                     const PointMap& f,
                                     const PolyhedralSeminorm& rho,
                                     const NetCover& net,
                                     const AlmostConvexWitness& witness) {
  const SparseVector x = v.embed(witness.z_points);
  const SparseVector fx = f(x);
  for (const std::size_t i : v.carrier()) {
    if (rho(fx - net.centers[i]) >= net.radius) return i;
  }
  return std::nullopt;
}

Witness Witness::certify(BarycentricPoint barycentric, SparseVector point,
                         const PointMap& f, const ConvexDomain& C,
                         const PolyhedralSeminorm& rho, const Rational& epsilon,
                         std::uint64_t order, std::vector<std::size_t> carrier) {
  if (!C.contains(point)) {
    throw std::logic_error("Witness: point is outside C");
  }
  Rational residual = rho(f(point) - point);
  if (!(residual < epsilon)) {
    throw std::logic_error("Witness: residual " + to_string(residual) +
                           " is not below epsilon " + to_string(epsilon));
  }
  return Witness{std::move(barycentric), std::move(point), std::move(residual),
                 epsilon, order, std::move(carrier)};
}

KkmResult find_epsilon_fixed_point(const PointMap& f, const ConvexDomain& C,
                                   const PolyhedralSeminorm& rho,
                                   const Rational& epsilon,
                                   const KkmOptions& options) {
  if (epsilon <= 0) throw std::invalid_argument("kkm: epsilon <= 0");
  if (options.max_order < 1) throw DepthExhausted(options.max_order);

  const auto samples = C.grid(options.resolution);
  if (samples.empty()) throw std::invalid_argument("kkm: empty sample grid");
  const NetCover net = build_net(f, samples, rho, epsilon);
  const SparseVector anchor = options.anchor.value_or(C.box_centre());
  const AlmostConvexWitness az = almost_convex_witness(
      net, C, anchor, rho, epsilon, options.allow_zero_shrink);

  const std::size_t n = net.centers.size();
  std::vector<std::vector<bool>> close(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      close[i][j] = close[j][i] =
          rho.distance(net.centers[i], net.centers[j]) < epsilon;
    }
  }

  // Cliques grouped by size, each group in lexicographic order.
  std::vector<std::vector<std::vector<std::size_t>>> cliques(1);
  for (std::size_t i = 0; i < n; ++i) cliques[0].push_back({i});
  while (!cliques.back().empty()) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& c : cliques.back()) {
      for (std::size_t j = c.back() + 1; j < n; ++j) {
        if (std::all_of(c.begin(), c.end(),
                        [&](std::size_t i) { return close[i][j]; })) {
          auto e = c;
          e.push_back(j);
          next.push_back(std::move(e));
        }
      }
    }
    cliques.push_back(std::move(next));
  }

  KkmResult result;
  result.net_size = n;
  result.shrink = az.shrink;
  std::optional<Witness> found;
  for (std::uint64_t r = 1; r <= options.max_order && !found; r *= 2) {
    for (const auto& group : cliques) {
      if (found) break;
      for (const auto& carrier : group) {
        if (carrier.size() > r) break;
        for_each_composition(
            carrier.size(), r, 1, [&](const std::vector<std::uint64_t>& l) {
              if (r > 1 && std::all_of(l.begin(), l.end(), [](std::uint64_t v) {
                    return v % 2 == 0;
                  })) {
                return true;
              }
              BarycentricPoint v;
              v.weights.assign(n, Rational(0));
              for (std::size_t t = 0; t < carrier.size(); ++t) {
                v.weights[carrier[t]] = ratio(static_cast<std::int64_t>(l[t]),
                                              static_cast<std::int64_t>(r));
              }
              ++result.lattice_vertices_scanned;
              if (kkm_label(v, f, rho, net, az)) return true;
              SparseVector x = v.embed(az.z_points);
              found = Witness::certify(std::move(v), std::move(x), f, C, rho,
                                       epsilon, r, carrier);
              return false;
            });
        if (found) break;
      }
    }
    if (r > options.max_order / 2) break;
  }
  if (!found) throw DepthExhausted(options.max_order);
  result.witness = std::move(*found);
  return result;
}

std::vector<SpernerCell> subdivision_cells(const SubdivisionLattice& lattice) {
  const std::size_t d = lattice.dimension();
  const std::uint64_t r = lattice.order();
  std::vector<SpernerCell> cells;
  if (d == 0) {
    cells.push_back({{r}});
    return cells;
  }
  // Cumulative coordinates y_i = λ_1 + … + λ_i satisfy 0 ≤ y_1 ≤ … ≤ y_d ≤ r.
  // The Kuhn simplices of the unit cubes inside that region are the cells.
  auto to_lambda = [&](const std::vector<std::uint64_t>& y) {
    std::vector<std::uint64_t> lambda(d + 1);
    lambda[0] = y[0];
    for (std::size_t i = 1; i < d; ++i) lambda[i] = y[i] - y[i - 1];
    lambda[d] = r - y[d - 1];
    return lambda;
  };
  auto inside = [&](const std::vector<std::uint64_t>& y) {
    for (std::size_t i = 1; i < d; ++i) {
      if (y[i] < y[i - 1]) return false;
    }
    return y[d - 1] <= r;
  };

  std::vector<std::uint64_t> base(d, 0);
  std::vector<std::size_t> perm(d);
  for (;;) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      SpernerCell cell;
      std::vector<std::uint64_t> y = base;
      bool ok = inside(y);
      if (ok) cell.push_back(to_lambda(y));
      for (std::size_t s = 0; s < d && ok; ++s) {
        ++y[perm[s]];
        ok = inside(y);
        if (ok) cell.push_back(to_lambda(y));
      }
      if (ok) cells.push_back(std::move(cell));
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (++base[axis] < r) break;
      base[axis] = 0;
      if (axis == 0) return cells;
    }
  }
}

std::vector<SpernerCell> sperner_fully_labeled(const SubdivisionLattice& lattice,
                                               const SpernerLabeling& labeling) {
  const std::size_t n = lattice.vertex_count();
  std::map<std::vector<std::uint64_t>, std::size_t> labels;
  auto label_of = [&](const std::vector<std::uint64_t>& lambda) {
    if (auto it = labels.find(lambda); it != labels.end()) return it->second;
    const auto l = labeling(lambda);
    if (!l) throw ImproperLabeling("vertex without a label");
    if (*l >= n || lambda[*l] == 0) {
      throw ImproperLabeling("label " + std::to_string(*l) +
                             " is outside the carrier of its vertex");
    }
    labels.emplace(lambda, *l);
    return *l;
  };
  // Check every vertex, including ones that happen to lie in no counted cell.
  for (const auto& v : lattice.vertices()) label_of(v);

  std::vector<SpernerCell> out;
  for (auto& cell : subdivision_cells(lattice)) {
    std::vector<bool> seen(n, false);
    std::size_t distinct = 0;
    for (const auto& v : cell) {
      const std::size_t l = label_of(v);
      if (!seen[l]) {
        seen[l] = true;
        ++distinct;
      }
    }
    if (distinct == n) out.push_back(std::move(cell));
  }
  return out;
}

GridMinimum grid_oracle_min_displacement(const PointMap& f,
                                         std::span<const SparseVector> grid,
                                         const PolyhedralSeminorm& rho) {
  if (grid.empty()) throw std::invalid_argument("grid oracle: empty grid");
  std::optional<GridMinimum> best;
  for (const auto& x : grid) {
    Rational r = rho(x - f(x));
    if (!best || r < best->residual) best = GridMinimum{x, std::move(r)};
  }
  return *best;
}

}  // namespace afp
