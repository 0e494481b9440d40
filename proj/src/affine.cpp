#include "afp/affine.hpp"

#include <map>

namespace afp {

std::optional<ClusterResult> cluster_fixed_point(
    const MapDescriptor<SparseVector>& f, std::span<const SparseVector> sequence,
    const ConvexDomain& box, const PolyhedralSeminorm& rho,
    const Rational& tolerance, std::size_t max_depth) {
  const std::size_t d = box.dimension();
  std::vector<Rational> lower = box.lower();
  std::vector<Rational> upper = box.upper();

  std::vector<std::size_t> retained;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (box.contains(sequence[i])) retained.push_back(i);
  }

  auto accept = [&](const SparseVector& x,
                    std::size_t depth) -> std::optional<ClusterResult> {
    if (!f.contains(x)) return std::nullopt;
    Rational r = rho(f(x) - x);
    if (r <= tolerance) return ClusterResult{x, std::move(r), depth};
    return std::nullopt;
  };

  for (std::size_t depth = 0;; ++depth) {
    if (retained.empty()) return std::nullopt;
    if (auto hit = accept(sequence[retained.back()], depth)) return hit;
    std::vector<Rational> centre(d);
    for (std::size_t a = 0; a < d; ++a) centre[a] = (lower[a] + upper[a]) / 2;
    if (auto hit = accept(SparseVector::from_dense(centre), depth)) return hit;
    if (depth == max_depth) return std::nullopt;

    // Child code: bit a set when coordinate a lies strictly above the middle.
    std::map<std::uint64_t, std::vector<std::size_t>> children;
    for (const std::size_t i : retained) {
      const auto coords = sequence[i].to_dense(d);
      std::uint64_t code = 0;
      for (std::size_t a = 0; a < d; ++a) {
        if (coords[a] > centre[a]) code |= std::uint64_t{1} << a;
      }
      children[code].push_back(i);
    }
    auto best = children.begin();
    for (auto it = children.begin(); it != children.end(); ++it) {
      const auto& cur = it->second;
      const auto& top = best->second;
      if (cur.size() > top.size() ||
          (cur.size() == top.size() && cur.back() > top.back())) {
        best = it;
      }
    }
    for (std::size_t a = 0; a < d; ++a) {
      if (best->first >> a & 1) {
        lower[a] = centre[a];
      } else {
        upper[a] = centre[a];
      }
    }
    retained = std::move(best->second);
  }
}

}  // namespace afp
