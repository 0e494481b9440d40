#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "afp/domain.hpp"
#include "afp/kkm.hpp"

namespace afp {

/// A self-map together with the convex set it acts on.
struct NamedMap {
  std::string name;
  ConvexDomain domain;
  PointMap map;
  /// Triangle offset applied when a two-dimensional plugin acts on the fan Δ.
  std::uint64_t index_shift = 0;
};

/// Built-in maps on boxes: identity, half-step, square, contract, reflect
/// (all on [0,1]) and rotation90 on [0,1]².
const std::vector<std::string>& builtin_map_names();
/// Throws ConfigError for an unknown name.
NamedMap builtin_map(std::string_view name);

/// One branch of a piecewise-affine map: applies when every row satisfies
/// ⟨a, x⟩ ≤ b, and sends x to (⟨c_j, x⟩ + d_j)_j.
struct AffinePiece {
  std::vector<SparseVector> guard_normals;
  std::vector<Rational> guard_bounds;
  std::vector<SparseVector> linear;
  std::vector<Rational> offset;
};

/// Parses the plugin text format:
///
///     schema afp.piecewise/1
///     dimension 1
///     box 0 1
///     constraint x1 + x2 <= 1          (optional, repeatable)
///     piece x1 <= 1/2 => 2*x1          (guards separated by ';')
///     piece => 2 - 2*x1                (no guards: always applies)
///     index_shift 1                    (optional, read by Δ maps)
///
/// Outputs are comma separated, one affine expression per coordinate. The
/// first piece whose guards hold is used. Throws ConfigError.
NamedMap parse_piecewise_affine(std::string_view text, std::string name);
NamedMap load_piecewise_affine(const std::string& path);

/// "plugin:<path>" loads a plugin file; anything else is a built-in name.
NamedMap resolve_map(std::string_view spec);

}  // namespace afp
