#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "afp/domain.hpp"
#include "afp/measure.hpp"
#include "afp/rational.hpp"
#include "afp/seminorm.hpp"
#include "afp/sparse_vector.hpp"

namespace afp {

using Json = nlohmann::ordered_json;

/// "p/q" string plus nothing else; floats never round-trip into values.
Json rational_to_json(const Rational& value);
/// Accepts "p/q", decimal strings or JSON integers. Throws ConfigError.
Rational rational_from_json(const Json& value, std::string_view what);

/// {"<index>": "p/q", ...} in increasing index order.
Json vector_to_json(const SparseVector& v);
SparseVector vector_from_json(const Json& value, std::string_view what);

/// {"schema": "afp.seminorm/1", "kind": "l1" | "linf" | "max",
///  "functionals": [vector, ...]}.
Json seminorm_to_json(const PolyhedralSeminorm& rho);
PolyhedralSeminorm seminorm_from_json(const Json& value);

/// {"schema": "afp.domain/1", "lower": [...], "upper": [...],
///  "constraints": [{"normal": vector, "bound": "p/q"}, ...]}.
Json domain_to_json(const ConvexDomain& C);
ConvexDomain domain_from_json(const Json& value);

/// {"schema": "afp.measure/1", "atoms": vector, "diffuse": "p/q"}.
Json measure_to_json(const FiniteMeasureModel& mu);
FiniteMeasureModel measure_from_json(const Json& value);

/// Throws ConfigError naming the first key of `object` not in `allowed`.
void reject_unknown_keys(const Json& object,
                         std::initializer_list<std::string_view> allowed,
                         std::string_view where);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace afp
