#include "afp/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "afp/errors.hpp"

namespace afp {

Json rational_to_json(const Rational& value) { return to_string(value); }

Rational rational_from_json(const Json& value, std::string_view what) {
  try {
    if (value.is_number_integer()) {
      return Rational(value.get<std::int64_t>());
    }
    if (value.is_string()) return parse_rational(value.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
  throw ConfigError(std::string(what) + ": expected a \"p/q\" string");
}

Json vector_to_json(const SparseVector& v) {
  Json out = Json::object();
  for (const auto& e : v.entries()) {
    out[e.index.to_string()] = to_string(e.value);
  }
  return out;
}

SparseVector vector_from_json(const Json& value, std::string_view what) {
  if (!value.is_object()) {
    throw ConfigError(std::string(what) + ": expected {\"index\": \"p/q\"}");
  }
  std::vector<SparseVector::Entry> entries;
  for (const auto& [key, v] : value.items()) {
    Index index;
    try {
      index = Index::parse(key);
    } catch (const std::exception& e) {
      throw ConfigError(std::string(what) + ": bad index '" + key + "'");
    }
    if (index.is_zero()) {
      throw ConfigError(std::string(what) + ": indices start at 1");
    }
    entries.push_back({index, rational_from_json(v, what)});
  }
  return SparseVector::from_unsorted(std::move(entries));
}

Json seminorm_to_json(const PolyhedralSeminorm& rho) {
  Json out;
  out["schema"] = "afp.seminorm/1";
  out["kind"] = rho.name();
  if (rho.kind() == PolyhedralSeminorm::Kind::MaxOfFunctionals) {
    Json fs = Json::array();
    for (const auto& f : rho.functionals()) fs.push_back(vector_to_json(f));
    out["functionals"] = fs;
  }
  return out;
}

PolyhedralSeminorm seminorm_from_json(const Json& value) {
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "l1") return PolyhedralSeminorm::l1();
    if (s == "linf") return PolyhedralSeminorm::linf();
    throw ConfigError("unknown seminorm '" + s + "'");
  }
  if (!value.is_object()) throw ConfigError("seminorm: expected an object");
  reject_unknown_keys(value, {"schema", "kind", "functionals"}, "seminorm");
  if (value.value("schema", "") != "afp.seminorm/1") {
    throw ConfigError("seminorm: schema must be afp.seminorm/1");
  }
  const std::string kind = value.value("kind", "");
  if (kind == "l1") return PolyhedralSeminorm::l1();
  if (kind == "linf") return PolyhedralSeminorm::linf();
  if (kind != "max") throw ConfigError("seminorm: unknown kind '" + kind + "'");
  if (!value.contains("functionals") || !value["functionals"].is_array() ||
      value["functionals"].empty()) {
    throw ConfigError("seminorm: 'max' needs a non-empty functionals list");
  }
  std::vector<SparseVector> fs;
  for (const auto& f : value["functionals"]) {
    fs.push_back(vector_from_json(f, "seminorm functional"));
  }
  return PolyhedralSeminorm::max_of(std::move(fs));
}

namespace {

std::vector<Rational> rational_list(const Json& value, std::string_view what) {
  if (!value.is_array()) throw ConfigError(std::string(what) + ": expected a list");
  std::vector<Rational> out;
  for (const auto& v : value) out.push_back(rational_from_json(v, what));
  return out;
}

}  // namespace

Json domain_to_json(const ConvexDomain& C) {
  Json out;
  out["schema"] = "afp.domain/1";
  Json lo = Json::array(), hi = Json::array();
  for (const auto& v : C.lower()) lo.push_back(to_string(v));
  for (const auto& v : C.upper()) hi.push_back(to_string(v));
  out["lower"] = lo;
  out["upper"] = hi;
  Json rows = Json::array();
  for (std::size_t i = 0; i < C.normals().size(); ++i) {
    rows.push_back({{"normal", vector_to_json(C.normals()[i])},
                    {"bound", to_string(C.bounds()[i])}});
  }
  out["constraints"] = rows;
  return out;
}

ConvexDomain domain_from_json(const Json& value) {
  if (!value.is_object()) throw ConfigError("domain: expected an object");
  reject_unknown_keys(value, {"schema", "lower", "upper", "constraints"},
                      "domain");
  if (value.value("schema", "") != "afp.domain/1") {
    throw ConfigError("domain: schema must be afp.domain/1");
  }
  if (!value.contains("lower") || !value.contains("upper")) {
    throw ConfigError("domain: needs lower and upper");
  }
  auto lower = rational_list(value["lower"], "domain lower");
  auto upper = rational_list(value["upper"], "domain upper");
  if (lower.empty() || lower.size() != upper.size()) {
    throw ConfigError("domain: lower and upper must have the same positive length");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw ConfigError("domain: lower > upper");
  }
  std::vector<SparseVector> normals;
  std::vector<Rational> bounds;
  if (value.contains("constraints")) {
    for (const auto& row : value["constraints"]) {
      reject_unknown_keys(row, {"normal", "bound"}, "domain constraint");
      if (!row.contains("normal") || !row.contains("bound")) {
        throw ConfigError("domain constraint: needs normal and bound");
      }
      normals.push_back(vector_from_json(row["normal"], "domain normal"));
      bounds.push_back(rational_from_json(row["bound"], "domain bound"));
    }
  }
  if (normals.empty()) return ConvexDomain::box(std::move(lower), std::move(upper));
  return ConvexDomain::polytope(std::move(normals), std::move(bounds),
                                std::move(lower), std::move(upper));
}

Json measure_to_json(const FiniteMeasureModel& mu) {
  Json out;
  out["schema"] = "afp.measure/1";
  out["atoms"] = vector_to_json(mu.atoms());
  out["diffuse"] = to_string(mu.diffuse());
  return out;
}

FiniteMeasureModel measure_from_json(const Json& value) {
  if (!value.is_object()) throw ConfigError("measure: expected an object");
  reject_unknown_keys(value, {"schema", "atoms", "diffuse"}, "measure");
  if (value.value("schema", "") != "afp.measure/1") {
    throw ConfigError("measure: schema must be afp.measure/1");
  }
  SparseVector atoms = value.contains("atoms")
                           ? vector_from_json(value["atoms"], "measure atoms")
                           : SparseVector{};
  Rational diffuse = value.contains("diffuse")
                         ? rational_from_json(value["diffuse"], "measure diffuse")
                         : Rational(0);
  return {std::move(atoms), std::move(diffuse)};
}

void reject_unknown_keys(const Json& object,
                         std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!object.is_object()) {
    throw ConfigError(std::string(where) + ": expected an object");
  }
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace afp
