#include "afp/maps.hpp"

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>

#include "afp/errors.hpp"

namespace afp {

namespace {

SparseVector line(const Rational& x) {
  return SparseVector::from_dense(std::vector<Rational>{x});
}

NamedMap scalar_map(std::string name, bool affine,
                    std::function<Rational(const Rational&)> g) {
  ConvexDomain C = ConvexDomain::unit_cube(1);
  PointMap f{name,
             [g](const SparseVector& p) { return line(g(p.get(1))); },
             affine,
             [C](const SparseVector& p) { return C.contains(p); }};
  return {std::move(name), C, std::move(f)};
}

NamedMap rotation90() {
  ConvexDomain C = ConvexDomain::unit_cube(2);
  PointMap f{"rotation90",
             [](const SparseVector& p) {
               return SparseVector::from_dense(
                   std::vector<Rational>{1 - p.get(2), p.get(1)});
             },
             true, [C](const SparseVector& p) { return C.contains(p); }};
  return {"rotation90", C, std::move(f)};
}

}  // namespace

const std::vector<std::string>& builtin_map_names() {
  static const std::vector<std::string> names = {
      "identity", "half-step", "square", "contract", "reflect", "rotation90"};
  return names;
}

NamedMap builtin_map(std::string_view name) {
  if (name == "identity") {
    return scalar_map("identity", true, [](const Rational& x) { return x; });
  }
  if (name == "half-step") {
    return scalar_map("half-step", true,
                      [](const Rational& x) { return (x + 1) / 2; });
  }
  if (name == "square") {
    return scalar_map("square", false, [](const Rational& x) { return x * x; });
  }
  if (name == "contract") {
    return scalar_map("contract", true,
                      [](const Rational& x) { return x / 2 + ratio(1, 4); });
  }
  if (name == "reflect") {
    return scalar_map("reflect", true, [](const Rational& x) { return 1 - x; });
  }
  if (name == "rotation90") return rotation90();
  throw ConfigError("unknown map '" + std::string(name) + "'");
}

namespace {

struct Affine {
  SparseVector linear;
  Rational constant;
};

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, std::size_t dimension)
      : text_(text), dimension_(dimension) {}

  Affine parse() {
    Affine out;
    skip();
    bool first = true;
    while (pos_ < text_.size()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      term(out, sign);
      first = false;
      skip();
    }
    if (first) fail("empty expression");
    return out;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("affine expression '" + std::string(text_) + "': " + why);
  }

  void term(Affine& out, int sign) {
    Rational coefficient(sign);
    std::size_t variable = 0;
    for (;;) {
      skip();
      if (peek() == 'x') {
        ++pos_;
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_) fail("variable without an index");
        const std::size_t k = std::stoul(std::string(text_.substr(start, pos_ - start)));
        if (k < 1 || k > dimension_) fail("variable x" + std::to_string(k) + " out of range");
        if (variable != 0) fail("product of variables is not affine");
        variable = k;
      } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '/' ||
               peek() == '.') {
          ++pos_;
        }
        try {
          coefficient *= parse_rational(text_.substr(start, pos_ - start));
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
      } else {
        fail("expected a number or a variable");
      }
      skip();
      if (peek() != '*') break;
      ++pos_;
    }
    if (variable == 0) {
      out.constant += coefficient;
    } else {
      out.linear.add_to(Index(static_cast<std::uint64_t>(variable)), coefficient);
    }
  }

  std::string_view text_;
  std::size_t dimension_;
  std::size_t pos_ = 0;
};

Affine parse_affine(std::string_view text, std::size_t dimension) {
  return ExpressionParser(text, dimension).parse();
}

// "lhs <= rhs" or "lhs >= rhs" as a row ⟨a, x⟩ ≤ b.
std::pair<SparseVector, Rational> parse_inequality(std::string_view text,
                                                   std::size_t dimension) {
  const auto le = text.find("<=");
  const auto ge = text.find(">=");
  if ((le == std::string_view::npos) == (ge == std::string_view::npos)) {
    throw ConfigError("inequality '" + std::string(text) +
                      "' needs exactly one of '<=' or '>='");
  }
  const auto at = le != std::string_view::npos ? le : ge;
  Affine lhs = parse_affine(text.substr(0, at), dimension);
  Affine rhs = parse_affine(text.substr(at + 2), dimension);
  if (ge != std::string_view::npos) std::swap(lhs, rhs);
  return {lhs.linear - rhs.linear, rhs.constant - lhs.constant};
}

std::vector<std::string_view> split(std::string_view text, char separator) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto at = text.find(separator, start);
    parts.push_back(text.substr(start, at - start));
    if (at == std::string_view::npos) return parts;
    start = at + 1;
  }
}

bool blank(std::string_view s) {
  for (const char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

NamedMap parse_piecewise_affine(std::string_view text, std::string name) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t dimension = 0;
  std::vector<Rational> lower, upper;
  std::vector<SparseVector> normals;
  std::vector<Rational> bounds;
  auto pieces = std::make_shared<std::vector<AffinePiece>>();
  bool schema_seen = false;
  std::uint64_t index_shift = 0;

  while (std::getline(in, raw)) {
    std::string_view row(raw);
    if (const auto hash = row.find('#'); hash != std::string_view::npos) {
      row = row.substr(0, hash);
    }
    if (blank(row)) continue;
    std::istringstream words{std::string(row)};
    std::string keyword;
    words >> keyword;
    std::string rest;
    std::getline(words, rest);

    if (keyword == "schema") {
      std::istringstream r(rest);
      std::string tag;
      r >> tag;
      if (tag != "afp.piecewise/1") {
        throw ConfigError("unsupported plugin schema '" + tag + "'");
      }
      schema_seen = true;
    } else if (!schema_seen) {
      throw ConfigError("plugin must start with 'schema afp.piecewise/1'");
    } else if (keyword == "dimension") {
      if (dimension != 0) throw ConfigError("dimension given twice");
      try {
        dimension = std::stoul(rest);
      } catch (const std::exception&) {
        throw ConfigError("bad dimension '" + rest + "'");
      }
      if (dimension == 0) throw ConfigError("dimension must be positive");
    } else if (dimension == 0) {
      throw ConfigError("'" + keyword + "' before 'dimension'");
    } else if (keyword == "box") {
      std::istringstream r(rest);
      std::string token;
      std::vector<Rational> values;
      while (r >> token) {
        try {
          values.push_back(parse_rational(token));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      if (values.size() != 2 * dimension) {
        throw ConfigError("box needs a lower and upper bound per coordinate");
      }
      lower.clear();
      upper.clear();
      for (std::size_t i = 0; i < dimension; ++i) {
        lower.push_back(values[2 * i]);
        upper.push_back(values[2 * i + 1]);
      }
    } else if (keyword == "index_shift") {
      try {
        std::size_t used = 0;
        const std::string value = rest.substr(rest.find_first_not_of(' '));
        index_shift = std::stoull(value, &used);
        if (!blank(std::string_view(value).substr(used))) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw ConfigError("bad index_shift '" + rest + "'");
      }
    } else if (keyword == "constraint") {
      auto [a, b] = parse_inequality(rest, dimension);
      normals.push_back(std::move(a));
      bounds.push_back(std::move(b));
    } else if (keyword == "piece") {
      const auto arrow = rest.find("=>");
      if (arrow == std::string::npos) throw ConfigError("piece without '=>'");
      AffinePiece p;
      const std::string_view guards = std::string_view(rest).substr(0, arrow);
      if (!blank(guards)) {
        for (const auto g : split(guards, ';')) {
          auto [a, b] = parse_inequality(g, dimension);
          p.guard_normals.push_back(std::move(a));
          p.guard_bounds.push_back(std::move(b));
        }
      }
      const auto outputs = split(std::string_view(rest).substr(arrow + 2), ',');
      if (outputs.size() != dimension) {
        throw ConfigError("piece must give " + std::to_string(dimension) +
                          " output coordinates");
      }
      for (const auto o : outputs) {
        Affine e = parse_affine(o, dimension);
        p.linear.push_back(std::move(e.linear));
        p.offset.push_back(std::move(e.constant));
      }
      pieces->push_back(std::move(p));
    } else {
      throw ConfigError("unknown plugin keyword '" + keyword + "'");
    }
  }
  if (!schema_seen) throw ConfigError("empty plugin");
  if (lower.empty()) throw ConfigError("plugin has no 'box'");
  if (pieces->empty()) throw ConfigError("plugin has no 'piece'");

  ConvexDomain C = normals.empty()
                       ? ConvexDomain::box(lower, upper)
                       : ConvexDomain::polytope(normals, bounds, lower, upper);
  const bool affine = pieces->size() == 1 && (*pieces)[0].guard_normals.empty();
  PointMap f{name,
             [pieces, name](const SparseVector& x) {
               for (const auto& p : *pieces) {
                 bool holds = true;
                 for (std::size_t i = 0; i < p.guard_normals.size() && holds; ++i) {
                   holds = p.guard_normals[i].dot(x) <= p.guard_bounds[i];
                 }
                 if (!holds) continue;
                 std::vector<Rational> y;
                 y.reserve(p.linear.size());
                 for (std::size_t j = 0; j < p.linear.size(); ++j) {
                   y.push_back(p.linear[j].dot(x) + p.offset[j]);
                 }
                 return SparseVector::from_dense(y);
               }
               throw DomainEscape(name + ": no piece applies at " + to_string(x));
             },
             affine, [C](const SparseVector& x) { return C.contains(x); }};
  return {std::move(name), std::move(C), std::move(f), index_shift};
}

NamedMap load_piecewise_affine(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plugin '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_piecewise_affine(buffer.str(), "plugin:" + path);
}

NamedMap resolve_map(std::string_view spec) {
  constexpr std::string_view prefix = "plugin:";
  if (spec.substr(0, prefix.size()) == prefix) {
    return load_piecewise_affine(std::string(spec.substr(prefix.size())));
  }
  return builtin_map(spec);
}

}  // namespace afp
