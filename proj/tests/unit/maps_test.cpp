#include <gtest/gtest.h>

#include "afp/errors.hpp"
#include "afp/maps.hpp"

namespace {

using afp::ratio;
using afp::Rational;
using afp::SparseVector;

SparseVector at(std::vector<Rational> c) { return SparseVector::from_dense(c); }

TEST(BuiltinMaps, KnownValues) {
  EXPECT_EQ(afp::builtin_map("half-step").map(at({0})), at({ratio(1, 2)}));
  EXPECT_EQ(afp::builtin_map("square").map(at({ratio(2, 3)})), at({ratio(4, 9)}));
  EXPECT_EQ(afp::builtin_map("contract").map(at({1})), at({ratio(3, 4)}));
  EXPECT_EQ(afp::builtin_map("rotation90").map(at({1, 0})), at({1, 1}));
  EXPECT_FALSE(afp::builtin_map("square").map.affine);
  for (const auto& name : afp::builtin_map_names()) {
    EXPECT_EQ(afp::builtin_map(name).name, name);
  }
  EXPECT_THROW(afp::builtin_map("nope"), afp::ConfigError);
}

constexpr const char* kTent = R"(schema afp.piecewise/1
# tent map with fixed points 0 and 2/3
dimension 1
box 0 1
piece x1 <= 1/2 => 2*x1
piece => 2 - 2*x1
)";

TEST(PiecewiseAffine, TentMap) {
  const auto m = afp::parse_piecewise_affine(kTent, "tent");
  EXPECT_FALSE(m.map.affine);
  EXPECT_EQ(m.map(at({ratio(1, 4)})), at({ratio(1, 2)}));
  EXPECT_EQ(m.map(at({ratio(1, 2)})), at({1}));
  EXPECT_EQ(m.map(at({ratio(2, 3)})), at({ratio(2, 3)}));
  EXPECT_EQ(m.map(at({1})), SparseVector{});
  EXPECT_TRUE(m.domain.contains(at({1})));
  EXPECT_FALSE(m.map.contains(at({2})));
}

TEST(PiecewiseAffine, TwoDimensionalWithConstraint) {
  const auto m = afp::parse_piecewise_affine(R"(schema afp.piecewise/1
dimension 2
box 0 1 0 1
constraint x1 + x2 <= 1
piece => 1/2*x2 + 0.25, x1 - 1/3 * x2 + 1/3*1
)", "tri");
  EXPECT_TRUE(m.map.affine);
  EXPECT_EQ(m.map(at({ratio(1, 2), ratio(1, 2)})),
            at({ratio(1, 2), ratio(1, 2) - ratio(1, 6) + ratio(1, 3)}));
  EXPECT_FALSE(m.domain.contains(at({1, 1})));
  EXPECT_TRUE(m.domain.contains(at({ratio(1, 2), ratio(1, 2)})));
}

TEST(PiecewiseAffine, GuardsWithGreaterEqual) {
  const auto m = afp::parse_piecewise_affine(R"(schema afp.piecewise/1
dimension 1
box 0 1
piece x1 >= 1/2 ; x1 <= 3/4 => 1/2
)", "partial");
  EXPECT_EQ(m.map(at({ratio(3, 5)})), at({ratio(1, 2)}));
  EXPECT_THROW(m.map(at({ratio(1, 5)})), afp::DomainEscape);
}

TEST(PiecewiseAffine, MalformedInputIsAConfigError) {
  const std::vector<std::string> bad = {
      "",
      "dimension 1\nbox 0 1\npiece => x1\n",
      "schema afp.piecewise/2\n",
      "schema afp.piecewise/1\ndimension 1\npiece => x1\n",
      "schema afp.piecewise/1\ndimension 1\nbox 0 1\n",
      "schema afp.piecewise/1\ndimension 1\nbox 0 1\npiece => x1*x1\n",
      "schema afp.piecewise/1\ndimension 1\nbox 0 1\npiece => x2\n",
      "schema afp.piecewise/1\ndimension 1\nbox 0 1\npiece => x1, x1\n",
      "schema afp.piecewise/1\ndimension 1\nbox 0 1\npiece x1 < 1 => x1\n",
      "schema afp.piecewise/1\ndimension 1\nbox 0 1\npiece => 1/0\n",
      "schema afp.piecewise/1\ndimension 1\nbox 0\npiece => x1\n",
      "schema afp.piecewise/1\ndimension 1\nbox 0 1\nwobble\n",
  };
  for (const auto& text : bad) {
    EXPECT_THROW(afp::parse_piecewise_affine(text, "bad"), afp::ConfigError)
        << text;
  }
  EXPECT_THROW(afp::resolve_map("plugin:/nonexistent/file"), afp::ConfigError);
}

}  // namespace
