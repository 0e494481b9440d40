#include <gtest/gtest.h>

#include "afp/affine.hpp"
#include "afp/errors.hpp"

namespace {

using afp::CesaroEvaluation;
using afp::CesaroStep;
using afp::MapDescriptor;
using afp::ratio;
using afp::Rational;
using afp::SparseVector;

using Scalar = MapDescriptor<Rational>;

Scalar half_step() {
  return {"half-step", [](const Rational& x) { return (x + 1) / 2; }, true,
          [](const Rational& x) { return x >= 0 && x <= 1; }};
}

Scalar square() {
  return {"square", [](const Rational& x) { return x * x; }, false,
          [](const Rational& x) { return x >= 0 && x <= 1; }};
}

Rational abs_norm(const Rational& x) { return afp::abs(x); }

SparseVector point(const Rational& x, const Rational& y) {
  return SparseVector::from_dense(std::vector<Rational>{x, y});
}

// Rotation about (1/2, 1/2) by the angle with cosine 3/5 and sine 4/5,
// whose angle is not a rational multiple of π.
MapDescriptor<SparseVector> rotation_on_disk() {
  return {"rotation",
          [](const SparseVector& p) {
            const auto c = p.to_dense(2);
            const Rational u = c[0] - ratio(1, 2), v = c[1] - ratio(1, 2);
            return point(ratio(3, 5) * u - ratio(4, 5) * v + ratio(1, 2),
                         ratio(4, 5) * u + ratio(3, 5) * v + ratio(1, 2));
          },
          true,
          [](const SparseVector& p) {
            if (!p.is_zero() && afp::Index(2) < p.max_index()) return false;
            const auto c = p.to_dense(2);
            const Rational u = c[0] - ratio(1, 2), v = c[1] - ratio(1, 2);
            return u * u + v * v <= ratio(1, 4);
          }};
}

TEST(IterateOrbit, HalfStepFromZero) {
  const auto orbit = afp::iterate_orbit(half_step(), Rational(0), 3);
  const std::vector<Rational> expected = {0, ratio(1, 2), ratio(3, 4),
                                          ratio(7, 8)};
  EXPECT_EQ(orbit, expected);
}

TEST(IterateOrbit, IdentityIsConstant) {
  const Scalar id{"identity", [](const Rational& x) { return x; }, true, {}};
  for (const auto& y : afp::iterate_orbit(id, ratio(2, 7), 10)) {
    EXPECT_EQ(y, ratio(2, 7));
  }
}

TEST(IterateOrbit, EscapeIsAnError) {
  const Scalar doubling{"double", [](const Rational& x) { return 2 * x; }, true,
                        [](const Rational& x) { return x >= 0 && x <= 1; }};
  EXPECT_THROW(afp::iterate_orbit(doubling, ratio(1, 3), 3), afp::DomainEscape);
  EXPECT_THROW(afp::iterate_orbit(doubling, Rational(2), 0), afp::DomainEscape);
  EXPECT_NO_THROW(afp::iterate_orbit(doubling, ratio(1, 8), 3));
}

TEST(CesaroSequence, HalfStepThirdAverage) {
  std::vector<Rational> averages, residuals;
  afp::cesaro_sequence<Rational>(
      half_step(), Rational(0), 3, abs_norm,
      [&](const CesaroStep<Rational>& s) {
        averages.push_back(s.state.average());
        residuals.push_back(s.residual);
        EXPECT_TRUE(s.identity_checked);
        EXPECT_TRUE(s.identity_holds);
        return true;
      });
  ASSERT_EQ(averages.size(), 3u);
  EXPECT_EQ(averages[2], ratio(5, 12));
  EXPECT_EQ(residuals[2], ratio(7, 24));
}

TEST(CesaroSequence, TelescopingAgreesWithDirectForAffineMaps) {
  std::vector<Rational> direct, telescoped;
  auto collect = [](std::vector<Rational>& out) {
    return [&out](const CesaroStep<Rational>& s) {
      out.push_back(s.residual);
      return true;
    };
  };
  afp::cesaro_sequence<Rational>(half_step(), ratio(1, 3), 200, abs_norm,
                                 collect(direct));
  afp::cesaro_sequence<Rational>(half_step(), ratio(1, 3), 200, abs_norm,
                                 collect(telescoped),
                                 CesaroEvaluation::Telescoping);
  EXPECT_EQ(direct, telescoped);
  // Bounded domain of diameter 1: residual_k ≤ 1/k.
  for (std::size_t k = 1; k <= direct.size(); ++k) {
    EXPECT_LE(direct[k - 1], ratio(1, static_cast<long>(k)));
  }
}

TEST(CesaroSequence, TelescopingRefusesNonAffineMaps) {
  EXPECT_THROW(afp::cesaro_sequence<Rational>(
                   square(), Rational(0), 3, abs_norm,
                   [](const CesaroStep<Rational>&) { return true; },
                   CesaroEvaluation::Telescoping),
               std::invalid_argument);
}

TEST(CesaroSequence, NonAffineMapsStillYieldAverages) {
  std::size_t steps = 0;
  afp::cesaro_sequence<Rational>(square(), ratio(1, 2), 6, abs_norm,
                                 [&](const CesaroStep<Rational>& s) {
                                   EXPECT_FALSE(s.identity_checked);
                                   const Rational x = s.state.average();
                                   EXPECT_EQ(s.residual, afp::abs(x - x * x));
                                   ++steps;
                                   return true;
                                 });
  EXPECT_EQ(steps, 6u);
}

TEST(CesaroSequence, IdentityHasZeroResidualAndSinkCanStop) {
  const Scalar id{"identity", [](const Rational& x) { return x; }, true, {}};
  std::size_t steps = 0;
  afp::cesaro_sequence<Rational>(id, ratio(3, 5), 1000, abs_norm,
                                 [&](const CesaroStep<Rational>& s) {
                                   EXPECT_EQ(s.residual, 0);
                                   return ++steps < 10;
                                 });
  EXPECT_EQ(steps, 10u);
}

TEST(VerifyAffine, LinearPassesSquareFails) {
  const std::function<Rational(afp::Rng&)> unit = [](afp::Rng& rng) {
    return rng.unit_rational(20);
  };
  const Scalar linear{"linear", [](const Rational& x) { return 3 * x - 1; },
                      true, {}};
  EXPECT_FALSE(afp::verify_affine(linear, unit, 1000, 5).has_value());
  EXPECT_TRUE(afp::verify_affine(square(), unit, 1000, 5).has_value());
  // The canonical counterexample: f(1/2) = 1/4 but the chord gives 1/2.
  EXPECT_FALSE(afp::check_affine_triple(square(), Rational(0), Rational(1),
                                        ratio(1, 2)));
  EXPECT_EQ(square()(ratio(1, 2)), ratio(1, 4));
}

TEST(VerifyAffine, CounterexampleIsARealFailure) {
  const std::function<Rational(afp::Rng&)> unit = [](afp::Rng& rng) {
    return rng.unit_rational(20);
  };
  const auto bad = afp::verify_affine(square(), unit, 1000, 9);
  ASSERT_TRUE(bad.has_value());
  EXPECT_FALSE(afp::check_affine_triple(square(), bad->x, bad->y, bad->t));
}

MapDescriptor<SparseVector> lift(const Scalar& f) {
  return {f.name,
          [f](const SparseVector& p) {
            return SparseVector::from_dense(
                std::vector<Rational>{f(p.to_dense(1)[0])});
          },
          f.affine,
          [f](const SparseVector& p) {
            if (!p.is_zero() && afp::Index(1) < p.max_index()) return false;
            return f.contains(p.to_dense(1)[0]);
          }};
}

std::vector<SparseVector> averages_of(const MapDescriptor<SparseVector>& f,
                                      const SparseVector& y1, std::size_t k) {
  std::vector<SparseVector> out;
  afp::cesaro_sequence<SparseVector>(
      f, y1, k, [](const SparseVector& v) { return v.l1_norm(); },
      [&](const CesaroStep<SparseVector>& s) {
        out.push_back(s.state.average());
        return true;
      });
  return out;
}

TEST(ClusterFixedPoint, HalfStepConvergesToOne) {
  const auto f = lift(half_step());
  const auto seq = averages_of(f, SparseVector{}, 400);
  const auto box = afp::ConvexDomain::unit_cube(1);
  const Rational tol = ratio(1, 100);
  const auto hit = afp::cluster_fixed_point(
      f, seq, box, afp::PolyhedralSeminorm::l1(), tol);
  ASSERT_TRUE(hit.has_value());
  EXPECT_LE(hit->residual, tol);
  // |x − f(x)| = |x − 1|/2, so the point is within 2·tol of 1.
  EXPECT_LE(afp::abs(hit->point.get(1) - 1), 2 * tol);
}

TEST(ClusterFixedPoint, IdentityReturnsStart) {
  const Scalar id{"identity", [](const Rational& x) { return x; }, true,
                  [](const Rational& x) { return x >= 0 && x <= 1; }};
  const auto f = lift(id);
  const SparseVector y1 = SparseVector::from_dense(std::vector<Rational>{ratio(2, 9)});
  const auto seq = averages_of(f, y1, 20);
  const auto hit = afp::cluster_fixed_point(
      f, seq, afp::ConvexDomain::unit_cube(1), afp::PolyhedralSeminorm::l1(),
      Rational(0));
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->point, y1);
  EXPECT_EQ(hit->residual, 0);
}

TEST(ClusterFixedPoint, RotationFindsCentre) {
  const auto f = rotation_on_disk();
  const auto seq = averages_of(f, point(ratio(1, 2), Rational(0)), 300);
  const Rational tol = ratio(1, 50);
  const auto hit = afp::cluster_fixed_point(
      f, seq, afp::ConvexDomain::unit_cube(2), afp::PolyhedralSeminorm::l1(),
      tol);
  ASSERT_TRUE(hit.has_value());
  EXPECT_LE(hit->residual, tol);
  // In ℓ2 the displacement is 2·sin(θ/2)·‖p − c‖ with sin²(θ/2) = 1/5,
  // which bounds the ℓ1 displacement below by (3/5)·‖p − c‖₁.
  EXPECT_LE((hit->point - point(ratio(1, 2), ratio(1, 2))).l1_norm(),
            5 * tol);
}

TEST(ClusterFixedPoint, GivesUpWhenNothingQualifies) {
  const Scalar shift{"shift", [](const Rational& x) { return x + 1; }, true, {}};
  const auto f = lift(shift);
  std::vector<SparseVector> seq;
  for (int i = 0; i <= 10; ++i) {
    seq.push_back(SparseVector::from_dense(std::vector<Rational>{ratio(i, 10)}));
  }
  EXPECT_FALSE(afp::cluster_fixed_point(f, seq, afp::ConvexDomain::unit_cube(1),
                                        afp::PolyhedralSeminorm::l1(),
                                        ratio(1, 2), 8)
                   .has_value());
}

}  // namespace
