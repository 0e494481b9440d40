#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "afp/affine.hpp"
#include "afp/delta.hpp"
#include "afp/errors.hpp"
#include "afp/linear_program.hpp"
#include "afp/separation.hpp"

namespace {

using afp::DeltaPoint;
using afp::PolyhedralSeminorm;
using afp::ratio;
using afp::Rational;
using afp::SparseVector;

SparseVector e(std::uint64_t n) { return SparseVector::unit(afp::Index(n)); }

DeltaPoint P(std::uint64_t n, Rational a, Rational b) {
  return DeltaPoint::make(n, std::move(a), std::move(b));
}

// Dense ℓ1 distance over coordinates 1..d, computed coordinate by coordinate.
Rational dense_l1(const SparseVector& x, const SparseVector& y, std::size_t d) {
  const auto u = x.to_dense(d);
  const auto v = y.to_dense(d);
  Rational s(0);
  for (std::size_t i = 0; i < d; ++i) s += afp::abs(u[i] - v[i]);
  return s;
}

DeltaPoint random_point(afp::Rng& rng, std::uint64_t max_n, std::uint64_t res) {
  for (;;) {
    const std::uint64_t n = 1 + rng.below(max_n);
    const Rational a = rng.unit_rational(res);
    const Rational b = rng.unit_rational(res);
    if (a + b <= 1) return P(n, a, b);
  }
}

TEST(DeltaPointTest, Canonicalization) {
  EXPECT_EQ(P(3, 0, ratio(1, 2)), (DeltaPoint{4, ratio(1, 2), 0}));
  EXPECT_EQ(P(7, 0, 0), DeltaPoint::apex());
  EXPECT_EQ(DeltaPoint::apex(), (DeltaPoint{1, 0, 0}));
  EXPECT_EQ(P(2, ratio(1, 4), ratio(3, 4)).embed(),
            e(2) * ratio(1, 4) + e(3) * ratio(3, 4));
  EXPECT_THROW(P(0, ratio(1, 2), 0), std::invalid_argument);
  EXPECT_THROW(P(1, ratio(2, 3), ratio(2, 3)), std::invalid_argument);
  EXPECT_THROW(P(1, ratio(-1, 3), 0), std::invalid_argument);
  EXPECT_EQ(afp::as_delta_point(e(2) * ratio(1, 3) + e(3) * ratio(1, 3)),
            P(2, ratio(1, 3), ratio(1, 3)));
  EXPECT_FALSE(afp::as_delta_point(e(1) + e(3)).has_value());
  EXPECT_FALSE(afp::as_delta_point(e(1) * 2).has_value());
  EXPECT_FALSE(afp::as_delta_point(e(1) * -1).has_value());
}

TEST(DeltaDistance, Examples) {
  EXPECT_EQ(afp::delta_distance(P(1, 1, 0), P(2, 1, 0)), 2);
  EXPECT_EQ(afp::delta_distance(P(1, ratio(1, 2), ratio(1, 4)),
                                P(1, ratio(1, 4), ratio(1, 2))),
            ratio(1, 2));
  EXPECT_EQ(afp::delta_distance(P(1, ratio(1, 2), 0), P(3, ratio(1, 2), 0)), 1);
}

TEST(DeltaDistance, MatchesDenseOracle) {
  afp::Rng rng(11);
  for (int t = 0; t < 10000; ++t) {
    const DeltaPoint p = random_point(rng, 6, 12);
    const DeltaPoint q = random_point(rng, 6, 12);
    ASSERT_EQ(afp::delta_distance(p, q), dense_l1(p.embed(), q.embed(), 8))
        << to_string(p) << " " << to_string(q);
  }
}

TEST(ShiftMap, ExamplesAndIsometry) {
  EXPECT_EQ(afp::shift_map(P(1, 1, 0)), P(2, 1, 0));
  EXPECT_EQ(afp::shift_displacement(P(1, 1, 0)), 2);
  EXPECT_EQ(afp::shift_map(DeltaPoint::apex()), DeltaPoint::apex());
  EXPECT_EQ(afp::shift_displacement(DeltaPoint::apex()), 0);
  const auto p = P(1, ratio(1, 2), ratio(1, 4));
  EXPECT_EQ(afp::shift_map(p), P(2, ratio(1, 2), ratio(1, 4)));
  EXPECT_EQ(afp::shift_displacement(p), 1);
  afp::Rng rng(12);
  for (int t = 0; t < 5000; ++t) {
    const DeltaPoint x = random_point(rng, 6, 12);
    const DeltaPoint y = random_point(rng, 6, 12);
    ASSERT_EQ(afp::delta_distance(afp::shift_map(x), afp::shift_map(y)),
              afp::delta_distance(x, y));
    ASSERT_EQ(afp::shift_displacement(x),
              dense_l1(x.embed(), afp::shift_map(x).embed(), 9));
  }
}

// Exact ℓ1 distance from x to one triangle, by linear programming over
// (a, b, t_n, t_{n+1}).
Rational triangle_distance_lp(const SparseVector& x, std::uint64_t n) {
  const Rational u = x.get(afp::Index(n));
  const Rational w = x.get(afp::Index(n + 1));
  const Rational rest = x.l1_norm() - afp::abs(u) - afp::abs(w);
  using afp::LinearConstraint;
  using afp::Relation;
  const std::vector<LinearConstraint> rows = {
      {{1, 0, 1, 0}, Relation::GreaterEq, u},
      {{-1, 0, 1, 0}, Relation::GreaterEq, -u},
      {{0, 1, 0, 1}, Relation::GreaterEq, w},
      {{0, -1, 0, 1}, Relation::GreaterEq, -w},
      {{1, 1, 0, 0}, Relation::LessEq, Rational(1)},
  };
  const auto sol = afp::solve_lp({0, 0, 1, 1}, rows);
  EXPECT_EQ(sol.status, afp::LpStatus::Optimal);
  return sol.value + rest;
}

TEST(Retraction, Examples) {
  const auto in_delta = P(3, ratio(1, 3), ratio(1, 2));
  const auto r0 = afp::nearest_point_retraction(in_delta.embed());
  EXPECT_EQ(r0.point, in_delta);
  EXPECT_EQ(r0.distance, 0);
  const auto r1 = afp::nearest_point_retraction(e(1) + e(3));
  EXPECT_EQ(r1.point, P(1, 1, 0));
  EXPECT_EQ(r1.distance, 1);
  EXPECT_EQ(afp::nearest_point_retraction(e(5) * ratio(1, 2)).point,
            P(5, ratio(1, 2), 0));
  EXPECT_EQ(afp::nearest_point_retraction(SparseVector{}).point,
            DeltaPoint::apex());
  // Negative coordinates are clamped: -e2 + ½e4 goes to ½e4 at distance 1.
  const auto r2 = afp::nearest_point_retraction(e(2) * -1 + e(4) * ratio(1, 2));
  EXPECT_EQ(r2.point, P(4, ratio(1, 2), 0));
  EXPECT_EQ(r2.distance, 1);
  // Inside the optimal face the smallest a is returned.
  const auto r3 = afp::nearest_point_retraction(e(1) * ratio(4, 5) + e(2) * ratio(4, 5));
  EXPECT_EQ(r3.point, P(1, ratio(1, 5), ratio(4, 5)));
  EXPECT_EQ(r3.distance, ratio(3, 5));
}

TEST(Retraction, MatchesPerTriangleLpOracle) {
  afp::Rng rng(13);
  for (int t = 0; t < 400; ++t) {
    SparseVector x;
    const std::uint64_t terms = 1 + rng.below(4);
    for (std::uint64_t k = 0; k < terms; ++k) {
      x.add_to(afp::Index(1 + rng.below(7)),
               rng.rational_in(ratio(-1, 2), Rational(1), 10));
    }
    const auto r = afp::nearest_point_retraction(x);
    // Triangles away from the support cost ‖x‖₁, which triangle 1..9 covers.
    Rational best = x.l1_norm();
    for (std::uint64_t n = 1; n <= 9; ++n) {
      best = afp::min_of(best, triangle_distance_lp(x, n));
    }
    ASSERT_EQ(r.distance, best) << to_string(x);
    ASSERT_EQ(afp::l1_distance(x, r.point.embed()), r.distance) << to_string(x);
    ASSERT_TRUE(afp::as_delta_point(r.point.embed()).has_value());
    ASSERT_EQ(afp::nearest_point_retraction(r.point.embed()).point, r.point);
  }
}

TEST(Baker, ValuesAndSphere) {
  EXPECT_EQ(afp::baker_affine(SparseVector{}), e(1));
  EXPECT_EQ(afp::l1_distance(SparseVector{}, afp::baker_affine(SparseVector{})), 1);
  EXPECT_EQ(afp::baker_affine(e(1) * ratio(1, 4)),
            e(1) * ratio(3, 4) + e(2) * ratio(1, 4));
  EXPECT_EQ(afp::baker_affine(e(3)), e(4));
  afp::Rng rng(14);
  for (int t = 0; t < 500; ++t) {
    const auto x = afp::sample_positive_ball(rng, 10, 16);
    ASSERT_LE(x.l1_norm(), 1);
    ASSERT_EQ(afp::baker_affine(x).l1_norm(), 1);
  }
  EXPECT_THROW(afp::baker_affine(e(1) * 2), afp::DomainEscape);
  EXPECT_THROW(afp::baker_affine(e(1) * -1), afp::DomainEscape);
}

afp::MapDescriptor<SparseVector> baker_descriptor() {
  return {"baker", afp::baker_affine, true, [](const SparseVector& x) {
            return x.is_nonnegative() && x.l1_norm() <= 1;
          }};
}

TEST(Baker, IsAffineOnTheBall) {
  const std::function<SparseVector(afp::Rng&)> sampler = [](afp::Rng& rng) {
    return afp::sample_positive_ball(rng, 8, 12);
  };
  EXPECT_FALSE(afp::verify_affine(baker_descriptor(), sampler, 1000, 3).has_value());
}

// Feasibility of the fixed-point equations with support in {1..N}, as an LP.
bool baker_fixed_point_lp(std::uint64_t N) {
  std::vector<afp::LinearConstraint> rows;
  // x1 = 1 − Σx_i.
  std::vector<Rational> first(N, Rational(1));
  first[0] = 2;
  rows.push_back({first, afp::Relation::Equal, Rational(1)});
  // x_{i+1} = x_i for i < N, and x_N = x_{N+1} = 0.
  for (std::uint64_t i = 1; i < N; ++i) {
    std::vector<Rational> row(N, Rational(0));
    row[i] = 1;
    row[i - 1] = -1;
    rows.push_back({row, afp::Relation::Equal, Rational(0)});
  }
  std::vector<Rational> last(N, Rational(0));
  last[N - 1] = 1;
  rows.push_back({last, afp::Relation::Equal, Rational(0)});
  return afp::solve_lp(std::vector<Rational>(N, Rational(0)), rows).status ==
         afp::LpStatus::Optimal;
}

TEST(Baker, NoFixedPointCertificate) {
  for (std::uint64_t N = 1; N <= 12; ++N) {
    const auto cert = afp::baker_no_fixed_point_certificate(N);
    EXPECT_TRUE(cert.infeasible);
    ASSERT_EQ(cert.steps.size(), N + 3);
    EXPECT_EQ(cert.steps.front().variable, "x" + std::to_string(N + 1));
    EXPECT_EQ(cert.steps[N].variable, "x1");
    EXPECT_EQ(cert.steps[N].value, 0);
    EXPECT_EQ(cert.steps.back().value, 1);
    EXPECT_FALSE(baker_fixed_point_lp(N)) << N;
  }
}

TEST(Baker, CesaroResidualIsTwoOverK) {
  std::size_t count = 0;
  afp::cesaro_sequence<SparseVector>(
      baker_descriptor(), e(1), 200,
      [](const SparseVector& v) { return v.l1_norm(); },
      [&](const afp::CesaroStep<SparseVector>& s) {
        EXPECT_EQ(s.residual, ratio(2, static_cast<long>(s.state.k)));
        EXPECT_TRUE(s.identity_holds);
        ++count;
        return true;
      });
  EXPECT_EQ(count, 200u);
}

TEST(Baker, DisplacementInfimumIsZero) {
  // Normalised geometric weights r^0..r^N have displacement 2/Σr^i.
  Rational previous(3);
  for (const long m : {2L, 4L, 8L, 16L}) {
    const Rational r = 1 - ratio(1, m);
    const std::uint64_t N = 4 * static_cast<std::uint64_t>(m);
    SparseVector x;
    Rational s(0), w(1);
    for (std::uint64_t i = 0; i <= N; ++i, w *= r) {
      x.set(afp::Index(i + 1), w);
      s += w;
    }
    x *= 1 / s;
    const Rational d = afp::l1_distance(x, afp::baker_affine(x));
    EXPECT_EQ(d, 2 / s);
    EXPECT_LT(d, previous);
    previous = d;
  }
  EXPECT_LT(previous, ratio(1, 5));
}

TEST(E1, ConstantsFromClosedForms) {
  const auto one = afp::E1Constants::make(Rational(1), Rational(1));
  EXPECT_EQ(one.m, ratio(1, 32));
  EXPECT_EQ(one.c[0], ratio(1, 8));
  EXPECT_EQ(one.c[1], ratio(1, 32));
  EXPECT_EQ(one.c[2], ratio(1, 128));
  EXPECT_EQ(one.c[3], ratio(1, 512));
  EXPECT_EQ(one.chain_bound, ratio(1, 1024));
  EXPECT_LT(one.c_sum(), 1);
  const auto k = afp::E1Constants::make(ratio(9, 10), Rational(1));
  EXPECT_EQ(k.m, ratio(6561, 320000));
  EXPECT_EQ(k.c[0], ratio(1, 8));
  EXPECT_EQ(k.c[3], ratio(729, 512000));
  EXPECT_EQ(k.chain_bound, ratio(6561, 10240000));
  EXPECT_THROW(afp::E1Constants::make(Rational(2), Rational(1)),
               std::invalid_argument);
}

std::vector<SparseVector> basis(std::size_t count) {
  std::vector<SparseVector> out;
  for (std::uint64_t n = 1; n <= count; ++n) out.push_back(e(n));
  return out;
}

TEST(E1, CanonicalBasisHasNoViolations) {
  const auto l1 = PolyhedralSeminorm::l1();
  const auto k = afp::E1Constants::make(ratio(9, 10), Rational(1));
  const auto pts = basis(12);
  const auto rep = afp::e1_bounds_check(pts, l1, l1, k, 3000, 5);
  EXPECT_EQ(rep.trials, 3000u);
  EXPECT_EQ(rep.lower_violations, 0u);
  EXPECT_EQ(rep.upper_violations, 0u);
  // ρ(Σα e_k) = Σ|α| exactly.
  EXPECT_EQ(rep.min_lower_slack, 1 - k.m);
  EXPECT_EQ(rep.min_upper_slack, 0);
}

TEST(E1, HypothesesAreChecked) {
  const auto l1 = PolyhedralSeminorm::l1();
  const auto pts = basis(6);
  EXPECT_THROW(afp::e1_bounds_check(pts, l1, l1,
                                    afp::E1Constants::make(ratio(1, 4), ratio(1, 2)),
                                    10, 1),
               afp::HypothesisViolation);
  EXPECT_THROW(afp::e1_bounds_check(pts, l1, l1,
                                    afp::E1Constants::make(Rational(1), Rational(1)),
                                    10, 1),
               afp::HypothesisViolation);
  EXPECT_THROW(afp::e1_bounds_check(pts, PolyhedralSeminorm::linf(), l1,
                                    afp::E1Constants::make(ratio(1, 2), Rational(1)),
                                    10, 1),
               afp::HypothesisViolation);
}

std::vector<SparseVector> random_separated_family(std::uint64_t seed,
                                                  const Rational& delta) {
  afp::Rng rng(seed);
  std::vector<SparseVector> raw;
  for (int i = 0; i < 40; ++i) {
    std::vector<Rational> c;
    for (int j = 0; j < 8; ++j) c.push_back(rng.rational_in(Rational(-1), Rational(1), 4));
    raw.push_back(SparseVector::from_dense(c));
  }
  return afp::span_separated_sequence(afp::stream_of(raw), PolyhedralSeminorm::l1(),
                                      delta, raw.size());
}

TEST(E1, RandomFamilySatisfiesTheChainBound) {
  const auto l1 = PolyhedralSeminorm::l1();
  const Rational delta = ratio(1, 2);
  const auto pts = random_separated_family(21, delta);
  ASSERT_GE(pts.size(), 4u);
  Rational M(0);
  for (const auto& p : pts) M = afp::max_of(M, l1(p));
  const auto k = afp::E1Constants::make(delta, M);
  const auto rep = afp::e1_bounds_check(pts, l1, l1, k, 2000, 8, true);
  EXPECT_EQ(rep.lower_violations, 0u);
  EXPECT_EQ(rep.upper_violations, 0u);
  EXPECT_EQ(rep.lower_constant, k.chain_bound);
}

TEST(BuildD, CanonicalBasisIsDeltaItself) {
  const afp::ChainedTriangles D(basis(10));
  const auto d = D.distortion(PolyhedralSeminorm::l1(), 2000, 3);
  EXPECT_EQ(d.min_ratio, 1);
  EXPECT_EQ(d.max_ratio, 1);
  EXPECT_EQ(d.value(), 1);
  const auto p = P(4, ratio(1, 3), ratio(1, 6));
  EXPECT_EQ(D.embed(p), p.embed());
  EXPECT_EQ(D.locate(p.embed()), p);
  EXPECT_FALSE(D.contains(e(1) + e(3)));
  EXPECT_TRUE(D.contains(SparseVector{}));
}

TEST(BuildD, ScaledBasisHasDistortionTwo) {
  std::vector<SparseVector> pts;
  for (std::uint64_t n = 1; n <= 10; ++n) pts.push_back(e(n) * 2);
  const afp::ChainedTriangles D(pts);
  const auto d = D.distortion(PolyhedralSeminorm::l1(), 2000, 3);
  EXPECT_EQ(d.min_ratio, 2);
  EXPECT_EQ(d.max_ratio, 2);
  EXPECT_EQ(d.value(), 2);
}

TEST(BuildD, RandomFamilyDistortionWithinBounds) {
  const auto l1 = PolyhedralSeminorm::l1();
  const Rational delta = ratio(1, 2);
  const auto pts = random_separated_family(21, delta);
  Rational M(0);
  for (const auto& p : pts) M = afp::max_of(M, l1(p));
  const auto k = afp::E1Constants::make(delta, M);
  const afp::ChainedTriangles D(pts);
  const auto d = D.distortion(l1, 2000, 4);
  EXPECT_GT(d.pairs, 1900u);
  EXPECT_GE(d.min_ratio, k.chain_bound);
  EXPECT_LE(d.max_ratio, M);
  afp::Rng rng(6);
  afp::DeltaRegion region;
  region.max_index = D.triangle_count();
  for (int t = 0; t < 50; ++t) {
    const auto p = region.sample(rng);
    EXPECT_EQ(D.locate(D.embed(p)), p) << to_string(p);
  }
}

TEST(Region, ParseSampleAndRender) {
  const auto r = afp::DeltaRegion::parse("mass>=1/2,n<=5,resolution=8");
  EXPECT_EQ(r.min_mass, ratio(1, 2));
  EXPECT_EQ(r.max_index, 5u);
  EXPECT_EQ(afp::DeltaRegion::parse(r.to_string()).to_string(), r.to_string());
  afp::Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const auto p = r.sample(rng);
    EXPECT_TRUE(r.contains(p)) << to_string(p);
    EXPECT_GE(p.mass(), ratio(1, 2));
  }
  EXPECT_THROW(afp::DeltaRegion::parse("mass>=2"), afp::ConfigError);
  EXPECT_THROW(afp::DeltaRegion::parse("colour=red"), afp::ConfigError);
  EXPECT_THROW(afp::DeltaRegion::parse("n<=x"), afp::ConfigError);
  auto empty = afp::DeltaRegion::parse("mass>=1/3,mass<=1/3,resolution=4");
  EXPECT_THROW(empty.sample(rng), afp::ConfigError);
}

const afp::Metric<DeltaPoint> kDeltaMetric = [](const DeltaPoint& p,
                                                const DeltaPoint& q) {
  return afp::delta_distance(p, q);
};

afp::Sampler<DeltaPoint> region_sampler(const std::string& spec) {
  const auto region = afp::DeltaRegion::parse(spec);
  return [region](afp::Rng& rng) { return region.sample(rng); };
}

TEST(Estimators, Lipschitz) {
  const std::function<DeltaPoint(const DeltaPoint&)> shift = afp::shift_map;
  const auto s = afp::estimate_lipschitz(shift, region_sampler("all"), kDeltaMetric,
                                         2000, 9);
  EXPECT_EQ(s.value, 1);
  EXPECT_GT(s.used, 1900u);
  const std::function<DeltaPoint(const DeltaPoint&)> constant =
      [](const DeltaPoint&) { return P(2, ratio(1, 2), 0); };
  EXPECT_EQ(afp::estimate_lipschitz(constant, region_sampler("all"), kDeltaMetric,
                                    100, 9)
                .value,
            0);
  const std::function<SparseVector(const SparseVector&)> baker = afp::baker_affine;
  const afp::Sampler<SparseVector> ball = [](afp::Rng& rng) {
    return afp::sample_positive_ball(rng, 6, 12);
  };
  const afp::Metric<SparseVector> l1 = [](const SparseVector& x, const SparseVector& y) {
    return afp::l1_distance(x, y);
  };
  const auto b = afp::estimate_lipschitz(baker, ball, l1, 4000, 9);
  EXPECT_LE(b.value, 2);
  EXPECT_GT(b.value, ratio(3, 2));
  // Nested points realise the bound 2 exactly.
  EXPECT_EQ(l1(baker(SparseVector{}), baker(e(1) * ratio(1, 2))) /
                l1(SparseVector{}, e(1) * ratio(1, 2)),
            2);
}

TEST(Estimators, MinDisplacement) {
  const std::function<DeltaPoint(const DeltaPoint&)> shift = afp::shift_map;
  const auto near_apex = afp::estimate_min_displacement(
      shift, region_sampler("mass<=1/64,resolution=128"), kDeltaMetric, 500, 1);
  EXPECT_LE(near_apex.value, ratio(2, 64));
  const auto far = afp::estimate_min_displacement(
      shift, region_sampler("mass>=1/2"), kDeltaMetric, 2000, 1);
  EXPECT_GE(far.value, ratio(1, 2));
  const std::function<DeltaPoint(const DeltaPoint&)> id = [](const DeltaPoint& p) {
    return p;
  };
  EXPECT_EQ(afp::estimate_min_displacement(id, region_sampler("all"), kDeltaMetric,
                                           50, 1)
                .value,
            0);
}

afp::Retraction nearest() { return afp::nearest_point_retraction; }

TEST(Pipeline, ShiftOnHeavyRegion) {
  const auto heavy = region_sampler("mass>=1/2");
  const afp::Sampler<SparseVector> c = [heavy](afp::Rng& rng) {
    return heavy(rng).embed();
  };
  afp::PipelineOptions options;
  options.samples = 2000;
  options.pairs = 2000;
  options.seed = 7;
  const auto pipe = afp::compose_pipeline(afp::resolve_delta_map("shift"), nearest(), c,
                                          region_sampler("all"), options);
  const auto& rep = pipe.report;
  EXPECT_GE(rep.eta_hat, ratio(1, 2));
  EXPECT_EQ(rep.lipschitz_hat, 1);
  EXPECT_EQ(rep.epsilon, rep.eta_hat / (rep.lipschitz_hat + 2));
  EXPECT_GE(rep.epsilon, ratio(1, 6));
  EXPECT_TRUE(rep.certified);
  EXPECT_EQ(rep.chain_checks, 2000u);
  EXPECT_EQ(rep.chain_violations, 0u);
  EXPECT_EQ(rep.retraction_checks, 2000u);
  const auto x = P(2, ratio(1, 2), ratio(1, 4)).embed();
  EXPECT_EQ(pipe.map(x), P(3, ratio(1, 2), ratio(1, 4)).embed());
}

TEST(Pipeline, OffDeltaSamplesKeepTheChain) {
  const afp::Sampler<SparseVector> c = [](afp::Rng& rng) {
    const auto heavy = afp::DeltaRegion::parse("mass>=3/4,n<=8");
    SparseVector x = heavy.sample(rng).embed();
    x.add_to(afp::Index(1 + rng.below(10)), rng.rational_in(ratio(-1, 8), ratio(1, 8), 8));
    return x;
  };
  afp::PipelineOptions options;
  options.samples = 1000;
  options.pairs = 1000;
  const auto rep = afp::compose_pipeline(afp::resolve_delta_map("shift"), nearest(), c,
                                         region_sampler("all"), options)
                       .report;
  EXPECT_TRUE(rep.certified);
  EXPECT_EQ(rep.chain_violations, 0u);
  EXPECT_GE(rep.min_chain_slack, 0);
}

TEST(Pipeline, FixedPointMeansNoCertificate) {
  const afp::DeltaMap id{"identity", [](const DeltaPoint& p) { return p; }};
  afp::PipelineOptions options;
  options.samples = 100;
  options.pairs = 100;
  const auto heavy = region_sampler("all");
  const afp::Sampler<SparseVector> c = [heavy](afp::Rng& rng) { return heavy(rng).embed(); };
  const auto rep = afp::compose_pipeline(id, nearest(), c, heavy, options).report;
  EXPECT_EQ(rep.eta_hat, 0);
  EXPECT_EQ(rep.epsilon, 0);
  EXPECT_FALSE(rep.certified);
}

TEST(Pipeline, RejectsMapsThatAreNotRetractions) {
  const afp::Retraction to_apex = [](const SparseVector& x) {
    return afp::RetractionResult{DeltaPoint::apex(), x.l1_norm(), 1};
  };
  const auto all = region_sampler("all");
  const afp::Sampler<SparseVector> c = [all](afp::Rng& rng) { return all(rng).embed(); };
  EXPECT_THROW(afp::compose_pipeline(afp::resolve_delta_map("shift"), to_apex, c, all,
                                     {}),
               afp::NotARetraction);
}

TEST(DeltaMaps, PluginWithIndexShiftActsLikeShift) {
  const std::string path = ::testing::TempDir() + "afp_delta_plugin.txt";
  {
    std::ofstream out(path);
    out << "schema afp.piecewise/1\ndimension 2\nbox 0 1 0 1\n"
           "constraint x1 + x2 <= 1\nindex_shift 1\npiece => x1, x2\n";
  }
  const auto g = afp::resolve_delta_map("plugin:" + path);
  afp::Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_point(rng, 5, 8);
    EXPECT_EQ(g(p), afp::shift_map(p));
  }
  std::remove(path.c_str());
  EXPECT_THROW(afp::resolve_delta_map("baker"), afp::ConfigError);
}

}  // namespace
