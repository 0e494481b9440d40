#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afp/random.hpp"
#include "afp/rational.hpp"
#include "afp/seminorm.hpp"
#include "afp/sparse_vector.hpp"

namespace afp {

/// The point a·e_n + b·e_{n+1} of the fan Δ = ∪ co{0, e_n, e_{n+1}} ⊂ ℓ1.
///
/// Canonical form: a > 0 unless the point is the apex, which is (1, 0, 0).
/// A point with a = 0 < b is stored as (n + 1, b, 0).
struct DeltaPoint {
  std::uint64_t n = 1;
  Rational a;
  Rational b;

  /// Validates a, b ≥ 0, a + b ≤ 1, n ≥ 1 and canonicalizes.
  static DeltaPoint make(std::uint64_t n, Rational a, Rational b);
  static DeltaPoint apex() { return {}; }

  bool is_apex() const { return a == 0; }
  Rational mass() const { return a + b; }
  SparseVector embed() const;

  friend bool operator==(const DeltaPoint&, const DeltaPoint&) = default;
};

std::string to_string(const DeltaPoint& p);

/// The canonical point equal to x, or nullopt when x ∉ Δ.
std::optional<DeltaPoint> as_delta_point(const SparseVector& x);

/// Exact ℓ1 distance between canonical points.
Rational delta_distance(const DeltaPoint& p, const DeltaPoint& q);

/// (n, a, b) ↦ (n + 1, a, b); the apex is fixed.
DeltaPoint shift_map(const DeltaPoint& p);
/// ‖p − shift(p)‖₁ = a + |a − b| + b.
Rational shift_displacement(const DeltaPoint& p);

struct RetractionResult {
  DeltaPoint point;
  /// ‖x − point‖₁, for the unclamped x.
  Rational distance;
  std::size_t candidates_examined = 0;
};

/// ℓ1-nearest point of Δ. Negative coordinates are first clamped to 0,
/// which never changes the nearest point. Triangles n with n or n + 1 in the
/// support are examined; ties go to the lowest n and, within a triangle, to
/// the lexicographically smallest (a, b). Zero maps to the apex.
RetractionResult nearest_point_retraction(const SparseVector& x);

/// x ↦ (1 − ‖x‖₁)e₁ + Sx on the positive unit ball of ℓ1, where S is the
/// right shift. Throws DomainEscape outside the ball.
SparseVector baker_affine(const SparseVector& x);

struct PropagationStep {
  std::string variable;
  std::string equation;
  Rational value;
};

struct BakerCertificate {
  std::uint64_t support_bound = 0;
  std::vector<PropagationStep> steps;
  bool infeasible = false;
  std::string contradiction;
};

/// Propagates the fixed-point equations x₁ = 1 − Σx_i, x_{n+1} = x_n for a
/// point supported in {1, …, N} down to a contradiction.
BakerCertificate baker_no_fixed_point_certificate(std::uint64_t support_bound);

/// Constants of the two-sided bound m·Σ|α_i| ≤ ρ(Σα_i x_{k_i}) ≤ M·Σ|α_i|.
struct E1Constants {
  Rational delta;
  Rational M;
  /// c_i = (δ/M)^{i−1} / 2^{2i+1}.
  std::array<Rational, 4> c;
  /// δ⁴ / (32 M³).
  Rational m;
  /// ½·c₄·δ = δ⁴ / (1024 M³), the bound the term-by-term chain yields.
  Rational chain_bound;

  /// Requires 0 < δ ≤ M.
  static E1Constants make(const Rational& delta, const Rational& M);
  Rational c_sum() const { return c[0] + c[1] + c[2] + c[3]; }
};

struct E1Report {
  std::size_t trials = 0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
  /// min over trials of ρ(v)/Σ|α| − bound and M − ρ(v)/Σ|α|.
  Rational min_lower_slack;
  Rational min_upper_slack;
  /// The lower constant tested (m, or chain_bound when requested).
  Rational lower_constant;
};

/// Checks both inequalities on `trials` random combinations of four points
/// with increasing indices and rational coefficients in [−1, 1].
/// Throws HypothesisViolation when some ρ(x_n) > M, ρ < ρ0 at a sample, or
/// the points are not span-separated for δ under ρ0.
E1Report e1_bounds_check(std::span<const SparseVector> points,
                         const PolyhedralSeminorm& rho,
                         const PolyhedralSeminorm& rho0,
                         const E1Constants& constants, std::size_t trials,
                         std::uint64_t seed, bool use_chain_bound = false);

/// Subset of Δ: triangles 1..max_index, mass a + b in [min_mass, max_mass],
/// coordinates on a 1/resolution grid.
struct DeltaRegion {
  Rational min_mass{0};
  Rational max_mass{1};
  std::uint64_t max_index = 32;
  std::uint64_t resolution = 64;

  /// "all", or comma-separated terms among mass>=q, mass<=q, n<=k,
  /// resolution=k. Throws ConfigError.
  static DeltaRegion parse(std::string_view spec);
  std::string to_string() const;
  bool contains(const DeltaPoint& p) const;
  DeltaPoint sample(Rng& rng) const;
};

/// Random x ≥ 0 with ‖x‖₁ ≤ 1, support of at most four indices ≤ max_index.
SparseVector sample_positive_ball(Rng& rng, std::uint64_t max_index,
                                  std::uint64_t resolution);

/// The chain ∪ co{0, x_n, x_{n+1}} built on points x_1, x_2, ….
class ChainedTriangles {
 public:
  explicit ChainedTriangles(std::vector<SparseVector> points);

  std::size_t triangle_count() const {
    return points_.size() < 2 ? 0 : points_.size() - 1;
  }
  const std::vector<SparseVector>& points() const { return points_; }

  /// a·x_n + b·x_{n+1}; n must be a triangle of the chain.
  SparseVector embed(const DeltaPoint& p) const;
  /// Coordinates of x in the chain, if x lies on it.
  std::optional<DeltaPoint> locate(const SparseVector& x) const;
  bool contains(const SparseVector& x) const { return locate(x).has_value(); }

  struct Distortion {
    Rational min_ratio;
    Rational max_ratio;
    std::size_t pairs = 0;
    /// max(max_ratio, 1/min_ratio).
    Rational value() const;
  };
  /// Sampled ratios ρ0(embed p − embed q) / ‖p − q‖_Δ over distinct pairs.
  Distortion distortion(const PolyhedralSeminorm& rho0, std::size_t pairs,
                        std::uint64_t seed, std::uint64_t resolution = 32) const;

 private:
  std::vector<SparseVector> points_;
};

template <class P>
using Sampler = std::function<P(Rng&)>;
template <class P>
using Metric = std::function<Rational(const P&, const P&)>;

struct Estimate {
  Rational value;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// max dist(f p, f q)/dist(p, q) over sampled pairs; pairs with p = q are
/// skipped.
template <class P>
Estimate estimate_lipschitz(const std::function<P(const P&)>& f,
                            const Sampler<P>& sample, const Metric<P>& dist,
                            std::size_t pairs, std::uint64_t seed) {
  Rng rng(seed);
  Estimate e;
  for (std::size_t i = 0; i < pairs; ++i) {
    const P p = sample(rng);
    const P q = sample(rng);
    const Rational d = dist(p, q);
    if (d == 0) {
      ++e.skipped;
      continue;
    }
    e.value = max_of(e.value, dist(f(p), f(q)) / d);
    ++e.used;
  }
  return e;
}

/// min dist(x, f x) over samples: an upper estimate of the infimum.
template <class P>
Estimate estimate_min_displacement(const std::function<P(const P&)>& f,
                                   const Sampler<P>& sample,
                                   const Metric<P>& dist, std::size_t samples,
                                   std::uint64_t seed) {
  Rng rng(seed);
  Estimate e;
  for (std::size_t i = 0; i < samples; ++i) {
    const P x = sample(rng);
    const Rational d = dist(x, f(x));
    e.value = e.used == 0 ? d : min_of(e.value, d);
    ++e.used;
  }
  return e;
}

struct DeltaMap {
  std::string name;
  std::function<DeltaPoint(const DeltaPoint&)> apply;
  DeltaPoint operator()(const DeltaPoint& p) const { return apply(p); }
};

using Retraction = std::function<RetractionResult(const SparseVector&)>;

struct PipelineOptions {
  std::size_t samples = 1000;
  std::size_t pairs = 1000;
  std::uint64_t seed = 1;
};

struct PipelineReport {
  Rational eta_hat;
  Rational lipschitz_hat;
  /// η̂ / (L̂ + 2).
  Rational epsilon;
  bool certified = false;
  std::size_t samples = 0;
  std::size_t pairs_used = 0;
  std::uint64_t seed = 0;
  std::size_t retraction_checks = 0;
  std::size_t chain_checks = 0;
  std::size_t chain_violations = 0;
  /// min over samples of dist(x, f x) − required lower bound.
  Rational min_chain_slack;
};

struct Pipeline {
  std::function<SparseVector(const SparseVector&)> map;
  PipelineReport report;
};

/// f = g ∘ r on points drawn from `c_sampler`. η̂ is the least ‖y − g y‖₁
/// over retracted samples y = r(x), L̂ the largest ratio ‖f x − f x'‖/‖x − x'‖
/// over sampled pairs. Every sample is then checked against
/// ‖x − f x‖ ≥ η̂ − (1 + L̂)·dist(x, Δ) when dist(x, Δ) < ε and against
/// ‖x − f x‖ ≥ ε otherwise. Throws NotARetraction when r moves a point drawn
/// from `d_sampler`.
Pipeline compose_pipeline(const DeltaMap& g, const Retraction& r,
                          const Sampler<SparseVector>& c_sampler,
                          const Sampler<DeltaPoint>& d_sampler,
                          const PipelineOptions& options);

/// shift, or plugin:<path> for a piecewise-affine map of (a, b) with an
/// index shift. Throws ConfigError.
DeltaMap resolve_delta_map(std::string_view spec);

}  // namespace afp
