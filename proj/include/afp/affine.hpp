#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "afp/domain.hpp"
#include "afp/errors.hpp"
#include "afp/random.hpp"
#include "afp/rational.hpp"
#include "afp/seminorm.hpp"
#include "afp/sparse_vector.hpp"

namespace afp {

/// A self-map together with what is declared about it. `in_domain` may be
/// empty, meaning the whole space.
template <class Point>
struct MapDescriptor {
  std::string name;
  std::function<Point(const Point&)> apply;
  bool affine = false;
  std::function<bool(const Point&)> in_domain;

  Point operator()(const Point& p) const { return apply(p); }
  bool contains(const Point& p) const { return !in_domain || in_domain(p); }
};

/// y_1, y_2 = f(y_1), ..., y_{steps+1}. Throws DomainEscape if y_1 or any
/// iterate is outside the declared domain.
template <class Point>
std::vector<Point> iterate_orbit(const MapDescriptor<Point>& f, const Point& y1,
                                 std::size_t steps) {
  if (!f.contains(y1)) throw DomainEscape(f.name + ": start outside domain");
  std::vector<Point> orbit;
  orbit.reserve(steps + 1);
  orbit.push_back(y1);
  for (std::size_t k = 1; k <= steps; ++k) {
    Point next = f(orbit.back());
    if (!f.contains(next)) {
      throw DomainEscape(f.name + ": iterate " + std::to_string(k + 1) +
                         " left the domain");
    }
    orbit.push_back(std::move(next));
  }
  return orbit;
}

/// Running Cesàro data. The average x_k = y_sum / k is derived on demand so
/// the exact sum is never rounded.
template <class Point>
struct CesaroState {
  std::size_t k = 0;
  Point first;  // y_1
  Point sum;    // y_1 + … + y_k
  Point next;   // y_{k+1} = f(y_k)

  Point average() const { return sum * ratio(1, static_cast<long>(k)); }
  /// (y_1 − y_{k+1}) / k, which equals x_k − f(x_k) for affine f.
  Point telescoped_displacement() const {
    return (first - next) * ratio(1, static_cast<long>(k));
  }
};

enum class CesaroEvaluation {
  /// Evaluate f at x_k and measure x_k − f(x_k).
  Direct,
  /// Use (y_1 − y_{k+1})/k; only valid for maps declared affine.
  Telescoping,
};

template <class Point>
struct CesaroStep {
  const CesaroState<Point>& state;
  Rational residual;       // ‖x_k − f(x_k)‖
  bool identity_checked;   // Direct mode on an affine map
  bool identity_holds;     // x_k − f(x_k) == (y_1 − y_{k+1})/k exactly
};

/// Streams Cesàro averages of the orbit of y1 for k = 1..k_max. The sink
/// returns false to stop early. In Direct mode x_k must stay in the domain
/// (it does whenever the domain is convex and f is a self-map).
template <class Point>
void cesaro_sequence(const MapDescriptor<Point>& f, const Point& y1,
                     std::size_t k_max,
                     const std::function<Rational(const Point&)>& norm,
                     const std::function<bool(const CesaroStep<Point>&)>& sink,
                     CesaroEvaluation mode = CesaroEvaluation::Direct) {
  if (mode == CesaroEvaluation::Telescoping && !f.affine) {
    throw std::invalid_argument(f.name +
                                ": telescoping evaluation needs an affine map");
  }
  if (!f.contains(y1)) throw DomainEscape(f.name + ": start outside domain");
  CesaroState<Point> state{0, y1, Point{}, y1};
  state.sum = y1 * Rational(0);
  for (std::size_t k = 1; k <= k_max; ++k) {
    Point yk = std::move(state.next);
    state.sum += yk;
    state.next = f(yk);
    if (!f.contains(state.next)) {
      throw DomainEscape(f.name + ": iterate " + std::to_string(k + 1) +
                         " left the domain");
    }
    state.k = k;
    Rational residual;
    bool checked = false, holds = false;
    if (mode == CesaroEvaluation::Direct) {
      const Point x = state.average();
      if (!f.contains(x)) {
        throw DomainEscape(f.name + ": average " + std::to_string(k) +
                           " left the domain");
      }
      const Point displacement = x - f(x);
      residual = norm(displacement);
      if (f.affine) {
        checked = true;
        holds = displacement == state.telescoped_displacement();
      }
    } else {
      residual = norm(state.telescoped_displacement());
    }
    if (!sink(CesaroStep<Point>{state, residual, checked, holds})) return;
  }
}

template <class Point>
struct AffineCounterexample {
  Point x;
  Point y;
  Rational t;
};

/// f(t·x + (1−t)·y) == t·f(x) + (1−t)·f(y), exactly.
template <class Point>
bool check_affine_triple(const MapDescriptor<Point>& f, const Point& x,
                         const Point& y, const Rational& t) {
  const Rational s = 1 - t;
  return f(x * t + y * s) == f(x) * t + f(y) * s;
}

/// Exact affinity test on `trials` sampled triples. Returns the first failing
/// triple, or nullopt when all pass.
template <class Point>
std::optional<AffineCounterexample<Point>> verify_affine(
    const MapDescriptor<Point>& f, const std::function<Point(Rng&)>& sampler,
    std::size_t trials, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    Point x = sampler(rng);
    Point y = sampler(rng);
    const auto den = static_cast<long>(rng.between(1, 32));
    const Rational t = ratio(rng.between(0, den), den);
    if (!check_affine_triple(f, x, y, t)) {
      return AffineCounterexample<Point>{std::move(x), std::move(y), t};
    }
  }
  return std::nullopt;
}

struct ClusterResult {
  SparseVector point;
  Rational residual;
  std::size_t depth = 0;  // halvings performed before acceptance
};

/// Nested-halving extraction of a cluster point of `sequence` inside the
/// given box: at each level keep the closed half-box (all axes bisected)
/// that holds the most remaining terms, preferring the one with the latest
/// term on ties. Accepts the latest retained term or the box centre once
/// ρ(f(x) − x) ≤ tolerance; nullopt after `max_depth` levels.
std::optional<ClusterResult> cluster_fixed_point(
    const MapDescriptor<SparseVector>& f, std::span<const SparseVector> sequence,
    const ConvexDomain& box, const PolyhedralSeminorm& rho,
    const Rational& tolerance, std::size_t max_depth = 64);

}  // namespace afp
