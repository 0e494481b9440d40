#include "afp/delta.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "afp/errors.hpp"
#include "afp/maps.hpp"
#include "afp/separation.hpp"

namespace afp {

DeltaPoint DeltaPoint::make(std::uint64_t n, Rational a, Rational b) {
  if (n < 1) throw std::invalid_argument("DeltaPoint: triangle index < 1");
  if (a < 0 || b < 0 || a + b > 1) {
    throw std::invalid_argument("DeltaPoint: (" + to_string(a) + ", " +
                                to_string(b) + ") is outside the triangle");
  }
  if (a == 0 && b == 0) return apex();
  if (a == 0) {
    if (n == std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("DeltaPoint: triangle index overflow");
    }
    return DeltaPoint{n + 1, std::move(b), Rational(0)};
  }
  return DeltaPoint{n, std::move(a), std::move(b)};
}

SparseVector DeltaPoint::embed() const {
  std::vector<SparseVector::Entry> entries;
  if (a != 0) entries.push_back({Index(n), a});
  if (b != 0) entries.push_back({Index(n + 1), b});
  return SparseVector::from_sorted_unchecked(std::move(entries));
}

std::string to_string(const DeltaPoint& p) {
  return "(" + std::to_string(p.n) + ", " + to_string(p.a) + ", " +
         to_string(p.b) + ")";
}

std::optional<DeltaPoint> as_delta_point(const SparseVector& x) {
  const auto e = x.entries();
  if (e.empty()) return DeltaPoint::apex();
  if (e.size() > 2 || !x.is_nonnegative()) return std::nullopt;
  for (const auto& entry : e) {
    if (!entry.index.is_small()) return std::nullopt;
  }
  const std::uint64_t n = e[0].index.small_value();
  if (e.size() == 1) {
    if (e[0].value > 1) return std::nullopt;
    return DeltaPoint::make(n, e[0].value, Rational(0));
  }
  if (e[1].index.small_value() != n + 1) return std::nullopt;
  if (e[0].value + e[1].value > 1) return std::nullopt;
  return DeltaPoint::make(n, e[0].value, e[1].value);
}

Rational delta_distance(const DeltaPoint& p, const DeltaPoint& q) {
  const DeltaPoint& lo = p.n <= q.n ? p : q;
  const DeltaPoint& hi = p.n <= q.n ? q : p;
  if (lo.n == hi.n) return abs(lo.a - hi.a) + abs(lo.b - hi.b);
  if (hi.n - lo.n == 1) return lo.a + abs(lo.b - hi.a) + hi.b;
  return lo.a + lo.b + hi.a + hi.b;
}

DeltaPoint shift_map(const DeltaPoint& p) {
  if (p.is_apex()) return p;
  return DeltaPoint{p.n + 1, p.a, p.b};
}

Rational shift_displacement(const DeltaPoint& p) {
  return p.a + abs(p.a - p.b) + p.b;
}

RetractionResult nearest_point_retraction(const SparseVector& x) {
  std::vector<std::pair<std::uint64_t, Rational>> positive;
  Rational negative_mass(0), total(0);
  for (const auto& e : x.entries()) {
    if (e.value < 0) {
      negative_mass -= e.value;
      continue;
    }
    if (!e.index.is_small()) {
      throw std::out_of_range("nearest_point_retraction: index " +
                              e.index.to_string() + " exceeds 64 bits");
    }
    positive.emplace_back(e.index.small_value(), e.value);
    total += e.value;
  }

  RetractionResult best{DeltaPoint::apex(), total + negative_mass, 0};
  if (positive.empty()) return best;

  std::set<std::uint64_t> candidates;
  for (const auto& [i, v] : positive) {
    candidates.insert(i);
    if (i > 1) candidates.insert(i - 1);
  }
  auto value_at = [&](std::uint64_t i) {
    const auto it = std::lower_bound(
        positive.begin(), positive.end(), i,
        [](const auto& entry, std::uint64_t k) { return entry.first < k; });
    return it != positive.end() && it->first == i ? it->second : Rational(0);
  };

  bool first = true;
  for (const std::uint64_t n : candidates) {
    const Rational u = value_at(n);
    const Rational w = value_at(n + 1);
    Rational cost = total - u - w;
    Rational a = u, b = w;
    if (u + w > 1) {
      cost += u + w - 1;
      a = max_of(Rational(0), 1 - w);
      b = 1 - a;
    }
    ++best.candidates_examined;
    if (first || cost < best.distance - negative_mass) {
      best.point = DeltaPoint::make(n, a, b);
      best.distance = cost + negative_mass;
      first = false;
    }
  }
  return best;
}

SparseVector baker_affine(const SparseVector& x) {
  if (!x.is_nonnegative()) {
    throw DomainEscape("baker: argument has a negative coordinate");
  }
  const Rational mass = x.l1_norm();
  if (mass > 1) throw DomainEscape("baker: argument is outside the unit ball");
  std::vector<SparseVector::Entry> entries;
  entries.reserve(x.size() + 1);
  if (mass != 1) entries.push_back({Index(1), 1 - mass});
  for (const auto& e : x.entries()) {
    entries.push_back({e.index.successor(), e.value});
  }
  return SparseVector::from_sorted_unchecked(std::move(entries));
}

BakerCertificate baker_no_fixed_point_certificate(std::uint64_t support_bound) {
  if (support_bound < 1) {
    throw std::invalid_argument("baker certificate: support bound < 1");
  }
  BakerCertificate cert;
  cert.support_bound = support_bound;
  const auto var = [](std::uint64_t i) { return "x" + std::to_string(i); };
  cert.steps.push_back({var(support_bound + 1), "outside the support",
                        Rational(0)});
  for (std::uint64_t i = support_bound; i >= 1; --i) {
    cert.steps.push_back(
        {var(i), var(i) + " = " + var(i + 1) + " (coordinate " +
                     std::to_string(i + 1) + " of the fixed-point equation)",
         Rational(0)});
  }
  cert.steps.push_back({"|x|", "sum of x1.." + var(support_bound), Rational(0)});
  cert.steps.push_back({"x1", "x1 = 1 - |x| (coordinate 1)", Rational(1)});
  cert.infeasible = true;
  cert.contradiction = "x1 = 0 and x1 = 1";
  return cert;
}

E1Constants E1Constants::make(const Rational& delta, const Rational& M) {
  if (!(delta > 0) || delta > M) {
    throw std::invalid_argument("E1Constants: need 0 < delta <= M");
  }
  E1Constants k;
  k.delta = delta;
  k.M = M;
  const Rational q = delta / M;
  for (unsigned i = 1; i <= 4; ++i) {
    k.c[i - 1] = power(q, i - 1) / power_of_two(2 * static_cast<long>(i) + 1);
  }
  k.m = power(delta, 4) / (32 * power(M, 3));
  k.chain_bound = k.c[3] * delta / 2;
  return k;
}

E1Report e1_bounds_check(std::span<const SparseVector> points,
                         const PolyhedralSeminorm& rho,
                         const PolyhedralSeminorm& rho0,
                         const E1Constants& constants, std::size_t trials,
                         std::uint64_t seed, bool use_chain_bound) {
  if (points.size() < 4) {
    throw std::invalid_argument("e1_bounds_check: need at least four points");
  }
  for (std::size_t n = 0; n < points.size(); ++n) {
    const Rational r = rho(points[n]);
    if (r > constants.M) {
      throw HypothesisViolation("rho(x_" + std::to_string(n + 1) + ") = " +
                                to_string(r) + " exceeds M");
    }
    if (r < rho0(points[n])) {
      throw HypothesisViolation("rho < rho0 at x_" + std::to_string(n + 1));
    }
  }
  if (!is_span_separated(points, rho0, constants.delta)) {
    throw HypothesisViolation("points are not span-separated for delta = " +
                              to_string(constants.delta));
  }

  E1Report report;
  report.lower_constant = use_chain_bound ? constants.chain_bound : constants.m;
  Rng rng(seed);
  bool first = true;
  std::vector<std::size_t> k(4);
  for (std::size_t t = 0; t < trials; ++t) {
    std::set<std::size_t> chosen;
    while (chosen.size() < 4) chosen.insert(rng.below(points.size()));
    std::copy(chosen.begin(), chosen.end(), k.begin());

    std::array<Rational, 4> alpha;
    Rational weight(0);
    do {
      weight = 0;
      for (auto& a : alpha) {
        a = rng.rational_in(Rational(-1), Rational(1), 16);
        weight += abs(a);
      }
    } while (weight == 0);

    SparseVector v;
    for (std::size_t i = 0; i < 4; ++i) {
      if (alpha[i] != 0) v += points[k[i]] * alpha[i];
    }
    const Rational r = rho(v);
    if (r < rho0(v)) throw HypothesisViolation("rho < rho0 at a combination");
    const Rational per_unit = r / weight;
    const Rational lower = per_unit - report.lower_constant;
    const Rational upper = constants.M - per_unit;
    if (lower < 0) ++report.lower_violations;
    if (upper < 0) ++report.upper_violations;
    if (first) {
      report.min_lower_slack = lower;
      report.min_upper_slack = upper;
      first = false;
    } else {
      report.min_lower_slack = min_of(report.min_lower_slack, lower);
      report.min_upper_slack = min_of(report.min_upper_slack, upper);
    }
    ++report.trials;
  }
  return report;
}

DeltaRegion DeltaRegion::parse(std::string_view spec) {
  DeltaRegion region;
  if (spec == "all" || spec.empty()) return region;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const std::string term(spec.substr(start, comma - start));
    start = comma == std::string_view::npos ? spec.size() + 1 : comma + 1;
    auto value_after = [&](std::string_view prefix) -> std::optional<std::string> {
      if (term.rfind(prefix, 0) != 0) return std::nullopt;
      return term.substr(prefix.size());
    };
    try {
      if (auto v = value_after("mass>=")) {
        region.min_mass = parse_rational(*v);
      } else if (auto v2 = value_after("mass<=")) {
        region.max_mass = parse_rational(*v2);
      } else if (auto v3 = value_after("n<=")) {
        region.max_index = std::stoull(*v3);
      } else if (auto v4 = value_after("resolution=")) {
        region.resolution = std::stoull(*v4);
      } else {
        throw ConfigError("unknown region term '" + term + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad region term '" + term + "'");
    }
  }
  if (region.min_mass < 0 || region.max_mass > 1 ||
      region.min_mass > region.max_mass) {
    throw ConfigError("region mass bounds must satisfy 0 <= min <= max <= 1");
  }
  if (region.max_index < 1 || region.resolution < 1) {
    throw ConfigError("region needs n >= 1 and resolution >= 1");
  }
  return region;
}

std::string DeltaRegion::to_string() const {
  return "mass>=" + afp::to_string(min_mass) + ",mass<=" +
         afp::to_string(max_mass) + ",n<=" + std::to_string(max_index) +
         ",resolution=" + std::to_string(resolution);
}

bool DeltaRegion::contains(const DeltaPoint& p) const {
  const Rational mass = p.mass();
  if (mass < min_mass || mass > max_mass) return false;
  return p.n <= max_index || (p.b == 0 && p.n == max_index + 1);
}

DeltaPoint DeltaRegion::sample(Rng& rng) const {
  // Masses k/resolution inside [min_mass, max_mass].
  const Rational res(resolution);
  const Rational lo_scaled = min_mass * res;
  const Rational hi_scaled = max_mass * res;
  mpz_class lo = lo_scaled.numerator();
  mpz_cdiv_q(lo.get_mpz_t(), lo_scaled.numerator().get_mpz_t(),
             lo_scaled.denominator().get_mpz_t());
  mpz_class hi;
  mpz_fdiv_q(hi.get_mpz_t(), hi_scaled.numerator().get_mpz_t(),
             hi_scaled.denominator().get_mpz_t());
  if (lo > hi) {
    throw ConfigError("region " + to_string() + " has no grid point");
  }
  const std::uint64_t k =
      lo.get_ui() + rng.below(static_cast<std::uint64_t>(mpz_class(hi - lo).get_ui()) + 1);
  const std::uint64_t j = rng.below(k + 1);
  const std::uint64_t n = 1 + rng.below(max_index);
  const auto r = static_cast<std::int64_t>(resolution);
  return DeltaPoint::make(n, ratio(static_cast<std::int64_t>(j), r),
                          ratio(static_cast<std::int64_t>(k - j), r));
}

SparseVector sample_positive_ball(Rng& rng, std::uint64_t max_index,
                                  std::uint64_t resolution) {
  if (max_index < 1 || resolution < 1) {
    throw std::invalid_argument("sample_positive_ball: empty range");
  }
  const std::uint64_t support = 1 + rng.below(std::min<std::uint64_t>(4, max_index));
  std::set<std::uint64_t> indices;
  while (indices.size() < support) indices.insert(1 + rng.below(max_index));
  const Rational mass = rng.unit_rational(resolution);
  std::vector<std::uint64_t> weights;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < support; ++i) {
    weights.push_back(1 + rng.below(resolution));
    total += weights.back();
  }
  std::vector<SparseVector::Entry> entries;
  std::size_t i = 0;
  for (const auto idx : indices) {
    entries.push_back({Index(idx), mass * ratio(static_cast<std::int64_t>(weights[i++]),
                                                 static_cast<std::int64_t>(total))});
  }
  return SparseVector::from_unsorted(std::move(entries));
}

ChainedTriangles::ChainedTriangles(std::vector<SparseVector> points)
    : points_(std::move(points)) {}

SparseVector ChainedTriangles::embed(const DeltaPoint& p) const {
  if (p.is_apex()) return {};
  if (p.n > points_.size() || (p.b != 0 && p.n + 1 > points_.size())) {
    throw std::out_of_range("ChainedTriangles: triangle " +
                            std::to_string(p.n) + " is not in the chain");
  }
  SparseVector out = points_[p.n - 1] * p.a;
  if (p.b != 0) out += points_[p.n] * p.b;
  return out;
}

std::optional<DeltaPoint> ChainedTriangles::locate(const SparseVector& x) const {
  if (x.is_zero()) return DeltaPoint::apex();
  const auto l1 = PolyhedralSeminorm::l1();
  for (std::size_t n = 0; n + 1 < points_.size(); ++n) {
    const std::vector<SparseVector> pair = {points_[n], points_[n + 1]};
    const auto fit = distance_to_span_certified(l1, x, pair);
    if (fit.distance != 0) continue;
    const Rational& a = fit.coefficients[0];
    const Rational& b = fit.coefficients[1];
    if (a >= 0 && b >= 0 && a + b <= 1) {
      return DeltaPoint::make(n + 1, a, b);
    }
  }
  return std::nullopt;
}

Rational ChainedTriangles::Distortion::value() const {
  if (min_ratio == 0) throw std::logic_error("distortion: degenerate chain");
  return max_of(max_ratio, 1 / min_ratio);
}

ChainedTriangles::Distortion ChainedTriangles::distortion(
    const PolyhedralSeminorm& rho0, std::size_t pairs, std::uint64_t seed,
    std::uint64_t resolution) const {
  if (triangle_count() == 0) {
    throw std::invalid_argument("distortion: the chain has no triangle");
  }
  DeltaRegion region;
  region.max_index = triangle_count();
  region.resolution = resolution;
  Rng rng(seed);
  Distortion d;
  for (std::size_t i = 0; i < pairs; ++i) {
    const DeltaPoint p = region.sample(rng);
    const DeltaPoint q = region.sample(rng);
    const Rational base = delta_distance(p, q);
    if (base == 0) continue;
    const Rational r = rho0(embed(p) - embed(q)) / base;
    if (d.pairs == 0) {
      d.min_ratio = r;
      d.max_ratio = r;
    } else {
      d.min_ratio = min_of(d.min_ratio, r);
      d.max_ratio = max_of(d.max_ratio, r);
    }
    ++d.pairs;
  }
  return d;
}

Pipeline compose_pipeline(const DeltaMap& g, const Retraction& r,
                          const Sampler<SparseVector>& c_sampler,
                          const Sampler<DeltaPoint>& d_sampler,
                          const PipelineOptions& options) {
  if (options.samples == 0) {
    throw std::invalid_argument("compose_pipeline: no samples");
  }
  Rng rng(options.seed);
  PipelineReport rep;
  rep.seed = options.seed;

  for (std::size_t i = 0; i < options.samples; ++i) {
    const DeltaPoint p = d_sampler(rng);
    const RetractionResult back = r(p.embed());
    if (!(back.point == p) || back.distance != 0) {
      throw NotARetraction("retraction moves " + to_string(p) + " to " +
                           to_string(back.point));
    }
    ++rep.retraction_checks;
  }

  std::vector<SparseVector> xs, fxs;
  std::vector<Rational> dist_to_d;
  xs.reserve(options.samples);
  bool first = true;
  for (std::size_t i = 0; i < options.samples; ++i) {
    SparseVector x = c_sampler(rng);
    const RetractionResult y = r(x);
    const DeltaPoint gy = g(y.point);
    const Rational eta = delta_distance(y.point, gy);
    rep.eta_hat = first ? eta : min_of(rep.eta_hat, eta);
    first = false;
    xs.push_back(std::move(x));
    fxs.push_back(gy.embed());
    dist_to_d.push_back(y.distance);
  }
  rep.samples = xs.size();

  for (std::size_t t = 0; t < options.pairs; ++t) {
    const std::size_t i = rng.below(xs.size());
    const std::size_t j = rng.below(xs.size());
    const Rational base = l1_distance(xs[i], xs[j]);
    if (base == 0) continue;
    rep.lipschitz_hat = max_of(rep.lipschitz_hat, l1_distance(fxs[i], fxs[j]) / base);
    ++rep.pairs_used;
  }

  rep.epsilon = rep.eta_hat / (rep.lipschitz_hat + 2);
  rep.certified = rep.epsilon > 0;

  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Rational moved = l1_distance(xs[i], fxs[i]);
    const Rational required =
        dist_to_d[i] < rep.epsilon
            ? rep.eta_hat - (1 + rep.lipschitz_hat) * dist_to_d[i]
            : rep.epsilon;
    const Rational slack = moved - required;
    if (slack < 0) ++rep.chain_violations;
    rep.min_chain_slack = i == 0 ? slack : min_of(rep.min_chain_slack, slack);
    ++rep.chain_checks;
  }

  Pipeline out;
  out.report = rep;
  out.map = [g, r](const SparseVector& x) { return g(r(x).point).embed(); };
  return out;
}

DeltaMap resolve_delta_map(std::string_view spec) {
  if (spec == "shift") return {"shift", shift_map};
  constexpr std::string_view prefix = "plugin:";
  if (spec.substr(0, prefix.size()) != prefix) {
    throw ConfigError("unknown Delta map '" + std::string(spec) + "'");
  }
  const NamedMap plugin = load_piecewise_affine(std::string(spec.substr(prefix.size())));
  if (plugin.domain.dimension() != 2) {
    throw ConfigError("a Delta plugin must have dimension 2");
  }
  const std::uint64_t shift = plugin.index_shift;
  const PointMap f = plugin.map;
  return {plugin.name, [f, shift](const DeltaPoint& p) {
            const SparseVector y =
                f(SparseVector::from_dense(std::vector<Rational>{p.a, p.b}));
            try {
              return DeltaPoint::make(p.n + shift, y.get(1), y.get(2));
            } catch (const std::invalid_argument& e) {
              throw DomainEscape(f.name + ": " + e.what());
            }
          }};
}

}  // namespace afp
