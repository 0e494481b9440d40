#include "afp/app.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "afp/affine.hpp"
#include "afp/delta.hpp"
#include "afp/errors.hpp"
#include "afp/kkm.hpp"
#include "afp/maps.hpp"
#include "afp/measure.hpp"
#include "afp/random.hpp"
#include "afp/separation.hpp"

namespace afp {

namespace {

enum class Kind { String, Unsigned, Fraction, Boolean, Descriptor };

struct Key {
  const char* name;
  Kind kind;
  Json fallback;
};

const std::vector<Key>& common_keys() {
  static const std::vector<Key> keys = {
      {"seed", Kind::Unsigned, 1},
      {"report", Kind::String, nullptr},
      {"csv", Kind::String, nullptr},
  };
  return keys;
}

const std::vector<Key>& subcommand_keys(const std::string& sub) {
  static const std::vector<Key> kkm = {
      {"map", Kind::String, nullptr},
      {"epsilon", Kind::Fraction, "1/10"},
      {"max_order", Kind::Unsigned, 64},
      {"resolution", Kind::Unsigned, 20},
      {"domain", Kind::Descriptor, nullptr},
      {"seminorm", Kind::Descriptor, "l1"},
      {"anchor", Kind::Descriptor, nullptr},
      {"allow_zero_shrink", Kind::Boolean, true},
  };
  static const std::vector<Key> cesaro = {
      {"map", Kind::String, nullptr},
      {"start", Kind::Descriptor, nullptr},
      {"steps", Kind::Unsigned, 100},
      {"mode", Kind::String, "direct"},
      {"seminorm", Kind::Descriptor, "l1"},
      {"partition", Kind::String, "dyadic"},
  };
  static const std::vector<Key> ex2 = {
      {"start", Kind::Descriptor, "diffuse"},
      {"steps", Kind::Unsigned, 10},
      {"support_bound", Kind::Unsigned, 64},
      {"partition", Kind::String, "dyadic"},
  };
  static const std::vector<Key> delta = {
      {"op", Kind::String, nullptr},
      {"map", Kind::String, "shift"},
      {"samples", Kind::Unsigned, 1000},
      {"pairs", Kind::Unsigned, 1000},
      {"region", Kind::String, "mass>=1/2"},
      {"p", Kind::String, nullptr},
      {"q", Kind::String, nullptr},
      {"x", Kind::Descriptor, nullptr},
      {"delta", Kind::Fraction, "9/10"},
      {"M", Kind::Fraction, "1"},
      {"trials", Kind::Unsigned, 10000},
      {"points", Kind::Unsigned, 64},
      {"family", Kind::String, "basis"},
      {"lower_bound", Kind::String, "stated"},
      {"support_bound", Kind::Unsigned, 64},
  };
  static const std::vector<Key> separate = {
      {"stream", Kind::String, "basis"},
      {"mode", Kind::String, "span"},
      {"rho0", Kind::Descriptor, "l1"},
      {"delta", Kind::Fraction, "1/2"},
      {"limit", Kind::Unsigned, 16},
      {"dimension", Kind::Unsigned, 8},
  };
  if (sub == "kkm") return kkm;
  if (sub == "cesaro") return cesaro;
  if (sub == "ex2") return ex2;
  if (sub == "delta") return delta;
  if (sub == "separate") return separate;
  throw ConfigError("unknown subcommand '" + sub +
                    "' (expected kkm, cesaro, ex2, delta or separate)");
}

std::uint64_t parse_unsigned(const std::string& text, std::string_view what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(what) + ": expected a non-negative integer, got '" +
                      text + "'");
  }
  return value;
}

Json coerce(const Key& key, const Json& value) {
  const std::string what = std::string("config key '") + key.name + "'";
  switch (key.kind) {
    case Kind::String:
      if (!value.is_string()) throw ConfigError(what + ": expected a string");
      return value;
    case Kind::Unsigned:
      if (value.is_number_unsigned()) return value;
      if (value.is_number_integer()) {
        const auto v = value.get<std::int64_t>();
        if (v < 0) throw ConfigError(what + ": must be non-negative");
        return static_cast<std::uint64_t>(v);
      }
      if (value.is_string()) return parse_unsigned(value.get<std::string>(), what);
      throw ConfigError(what + ": expected an integer");
    case Kind::Fraction:
      return to_string(rational_from_json(value, what));
    case Kind::Boolean:
      if (value.is_boolean()) return value;
      if (value == "true") return true;
      if (value == "false") return false;
      throw ConfigError(what + ": expected true or false");
    case Kind::Descriptor:
      if (!value.is_string() && !value.is_object()) {
        throw ConfigError(what + ": expected a name, a path or an object");
      }
      return value;
  }
  return value;
}

const std::string& str(const Json& cfg, const char* key) {
  return cfg.at(key).get_ref<const std::string&>();
}
std::uint64_t u64(const Json& cfg, const char* key) {
  return cfg.at(key).get<std::uint64_t>();
}
std::size_t count(const Json& cfg, const char* key) {
  return static_cast<std::size_t>(u64(cfg, key));
}
Rational rat(const Json& cfg, const char* key) {
  return parse_rational(str(cfg, key));
}
const std::string& required(const Json& cfg, const char* key) {
  if (cfg.at(key).is_null()) {
    throw ConfigError(str(cfg, "subcommand") + " needs '" + key + "'");
  }
  return str(cfg, key);
}

void put(Json& obj, const std::string& key, const Rational& value) {
  obj[key] = to_string(value);
  obj[key + "_float"] = value.to_double();
}

std::string render_double(double v) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, ec == std::errc{} ? ptr : buffer);
}

Json floats(const SparseVector& v) {
  Json out = Json::object();
  for (const auto& e : v.entries()) out[e.index.to_string()] = e.value.to_double();
  return out;
}

Json load_descriptor(const Json& value) {
  return value.is_string() ? read_json_file(value.get<std::string>()) : value;
}

PolyhedralSeminorm seminorm_of(const Json& value) {
  if (value == "l1") return PolyhedralSeminorm::l1();
  if (value == "linf") return PolyhedralSeminorm::linf();
  return seminorm_from_json(load_descriptor(value));
}

/// "0", "" or "i:v,i:v,…".
SparseVector sparse_spec(const std::string& text, std::string_view what) {
  if (text.empty() || text == "0") return {};
  std::vector<SparseVector::Entry> entries;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(std::string(what) + ": expected index:value, got '" + item + "'");
    }
    const auto index = parse_unsigned(item.substr(0, colon), what);
    if (index == 0) throw ConfigError(std::string(what) + ": indices start at 1");
    try {
      entries.push_back({Index(index), parse_rational(item.substr(colon + 1))});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(what) + ": " + e.what());
    }
  }
  return SparseVector::from_unsorted(std::move(entries));
}

SparseVector vector_arg(const Json& value, std::string_view what) {
  return value.is_object() ? vector_from_json(value, what)
                           : sparse_spec(value.get<std::string>(), what);
}

/// "n:a:b".
DeltaPoint delta_point_spec(const std::string& text, std::string_view what) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? first : text.find(':', first + 1);
  if (second == std::string::npos) {
    throw ConfigError(std::string(what) + ": expected n:a:b, got '" + text + "'");
  }
  try {
    return DeltaPoint::make(parse_unsigned(text.substr(0, first), what),
                            parse_rational(text.substr(first + 1, second - first - 1)),
                            parse_rational(text.substr(second + 1)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

PartitionRule partition_of(const std::string& spec) {
  if (spec == "dyadic") return PartitionRule::dyadic();
  constexpr std::string_view prefix = "p-adic:";
  if (spec.rfind(prefix, 0) == 0) {
    const auto p = parse_unsigned(spec.substr(prefix.size()), "partition");
    bool prime = p >= 2;
    for (std::uint64_t d = 2; prime && d * d <= p; ++d) prime = p % d != 0;
    if (!prime) throw ConfigError("partition: " + std::to_string(p) + " is not prime");
    return PartitionRule::p_adic(p);
  }
  throw ConfigError("unknown partition '" + spec + "' (dyadic or p-adic:<prime>)");
}

FiniteMeasureModel measure_start(const Json& value) {
  if (value.is_object()) return measure_from_json(value);
  const auto& text = value.get<std::string>();
  if (text == "diffuse") return FiniteMeasureModel::pure_diffuse();
  if (text.rfind("atom:", 0) == 0) {
    try {
      const Index n = Index::parse(text.substr(5));
      if (n.is_zero()) throw ConfigError("start: atoms start at 1");
      return FiniteMeasureModel::dirac(n);
    } catch (const std::invalid_argument&) {
      throw ConfigError("start: bad atom '" + text + "'");
    }
  }
  return measure_from_json(read_json_file(text));
}

struct Outcome {
  Json results;
  std::string csv;
};

Json series_row(std::size_t k, const Rational& residual) {
  Json row;
  row["k"] = k;
  put(row, "residual", residual);
  return row;
}

// ---------------------------------------------------------------- kkm

Outcome run_kkm(const Json& cfg) {
  const NamedMap nm = resolve_map(required(cfg, "map"));
  const ConvexDomain C = cfg["domain"].is_null()
                             ? nm.domain
                             : domain_from_json(load_descriptor(cfg["domain"]));
  if (C.dimension() != nm.domain.dimension()) {
    throw ConfigError("domain has dimension " + std::to_string(C.dimension()) +
                      " but map '" + nm.name + "' acts in dimension " +
                      std::to_string(nm.domain.dimension()));
  }
  const PolyhedralSeminorm rho = seminorm_of(cfg["seminorm"]);
  const Rational epsilon = rat(cfg, "epsilon");
  if (epsilon <= 0) throw ConfigError("epsilon must be positive");

  KkmOptions options;
  options.resolution = count(cfg, "resolution");
  options.max_order = u64(cfg, "max_order");
  options.allow_zero_shrink = cfg["allow_zero_shrink"].get<bool>();
  if (options.resolution == 0) throw ConfigError("resolution must be positive");
  if (!cfg["anchor"].is_null()) options.anchor = vector_arg(cfg["anchor"], "anchor");

  const KkmResult found = find_epsilon_fixed_point(nm.map, C, rho, epsilon, options);
  const Witness& w = found.witness;
  const Rational recheck = rho(nm.map(w.point) - w.point);

  Json results;
  results["map"] = nm.name;
  results["dimension"] = C.dimension();
  results["seminorm"] = seminorm_to_json(rho);
  put(results, "epsilon", epsilon);
  Json witness;
  witness["point"] = vector_to_json(w.point);
  witness["point_float"] = floats(w.point);
  Json weights = Json::array();
  for (const auto& t : w.barycentric.weights) weights.push_back(to_string(t));
  witness["barycentric"] = weights;
  witness["carrier"] = w.carrier;
  results["witness"] = witness;
  put(results, "residual", w.residual);
  results["order"] = w.order;
  results["net_size"] = found.net_size;
  results["lattice_vertices_scanned"] = found.lattice_vertices_scanned;
  put(results, "shrink", found.shrink);
  results["verified"] = C.contains(w.point) && recheck == w.residual && recheck < epsilon;
  return {results, {}};
}

// ---------------------------------------------------------------- cesaro

template <class Point>
Outcome cesaro_series(const MapDescriptor<Point>& f, const Point& start,
                      const std::function<Rational(const Point&)>& norm,
                      const Json& cfg, Json start_echo) {
  const std::string& mode_name = str(cfg, "mode");
  CesaroEvaluation mode;
  if (mode_name == "direct") {
    mode = CesaroEvaluation::Direct;
  } else if (mode_name == "telescoping") {
    mode = CesaroEvaluation::Telescoping;
    if (!f.affine) throw ConfigError(f.name + ": telescoping needs an affine map");
  } else {
    throw ConfigError("mode must be direct or telescoping");
  }
  const std::size_t steps = count(cfg, "steps");
  Json series = Json::array();
  std::ostringstream csv;
  csv << "k,residual,residual_float\n";
  std::size_t checked = 0;
  bool holds = true;
  Rational last;
  cesaro_sequence<Point>(
      f, start, steps, norm,
      [&](const CesaroStep<Point>& s) {
        series.push_back(series_row(s.state.k, s.residual));
        csv << s.state.k << ',' << to_string(s.residual) << ','
            << render_double(s.residual.to_double()) << '\n';
        if (s.identity_checked) {
          ++checked;
          holds = holds && s.identity_holds;
        }
        last = s.residual;
        return true;
      },
      mode);

  Json results;
  results["map"] = f.name;
  results["affine"] = f.affine;
  results["start"] = std::move(start_echo);
  results["steps"] = steps;
  results["mode"] = mode_name;
  if (steps > 0) put(results, "final_residual", last);
  results["identity_checked"] = checked;
  results["identity_holds"] = holds;
  results["series"] = std::move(series);
  return {results, csv.str()};
}

Outcome run_cesaro(const Json& cfg) {
  const std::string& name = required(cfg, "map");
  const Json& start = cfg["start"];
  if (name == "ex2") {
    const Ex2Map m(partition_of(str(cfg, "partition")));
    MapDescriptor<FiniteMeasureModel> f{
        "ex2", [m](const FiniteMeasureModel& x) { return m(x); }, true,
        [](const FiniteMeasureModel& x) { return x.is_probability(); }};
    const FiniteMeasureModel mu0 = measure_start(start.is_null() ? Json("diffuse") : start);
    return cesaro_series<FiniteMeasureModel>(
        f, mu0, [](const FiniteMeasureModel& x) { return x.tv_norm(); }, cfg,
        measure_to_json(mu0));
  }
  const PolyhedralSeminorm rho = seminorm_of(cfg["seminorm"]);
  const std::function<Rational(const SparseVector&)> norm =
      [rho](const SparseVector& x) { return rho(x); };
  if (name == "baker") {
    MapDescriptor<SparseVector> f{
        "baker", baker_affine, true,
        [](const SparseVector& x) { return x.is_nonnegative() && x.l1_norm() <= 1; }};
    const SparseVector y1 = start.is_null() ? SparseVector{} : vector_arg(start, "start");
    return cesaro_series<SparseVector>(f, y1, norm, cfg, vector_to_json(y1));
  }
  const NamedMap nm = resolve_map(name);
  std::vector<Rational> coords;
  if (start.is_null()) {
    coords = nm.domain.lower();
  } else if (start.is_object()) {
    coords = vector_from_json(start, "start").to_dense(nm.domain.dimension());
  } else {
    std::stringstream in(start.get<std::string>());
    std::string item;
    try {
      while (std::getline(in, item, ',')) coords.push_back(parse_rational(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("start: ") + e.what());
    }
  }
  if (coords.size() != nm.domain.dimension()) {
    throw ConfigError("start needs " + std::to_string(nm.domain.dimension()) +
                      " comma-separated coordinates");
  }
  const SparseVector y1 = SparseVector::from_dense(coords);
  return cesaro_series<SparseVector>(nm.map, y1, norm, cfg, vector_to_json(y1));
}

// ---------------------------------------------------------------- ex2

Json certificate_json(const CertificateReport& c) {
  Json out;
  out["schema"] = "afp.certificate/1";
  out["support_bound"] = c.support_bound;
  out["partition"] = c.partition;
  Json ks = Json::array();
  for (const auto& k : c.forward_indices) ks.push_back(k.to_string());
  out["forward_indices"] = ks;
  Json steps = Json::array();
  for (const auto& s : c.steps) {
    Json row;
    row["phase"] = s.phase;
    row["variable"] = s.variable;
    row["equation"] = s.equation;
    row["premises"] = s.premises;
    row["j"] = s.j;
    row["value"] = to_string(s.value);
    steps.push_back(row);
  }
  out["steps"] = steps;
  out["complete"] = c.complete;
  out["forced_total"] = to_string(c.forced_total);
  out["infeasible"] = c.infeasible;
  out["failure"] = c.failure;
  return out;
}

Outcome run_ex2(const Json& cfg) {
  const Ex2Map m(partition_of(str(cfg, "partition")));
  const FiniteMeasureModel mu0 = measure_start(cfg["start"]);
  if (!mu0.is_probability()) {
    throw ConfigError("start must be a probability measure, got " + to_string(mu0));
  }
  const std::size_t steps = count(cfg, "steps");
  const auto orbit = orbit_displacement(m, mu0, steps);

  std::vector<Rational> averaged;
  if (steps > 0) {
    MapDescriptor<FiniteMeasureModel> f{
        "ex2", [m](const FiniteMeasureModel& x) { return m(x); }, true,
        [](const FiniteMeasureModel& x) { return x.is_probability(); }};
    cesaro_sequence<FiniteMeasureModel>(
        f, mu0, steps, [](const FiniteMeasureModel& x) { return x.tv_norm(); },
        [&](const CesaroStep<FiniteMeasureModel>& s) {
          averaged.push_back(s.residual);
          return true;
        });
  }

  Json orbit_rows = Json::array(), cesaro_rows = Json::array();
  std::ostringstream csv;
  csv << "k,orbit_residual,orbit_residual_float,cesaro_residual,cesaro_residual_float\n";
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const auto& [k, r] = orbit[i];
    orbit_rows.push_back(series_row(k, r));
    cesaro_rows.push_back(series_row(k, averaged[i]));
    csv << k << ',' << to_string(r) << ',' << render_double(r.to_double()) << ','
        << to_string(averaged[i]) << ',' << render_double(averaged[i].to_double())
        << '\n';
  }

  Json results;
  results["partition"] = m.partition().name();
  results["start"] = measure_to_json(mu0);
  results["steps"] = steps;
  results["orbit_residuals"] = orbit_rows;
  results["cesaro_residuals"] = cesaro_rows;
  results["certificate"] =
      certificate_json(no_fixed_point_certificate(m, count(cfg, "support_bound")));
  return {results, csv.str()};
}

// ---------------------------------------------------------------- delta

Json delta_point_json(const DeltaPoint& p) {
  Json out;
  out["n"] = p.n;
  out["a"] = to_string(p.a);
  out["b"] = to_string(p.b);
  out["text"] = to_string(p);
  return out;
}

Json estimate_json(const Estimate& e) {
  Json out;
  put(out, "value", e.value);
  out["used"] = e.used;
  out["skipped"] = e.skipped;
  return out;
}

Outcome delta_distance_op(const Json& cfg) {
  const DeltaPoint p = delta_point_spec(required(cfg, "p"), "p");
  const DeltaPoint q = delta_point_spec(required(cfg, "q"), "q");
  const Rational d = delta_distance(p, q);
  const Rational dense = l1_distance(p.embed(), q.embed());
  Json results;
  results["p"] = delta_point_json(p);
  results["q"] = delta_point_json(q);
  put(results, "distance", d);
  results["dense_agrees"] = d == dense;
  return {results, {}};
}

Outcome delta_retract_op(const Json& cfg) {
  if (cfg["x"].is_null()) throw ConfigError("delta retract needs 'x'");
  const SparseVector x = vector_arg(cfg["x"], "x");
  RetractionResult r;
  try {
    r = nearest_point_retraction(x);
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
  Json results;
  results["x"] = vector_to_json(x);
  results["point"] = delta_point_json(r.point);
  put(results, "distance", r.distance);
  results["candidates_examined"] = r.candidates_examined;
  return {results, {}};
}

Outcome delta_certify_op(const Json& cfg) {
  const DeltaRegion region = DeltaRegion::parse(str(cfg, "region"));
  const std::uint64_t seed = u64(cfg, "seed");
  const std::string& name = str(cfg, "map");
  Estimate lip, eta;
  Json results;
  results["map"] = name;
  if (name == "baker") {
    const std::function<SparseVector(const SparseVector&)> f = baker_affine;
    const Sampler<SparseVector> sample = [region](Rng& rng) {
      return sample_positive_ball(rng, region.max_index, region.resolution);
    };
    const Metric<SparseVector> dist = l1_distance;
    lip = estimate_lipschitz(f, sample, dist, count(cfg, "pairs"), seed);
    eta = estimate_min_displacement(f, sample, dist, count(cfg, "samples"), seed);
    results["domain"] = "positive unit ball, support in 1.." +
                        std::to_string(region.max_index) + ", grid 1/" +
                        std::to_string(region.resolution);
  } else {
    const DeltaMap g = resolve_delta_map(name);
    const std::function<DeltaPoint(const DeltaPoint&)> f = g.apply;
    const Sampler<DeltaPoint> sample = [region](Rng& rng) { return region.sample(rng); };
    const Metric<DeltaPoint> dist = delta_distance;
    lip = estimate_lipschitz(f, sample, dist, count(cfg, "pairs"), seed);
    eta = estimate_min_displacement(f, sample, dist, count(cfg, "samples"), seed);
    results["domain"] = region.to_string();
  }
  const Rational epsilon = eta.value / (lip.value + 2);
  results["lipschitz_hat"] = estimate_json(lip);
  results["eta_hat"] = estimate_json(eta);
  put(results, "epsilon", epsilon);
  results["certified"] = eta.value > 0;
  results["seed"] = seed;
  if (name == "baker") {
    const BakerCertificate c =
        baker_no_fixed_point_certificate(u64(cfg, "support_bound"));
    Json cert;
    cert["schema"] = "afp.certificate/1";
    cert["support_bound"] = c.support_bound;
    Json steps = Json::array();
    for (const auto& s : c.steps) {
      steps.push_back({{"variable", s.variable},
                       {"equation", s.equation},
                       {"value", to_string(s.value)}});
    }
    cert["steps"] = steps;
    cert["infeasible"] = c.infeasible;
    cert["contradiction"] = c.contradiction;
    results["certificate"] = cert;
  }
  return {results, {}};
}

Outcome delta_e1_op(const Json& cfg) {
  const Rational delta = rat(cfg, "delta");
  const Rational M = rat(cfg, "M");
  if (!(delta > 0 && delta <= M)) throw ConfigError("e1 needs 0 < delta <= M");
  const std::size_t n = count(cfg, "points");
  const std::uint64_t seed = u64(cfg, "seed");
  const std::string& family = str(cfg, "family");
  const PolyhedralSeminorm l1 = PolyhedralSeminorm::l1();

  std::vector<SparseVector> points;
  if (family == "basis") {
    for (std::size_t i = 1; i <= n; ++i) points.push_back(SparseVector::unit(Index(i)));
  } else if (family.rfind("random:", 0) == 0) {
    const auto d = parse_unsigned(family.substr(7), "family");
    if (d == 0) throw ConfigError("family random:<d> needs d >= 1");
    Rng rng(seed);
    std::vector<SparseVector> raw;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Rational> c;
      for (std::uint64_t j = 0; j < d; ++j) {
        c.push_back(rng.rational_in(Rational(-1), Rational(1), 4));
      }
      raw.push_back(SparseVector::from_dense(c));
    }
    points = span_separated_sequence(stream_of(raw), l1, delta, raw.size());
  } else {
    throw ConfigError("family must be basis or random:<d>");
  }
  if (points.size() < 4) {
    throw ConfigError("e1 needs at least four separated points, found " +
                      std::to_string(points.size()));
  }
  const std::string& lower = str(cfg, "lower_bound");
  if (lower != "stated" && lower != "chain") {
    throw ConfigError("lower_bound must be stated or chain");
  }
  const E1Constants k = E1Constants::make(delta, M);
  const E1Report rep =
      e1_bounds_check(points, l1, l1, k, count(cfg, "trials"), seed, lower == "chain");

  Json constants;
  put(constants, "delta", k.delta);
  put(constants, "M", k.M);
  Json cs = Json::array();
  for (const auto& c : k.c) cs.push_back(to_string(c));
  constants["c"] = cs;
  put(constants, "c_sum", k.c_sum());
  put(constants, "m", k.m);
  put(constants, "chain_bound", k.chain_bound);

  Json results;
  results["family"] = family;
  results["points"] = points.size();
  results["constants"] = constants;
  results["lower_bound"] = lower;
  put(results, "lower_constant", rep.lower_constant);
  results["trials"] = rep.trials;
  results["lower_violations"] = rep.lower_violations;
  results["upper_violations"] = rep.upper_violations;
  put(results, "min_lower_slack", rep.min_lower_slack);
  put(results, "min_upper_slack", rep.min_upper_slack);
  return {results, {}};
}

Outcome delta_pipeline_op(const Json& cfg) {
  const DeltaRegion region = DeltaRegion::parse(str(cfg, "region"));
  DeltaRegion whole = region;
  whole.min_mass = 0;
  whole.max_mass = 1;
  const DeltaMap g = resolve_delta_map(str(cfg, "map"));
  const Sampler<SparseVector> c = [region](Rng& rng) { return region.sample(rng).embed(); };
  const Sampler<DeltaPoint> d = [whole](Rng& rng) { return whole.sample(rng); };
  PipelineOptions options;
  options.samples = count(cfg, "samples");
  options.pairs = count(cfg, "pairs");
  options.seed = u64(cfg, "seed");
  const PipelineReport rep =
      compose_pipeline(g, nearest_point_retraction, c, d, options).report;

  Json results;
  results["map"] = g.name;
  results["retraction"] = "nearest_point";
  results["region"] = region.to_string();
  put(results, "eta_hat", rep.eta_hat);
  put(results, "lipschitz_hat", rep.lipschitz_hat);
  put(results, "epsilon", rep.epsilon);
  results["certified"] = rep.certified;
  results["samples"] = rep.samples;
  results["pairs_used"] = rep.pairs_used;
  results["seed"] = rep.seed;
  results["retraction_checks"] = rep.retraction_checks;
  results["chain_checks"] = rep.chain_checks;
  results["chain_violations"] = rep.chain_violations;
  put(results, "min_chain_slack", rep.min_chain_slack);
  return {results, {}};
}

Outcome run_delta(const Json& cfg) {
  const std::string& op = required(cfg, "op");
  Outcome out;
  if (op == "distance") {
    out = delta_distance_op(cfg);
  } else if (op == "retract") {
    out = delta_retract_op(cfg);
  } else if (op == "certify") {
    out = delta_certify_op(cfg);
  } else if (op == "e1") {
    out = delta_e1_op(cfg);
  } else if (op == "pipeline") {
    out = delta_pipeline_op(cfg);
  } else {
    throw ConfigError("unknown delta op '" + op +
                      "' (distance, retract, certify, e1 or pipeline)");
  }
  Json results;
  results["op"] = op;
  for (auto& [key, value] : out.results.items()) results[key] = value;
  return {results, out.csv};
}

// ---------------------------------------------------------------- separate

Outcome run_separate(const Json& cfg) {
  const PolyhedralSeminorm rho0 = seminorm_of(cfg["rho0"]);
  const Rational delta = rat(cfg, "delta");
  if (delta < 0) throw ConfigError("delta must be non-negative");
  const std::size_t limit = count(cfg, "limit");
  const std::string& stream_name = str(cfg, "stream");

  PointStream stream;
  if (stream_name == "basis") {
    stream = basis_stream();
  } else if (stream_name == "random") {
    const std::uint64_t d = u64(cfg, "dimension");
    if (d == 0) throw ConfigError("dimension must be positive");
    auto rng = std::make_shared<Rng>(u64(cfg, "seed"));
    stream = [rng, d]() -> std::optional<SparseVector> {
      std::vector<Rational> c;
      for (std::uint64_t j = 0; j < d; ++j) {
        c.push_back(rng->rational_in(Rational(-1), Rational(1), 4));
      }
      return SparseVector::from_dense(c);
    };
  } else {
    const Json file = read_json_file(stream_name);
    reject_unknown_keys(file, {"schema", "points"}, "points file");
    if (file.value("schema", "") != "afp.points/1" || !file.contains("points") ||
        !file["points"].is_array()) {
      throw ConfigError("points file needs schema afp.points/1 and a points list");
    }
    std::vector<SparseVector> points;
    for (const auto& p : file["points"]) points.push_back(vector_from_json(p, "point"));
    stream = stream_of(std::move(points));
  }

  const std::string& mode = str(cfg, "mode");
  std::vector<SparseVector> kept;
  bool verified = true;
  if (mode == "span") {
    kept = span_separated_sequence(stream, rho0, delta, limit);
    verified = is_span_separated(kept, rho0, delta);
  } else if (mode == "greedy") {
    kept = greedy_separated_sequence(stream, rho0, delta, limit);
    for (std::size_t i = 0; i < kept.size() && verified; ++i) {
      for (std::size_t j = i + 1; j < kept.size() && verified; ++j) {
        verified = rho0.distance(kept[i], kept[j]) > delta;
      }
    }
  } else {
    throw ConfigError("mode must be span or greedy");
  }

  Json results;
  results["stream"] = stream_name;
  results["mode"] = mode;
  results["rho0"] = seminorm_to_json(rho0);
  put(results, "delta", delta);
  results["limit"] = limit;
  results["count"] = kept.size();
  Json points = Json::array();
  for (const auto& p : kept) points.push_back(vector_to_json(p));
  results["points"] = points;
  results["verified"] = verified;
  return {results, {}};
}

}  // namespace

Json normalize_config(const Json& config, std::optional<std::uint64_t> seed_override) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (config.contains("schema") && config["schema"] != kConfigSchema) {
    throw ConfigError(std::string("config schema must be ") + kConfigSchema);
  }
  if (!config.contains("subcommand") || !config["subcommand"].is_string()) {
    throw ConfigError("config needs a 'subcommand'");
  }
  const std::string sub = config["subcommand"].get<std::string>();
  const auto& keys = subcommand_keys(sub);

  for (const auto& [name, value] : config.items()) {
    if (name == "schema" || name == "subcommand") continue;
    bool known = false;
    for (const auto* list : {&common_keys(), &keys}) {
      for (const auto& k : *list) known = known || name == k.name;
    }
    if (!known) throw ConfigError(sub + ": unknown config key '" + name + "'");
  }

  Json out;
  out["schema"] = kConfigSchema;
  out["subcommand"] = sub;
  for (const auto* list : {&common_keys(), &keys}) {
    for (const auto& k : *list) {
      const Json& value = config.contains(k.name) ? config[k.name] : k.fallback;
      out[k.name] = value.is_null() ? Json(nullptr) : coerce(k, value);
    }
  }
  if (seed_override) out["seed"] = *seed_override;
  return out;
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("AFP_SEED");
  if (raw == nullptr) return std::nullopt;
  return parse_unsigned(raw, "AFP_SEED");
}

RunOutput run(const Json& config, std::optional<std::uint64_t> seed_override) {
  const Json cfg = normalize_config(config, seed_override);
  const auto started = std::chrono::steady_clock::now();
  const std::string& sub = str(cfg, "subcommand");
  Outcome outcome;
  if (sub == "kkm") {
    outcome = run_kkm(cfg);
  } else if (sub == "cesaro") {
    outcome = run_cesaro(cfg);
  } else if (sub == "ex2") {
    outcome = run_ex2(cfg);
  } else if (sub == "delta") {
    outcome = run_delta(cfg);
  } else {
    outcome = run_separate(cfg);
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - started;

  RunOutput out;
  out.report["schema"] = kReportSchema;
  out.report["version"] = kVersion;
  out.report["config"] = cfg;
  out.report["results"] = std::move(outcome.results);
  out.report["timing"] = {{"wall_seconds", elapsed.count()}};
  out.csv = std::move(outcome.csv);
  return out;
}

void write_outputs(const RunOutput& output) {
  const Json& cfg = output.report.at("config");
  auto wants_csv = [](const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  };
  auto write_csv = [&](const std::string& path) {
    if (output.csv.empty()) {
      throw ConfigError(str(cfg, "subcommand") + " produces no CSV series");
    }
    write_text_file(path, output.csv);
  };
  if (!cfg["report"].is_null()) {
    const std::string& path = str(cfg, "report");
    if (wants_csv(path)) {
      write_csv(path);
    } else {
      write_text_file(path, output.report.dump(2) + "\n");
    }
  }
  if (!cfg["csv"].is_null()) write_csv(str(cfg, "csv"));
}

std::string result_payload(const Json& report) {
  Json copy = report;
  copy.erase("timing");
  return copy.dump();
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return kExitConfig;
  if (dynamic_cast<const DomainEscape*>(&error)) return kExitDomainEscape;
  if (dynamic_cast<const DepthExhausted*>(&error)) return kExitDepthExhausted;
  if (dynamic_cast<const Error*>(&error)) return kExitHypothesis;
  if (dynamic_cast<const std::invalid_argument*>(&error)) return kExitConfig;
  return kExitFailure;
}

}  // namespace afp
