#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <tuple>

#include "afp/app.hpp"
#include "afp/delta.hpp"
#include "afp/errors.hpp"

namespace py = pybind11;

namespace {

using Triple = std::tuple<std::uint64_t, std::string, std::string>;
using Sparse = std::map<std::uint64_t, std::string>;

afp::Rational parse(const std::string& text) {
  try {
    return afp::parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw afp::ConfigError(e.what());
  }
}

afp::DeltaPoint point_of(const Triple& t) {
  try {
    return afp::DeltaPoint::make(std::get<0>(t), parse(std::get<1>(t)), parse(std::get<2>(t)));
  } catch (const std::invalid_argument& e) {
    throw afp::ConfigError(e.what());
  }
}

Triple triple_of(const afp::DeltaPoint& p) {
  return {p.n, afp::to_string(p.a), afp::to_string(p.b)};
}

afp::SparseVector vector_of(const Sparse& entries) {
  std::vector<afp::SparseVector::Entry> out;
  for (const auto& [index, value] : entries) {
    if (index == 0) throw afp::ConfigError("indices start at 1");
    out.push_back({afp::Index(index), parse(value)});
  }
  return afp::SparseVector::from_unsorted(std::move(out));
}

Sparse sparse_of(const afp::SparseVector& v) {
  Sparse out;
  for (const auto& e : v.entries()) {
    if (!e.index.is_small()) throw afp::ConfigError("index does not fit in 64 bits");
    out[e.index.small_value()] = afp::to_string(e.value);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact approximate-fixed-point experiments";
  m.attr("__version__") = afp::kVersion;

  static py::exception<afp::Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<afp::ConfigError> config(m, "ConfigError", error.ptr());
  static py::exception<afp::DomainEscape> escape(m, "DomainEscape", error.ptr());
  static py::exception<afp::DepthExhausted> depth(m, "DepthExhausted", error.ptr());
  static py::exception<afp::HypothesisViolation> hypothesis(m, "HypothesisViolation",
                                                            error.ptr());
  static py::exception<afp::NotARetraction> retraction(m, "NotARetraction", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const afp::ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const afp::DomainEscape& e) {
      py::set_error(escape, e.what());
    } catch (const afp::DepthExhausted& e) {
      py::set_error(depth, e.what());
    } catch (const afp::HypothesisViolation& e) {
      py::set_error(hypothesis, e.what());
    } catch (const afp::NotARetraction& e) {
      py::set_error(retraction, e.what());
    } catch (const afp::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def(
      "run",
      [](const std::string& config_json, std::optional<std::uint64_t> seed) {
        afp::Json config;
        try {
          config = afp::Json::parse(config_json);
        } catch (const afp::Json::parse_error& e) {
          throw afp::ConfigError(e.what());
        }
        py::gil_scoped_release release;
        const afp::RunOutput out = afp::run(config, seed);
        return std::make_tuple(out.report.dump(), out.csv);
      },
      py::arg("config_json"), py::arg("seed") = py::none(),
      "Runs one experiment from a JSON config; returns (report JSON, CSV series).");

  m.def("normalize_config",
        [](const std::string& config_json, std::optional<std::uint64_t> seed) {
          return afp::normalize_config(afp::Json::parse(config_json), seed).dump();
        },
        py::arg("config_json"), py::arg("seed") = py::none());

  m.def("result_payload",
        [](const std::string& report_json) {
          return afp::result_payload(afp::Json::parse(report_json));
        });

  m.def("canonical_rational", [](const std::string& text) {
    return afp::to_string(parse(text));
  });

  m.def("delta_canonical", [](const Triple& p) { return triple_of(point_of(p)); });

  m.def("delta_distance", [](const Triple& p, const Triple& q) {
    return afp::to_string(afp::delta_distance(point_of(p), point_of(q)));
  });

  m.def("shift_map", [](const Triple& p) { return triple_of(afp::shift_map(point_of(p))); });

  m.def("nearest_point_retraction", [](const Sparse& x) {
    afp::RetractionResult r;
    try {
      r = afp::nearest_point_retraction(vector_of(x));
    } catch (const std::out_of_range& e) {
      throw afp::ConfigError(e.what());
    }
    return std::make_tuple(triple_of(r.point), afp::to_string(r.distance),
                           r.candidates_examined);
  });

  m.def("baker_affine", [](const Sparse& x) { return sparse_of(afp::baker_affine(vector_of(x))); });

  m.def("e1_constants", [](const std::string& delta, const std::string& M) {
    const afp::Rational d = parse(delta), big_m = parse(M);
    if (!(d > 0 && d <= big_m)) throw afp::ConfigError("need 0 < delta <= M");
    const auto k = afp::E1Constants::make(d, big_m);
    std::map<std::string, py::object> out;
    py::list c;
    for (const auto& ci : k.c) c.append(afp::to_string(ci));
    out["c"] = c;
    out["m"] = py::str(afp::to_string(k.m));
    out["chain_bound"] = py::str(afp::to_string(k.chain_bound));
    out["c_sum"] = py::str(afp::to_string(k.c_sum()));
    return out;
  });
}
