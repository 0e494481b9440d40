#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "afp/app.hpp"
#include "afp/errors.hpp"
#include "afp/measure.hpp"

namespace {

using afp::Json;
using afp::ratio;
using afp::Rational;
using afp::SparseVector;

Json config(const std::string& sub, Json extra = Json::object()) {
  Json c;
  c["subcommand"] = sub;
  for (auto& [k, v] : extra.items()) c[k] = v;
  return c;
}

Json results(const Json& c) { return afp::run(c).report["results"]; }

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("afp_app_test_" + std::to_string(::getpid()) + "_" + name);
}

TEST(JsonIo, ValuesRoundTrip) {
  const Rational r = ratio(-7, 24);
  EXPECT_EQ(afp::rational_to_json(r), "-7/24");
  EXPECT_EQ(afp::rational_from_json(afp::rational_to_json(r), "r"), r);
  EXPECT_EQ(afp::rational_from_json(Json(3), "r"), 3);
  EXPECT_EQ(afp::rational_from_json(Json("0.25"), "r"), ratio(1, 4));
  EXPECT_THROW(afp::rational_from_json(Json(0.5), "r"), afp::ConfigError);
  EXPECT_THROW(afp::rational_from_json(Json("1/0"), "r"), afp::ConfigError);

  const SparseVector v{{afp::Index(2), ratio(1, 2)}, {afp::Index(10), ratio(-3, 1)}};
  const Json jv = afp::vector_to_json(v);
  EXPECT_EQ(jv.dump(), R"({"2":"1/2","10":"-3/1"})");
  EXPECT_EQ(afp::vector_from_json(jv, "v"), v);
  EXPECT_THROW(afp::vector_from_json(Json::parse(R"({"0":"1"})"), "v"), afp::ConfigError);
  EXPECT_THROW(afp::vector_from_json(Json::parse(R"({"x":"1"})"), "v"), afp::ConfigError);

  const auto rho = afp::PolyhedralSeminorm::max_of({v, SparseVector::unit(afp::Index(1))});
  EXPECT_EQ(afp::seminorm_from_json(afp::seminorm_to_json(rho)), rho);
  EXPECT_EQ(afp::seminorm_from_json(Json("linf")), afp::PolyhedralSeminorm::linf());
  EXPECT_THROW(afp::seminorm_from_json(Json::parse(
                   R"({"schema":"afp.seminorm/1","kind":"l1","extra":1})")),
               afp::ConfigError);

  const auto C = afp::ConvexDomain::polytope({SparseVector::from_dense(
                                                 std::vector<Rational>{1, 1})},
                                             {Rational(1)}, {0, 0}, {1, 1});
  const auto C2 = afp::domain_from_json(afp::domain_to_json(C));
  EXPECT_EQ(afp::domain_to_json(C2), afp::domain_to_json(C));
  EXPECT_TRUE(C2.contains(SparseVector::from_dense(std::vector<Rational>{ratio(1, 2), ratio(1, 2)})));
  EXPECT_FALSE(C2.contains(SparseVector::from_dense(std::vector<Rational>{1, ratio(1, 2)})));

  const afp::FiniteMeasureModel mu(SparseVector{{afp::Index(3), ratio(1, 3)}}, ratio(2, 3));
  EXPECT_EQ(afp::measure_from_json(afp::measure_to_json(mu)), mu);
}

TEST(Config, DefaultsAreFilledInAFixedOrder) {
  const Json n = afp::normalize_config(config("kkm", {{"map", "square"}}));
  EXPECT_EQ(n["schema"], afp::kConfigSchema);
  EXPECT_EQ(n["epsilon"], "1/10");
  EXPECT_EQ(n["max_order"], 64u);
  EXPECT_EQ(n["seed"], 1u);
  EXPECT_TRUE(n["report"].is_null());
  std::vector<std::string> keys;
  for (const auto& [k, v] : n.items()) keys.push_back(k);
  EXPECT_EQ(keys.front(), "schema");
  EXPECT_EQ(keys[1], "subcommand");
  EXPECT_EQ(afp::normalize_config(n), n);
  EXPECT_EQ(afp::normalize_config(Json::parse(n.dump())), n);
}

TEST(Config, StringsAreCoercedAndCanonicalized) {
  const Json n = afp::normalize_config(
      config("kkm", {{"map", "square"}, {"epsilon", "2/20"}, {"max_order", "8"},
                     {"allow_zero_shrink", "false"}}));
  EXPECT_EQ(n["epsilon"], "1/10");
  EXPECT_EQ(n["max_order"], 8u);
  EXPECT_EQ(n["allow_zero_shrink"], false);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(afp::normalize_config(Json::array()), afp::ConfigError);
  EXPECT_THROW(afp::normalize_config(Json::object()), afp::ConfigError);
  EXPECT_THROW(afp::normalize_config(config("plot")), afp::ConfigError);
  EXPECT_THROW(afp::normalize_config(config("kkm", {{"colour", "red"}})), afp::ConfigError);
  // A key valid for another subcommand is still unknown here.
  EXPECT_THROW(afp::normalize_config(config("ex2", {{"epsilon", "1/2"}})), afp::ConfigError);
  EXPECT_THROW(afp::normalize_config(config("kkm", {{"max_order", -1}})), afp::ConfigError);
  EXPECT_THROW(afp::normalize_config(config("kkm", {{"max_order", "4x"}})), afp::ConfigError);
  EXPECT_THROW(afp::normalize_config(config("kkm", {{"epsilon", "one"}})), afp::ConfigError);
  Json wrong = config("kkm");
  wrong["schema"] = "afp.config/9";
  EXPECT_THROW(afp::normalize_config(wrong), afp::ConfigError);
  EXPECT_THROW(afp::run(config("kkm")), afp::ConfigError);
  EXPECT_THROW(afp::run(config("delta")), afp::ConfigError);
  EXPECT_THROW(afp::run(config("delta", {{"op", "nope"}})), afp::ConfigError);
}

TEST(Config, SeedOverrideWins) {
  const Json n = afp::normalize_config(config("separate", {{"seed", 4}}), 11);
  EXPECT_EQ(n["seed"], 11u);
}

TEST(Report, CarriesSchemaVersionConfigAndTiming) {
  const Json r = afp::run(config("delta", {{"op", "distance"}, {"p", "1:1/2:1/4"},
                                           {"q", "1:1/4:1/2"}}))
                     .report;
  EXPECT_EQ(r["schema"], afp::kReportSchema);
  EXPECT_EQ(r["version"], afp::kVersion);
  EXPECT_EQ(r["config"]["op"], "distance");
  EXPECT_TRUE(r["timing"]["wall_seconds"].is_number());
  EXPECT_EQ(r["results"]["distance"], "1/2");
  EXPECT_EQ(r["results"]["distance_float"], 0.5);
  EXPECT_TRUE(r["results"]["dense_agrees"].get<bool>());
  EXPECT_EQ(afp::result_payload(r).find("timing"), std::string::npos);
}

TEST(Cesaro, HalfStepFromZero) {
  const auto out = afp::run(config("cesaro", {{"map", "half-step"}, {"start", "0"},
                                              {"steps", 100}}));
  const Json& s = out.report["results"]["series"];
  ASSERT_EQ(s.size(), 100u);
  // The orbit is y_{k+1} = 1 − 2^−k, so x_k − f(x_k) = (y_1 − y_{k+1})/k.
  for (std::size_t k = 1; k <= 100; ++k) {
    const Rational expected = (1 - afp::power_of_two(-static_cast<long>(k))) /
                              Rational(static_cast<std::int64_t>(k));
    EXPECT_EQ(s[k - 1]["residual"], afp::to_string(expected)) << k;
  }
  EXPECT_EQ(s[2]["residual"], "7/24");
  std::istringstream csv(out.csv);
  std::string header, one, two, three;
  std::getline(csv, header);
  std::getline(csv, one);
  std::getline(csv, two);
  std::getline(csv, three);
  EXPECT_EQ(header, "k,residual,residual_float");
  EXPECT_EQ(three, "3,7/24,0.2916666666666667");
  EXPECT_TRUE(out.report["results"]["identity_holds"].get<bool>());
  EXPECT_EQ(out.report["results"]["identity_checked"], 100u);
}

TEST(Cesaro, MeasureAndBallMaps) {
  const Json ex2 = results(config("cesaro", {{"map", "ex2"}, {"steps", 30}}));
  for (const auto& row : ex2["series"]) {
    EXPECT_EQ(row["residual"],
              afp::to_string(Rational(2) / Rational(row["k"].get<std::int64_t>())));
  }
  const Json baker = results(config("cesaro", {{"map", "baker"}, {"steps", 20},
                                               {"mode", "telescoping"}}));
  EXPECT_EQ(baker["series"].size(), 20u);
  EXPECT_EQ(baker["start"], Json::object());
  EXPECT_THROW(results(config("cesaro", {{"map", "square"}, {"mode", "telescoping"}})),
               afp::ConfigError);
  EXPECT_THROW(results(config("cesaro", {{"map", "rotation90"}, {"start", "0"}})),
               afp::ConfigError);
}

TEST(Ex2, DiffuseStartAndCertificate) {
  const Json r = results(config("ex2", {{"start", "diffuse"}, {"steps", 10}}));
  ASSERT_EQ(r["orbit_residuals"].size(), 10u);
  for (const auto& row : r["orbit_residuals"]) EXPECT_EQ(row["residual"], "2/1");
  const Json& cert = r["certificate"];
  EXPECT_EQ(cert["schema"], "afp.certificate/1");
  EXPECT_TRUE(cert["infeasible"].get<bool>());
  EXPECT_TRUE(cert["complete"].get<bool>());
  EXPECT_EQ(cert["steps"].front()["phase"], "diffuse");
  EXPECT_EQ(cert["steps"][1]["phase"], "atom_one");
  EXPECT_EQ(cert["steps"].back()["phase"], "minimal_j");

  const Json atom = results(config("ex2", {{"start", "atom:3"}, {"steps", 3},
                                           {"partition", "p-adic:3"}}));
  EXPECT_EQ(atom["partition"], "3-adic");
  EXPECT_THROW(results(config("ex2", {{"partition", "p-adic:4"}})), afp::ConfigError);
  EXPECT_THROW(results(config("ex2", {{"start", "atom:0"}})), afp::ConfigError);
}

TEST(Ex2, MeasureFileStart) {
  const auto path = scratch("measure.json");
  std::ofstream(path) << R"({"schema":"afp.measure/1","atoms":{"1":"1/2"},"diffuse":"1/2"})";
  const Json r = results(config("ex2", {{"start", path.string()}, {"steps", 2}}));
  EXPECT_EQ(r["start"]["diffuse"], "1/2");
  std::ofstream(path) << R"({"schema":"afp.measure/1","atoms":{"1":"1/2"}})";
  EXPECT_THROW(results(config("ex2", {{"start", path.string()}})), afp::ConfigError);
  std::filesystem::remove(path);
}

TEST(Kkm, SquareWitnessBelowEpsilon) {
  const Json r = results(config("kkm", {{"map", "square"}, {"epsilon", "1/10"}}));
  EXPECT_TRUE(r["verified"].get<bool>());
  const Rational residual = afp::parse_rational(r["residual"].get<std::string>());
  const Rational x =
      afp::vector_from_json(r["witness"]["point"], "point").get(afp::Index(1));
  EXPECT_EQ(residual, x - x * x);
  EXPECT_LT(residual, ratio(1, 10));
  EXPECT_GE(r["net_size"].get<std::size_t>(), 1u);
}

TEST(Kkm, DomainAndSeminormFiles) {
  const auto domain = scratch("domain.json");
  const auto norm = scratch("seminorm.json");
  std::ofstream(domain) << R"({"schema":"afp.domain/1","lower":["0","0"],"upper":["1","1"]})";
  std::ofstream(norm) << R"({"schema":"afp.seminorm/1","kind":"max","functionals":[{"1":"1"},{"2":"1"},{"1":"-1"},{"2":"-1"}]})";
  const Json r = results(config("kkm", {{"map", "rotation90"}, {"epsilon", "1/5"},
                                        {"domain", domain.string()},
                                        {"seminorm", norm.string()}}));
  EXPECT_TRUE(r["verified"].get<bool>());
  EXPECT_EQ(r["seminorm"]["kind"], "max");
  EXPECT_THROW(results(config("kkm", {{"map", "square"}, {"domain", domain.string()}})),
               afp::ConfigError);
  std::filesystem::remove(domain);
  std::filesystem::remove(norm);
}

TEST(Kkm, FailuresMapToTheirExitCodes) {
  try {
    results(config("kkm", {{"map", "reflect"}, {"resolution", 3}, {"max_order", 16}}));
    FAIL();
  } catch (const afp::DepthExhausted& e) {
    EXPECT_EQ(afp::exit_code_for(e), afp::kExitDepthExhausted);
  }
  EXPECT_EQ(afp::exit_code_for(afp::ConfigError("x")), afp::kExitConfig);
  EXPECT_EQ(afp::exit_code_for(afp::DomainEscape("x")), afp::kExitDomainEscape);
  EXPECT_EQ(afp::exit_code_for(afp::HypothesisViolation("x")), afp::kExitHypothesis);
  EXPECT_EQ(afp::exit_code_for(std::runtime_error("x")), afp::kExitFailure);
}

TEST(Delta, Operations) {
  const Json retract = results(config("delta", {{"op", "retract"}, {"x", "1:1,3:1"}}));
  EXPECT_EQ(retract["point"]["text"], "(1, 1/1, 0/1)");
  EXPECT_EQ(retract["distance"], "1/1");

  const Json e1 = results(config("delta", {{"op", "e1"}, {"trials", 500}, {"points", 16}}));
  EXPECT_EQ(e1["constants"]["m"], "6561/320000");
  EXPECT_EQ(e1["lower_violations"], 0u);
  EXPECT_EQ(e1["upper_violations"], 0u);

  const Json certify = results(config("delta", {{"op", "certify"}, {"samples", 300},
                                                {"pairs", 300}}));
  EXPECT_EQ(certify["lipschitz_hat"]["value"], "1/1");
  EXPECT_TRUE(certify["certified"].get<bool>());

  const Json baker = results(config("delta", {{"op", "certify"}, {"map", "baker"},
                                              {"samples", 100}, {"pairs", 100},
                                              {"support_bound", 5}}));
  EXPECT_TRUE(baker["certificate"]["infeasible"].get<bool>());
  EXPECT_EQ(baker["certificate"]["steps"].size(), 8u);

  const Json pipe = results(config("delta", {{"op", "pipeline"}, {"samples", 400},
                                             {"pairs", 400}}));
  EXPECT_GE(afp::parse_rational(pipe["epsilon"].get<std::string>()), ratio(1, 6));
  EXPECT_EQ(pipe["chain_violations"], 0u);
  EXPECT_THROW(results(config("delta", {{"op", "pipeline"}, {"map", "baker"}})),
               afp::ConfigError);
  EXPECT_THROW(results(config("delta", {{"op", "distance"}, {"p", "1:2"}, {"q", "1:0:0"}})),
               afp::ConfigError);
}

TEST(Separate, BasisAndRandomStreams) {
  const Json basis = results(config("separate", {{"limit", 6}}));
  EXPECT_EQ(basis["count"], 6u);
  EXPECT_TRUE(basis["verified"].get<bool>());
  const Json random = results(config("separate", {{"stream", "random"}, {"dimension", 3},
                                                  {"limit", 40}, {"delta", "1/4"}}));
  EXPECT_LE(random["count"].get<std::size_t>(), 3u);
  EXPECT_TRUE(random["verified"].get<bool>());
  const Json greedy = results(config("separate", {{"stream", "random"}, {"mode", "greedy"},
                                                  {"limit", 30}, {"delta", "1"}}));
  EXPECT_TRUE(greedy["verified"].get<bool>());
}

TEST(Determinism, SameConfigSamePayload) {
  const Json c = config("delta", {{"op", "pipeline"}, {"samples", 200}, {"pairs", 200},
                                  {"seed", 3}});
  const auto first = afp::run(c).report;
  const auto second = afp::run(c).report;
  EXPECT_EQ(afp::result_payload(first), afp::result_payload(second));
  // Replaying the embedded config reproduces the results.
  EXPECT_EQ(afp::result_payload(afp::run(first["config"]).report),
            afp::result_payload(first));
  const auto other = afp::run(c, 4).report;
  EXPECT_NE(other["results"].dump(), first["results"].dump());
}

TEST(Outputs, ReportAndCsvFiles) {
  const auto json_path = scratch("report.json");
  const auto csv_path = scratch("series.csv");
  const auto out = afp::run(config("cesaro", {{"map", "half-step"}, {"steps", 3},
                                              {"report", json_path.string()},
                                              {"csv", csv_path.string()}}));
  afp::write_outputs(out);
  EXPECT_EQ(afp::read_json_file(json_path.string())["results"], out.report["results"]);
  std::ifstream in(csv_path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), out.csv);
  const auto none = afp::run(config("separate", {{"csv", csv_path.string()}}));
  EXPECT_THROW(afp::write_outputs(none), afp::ConfigError);
  std::filesystem::remove(json_path);
  std::filesystem::remove(csv_path);
}

}  // namespace
