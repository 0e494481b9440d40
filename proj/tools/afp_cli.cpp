#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "afp/app.hpp"
#include "afp/errors.hpp"

namespace {

struct Flag {
  const char* flag;
  const char* key;
  const char* help;
};

struct Subcommand {
  const char* name;
  const char* help;
  std::vector<Flag> flags;
};

const std::vector<Subcommand>& subcommands() {
  static const std::vector<Subcommand> table = {
      {"kkm",
       "search for an epsilon-fixed point by KKM labelling",
       {{"--map", "map", "built-in map name or plugin:<path>"},
        {"--epsilon", "epsilon", "target residual, p/q"},
        {"--max-order", "max_order", "largest subdivision order"},
        {"--resolution", "resolution", "sampling grid resolution over C"},
        {"--domain", "domain", "domain JSON file (defaults to the map's box)"},
        {"--seminorm", "seminorm", "l1, linf or a seminorm JSON file"},
        {"--anchor", "anchor", "interior anchor as i:v,i:v"},
        {"--allow-zero-shrink", "allow_zero_shrink", "true or false"}}},
      {"cesaro",
       "Cesaro averages along an orbit",
       {{"--map", "map", "built-in map, plugin:<path>, ex2 or baker"},
        {"--start", "start", "coordinates a,b,..; diffuse|atom:n|file for ex2; i:v,.. for baker"},
        {"--steps", "steps", "number of averages"},
        {"--mode", "mode", "direct or telescoping"},
        {"--seminorm", "seminorm", "l1, linf or a seminorm JSON file"},
        {"--partition", "partition", "dyadic or p-adic:<prime> (ex2 only)"}}},
      {"ex2",
       "orbit residuals and the no-fixed-point certificate of the measure map",
       {{"--start", "start", "diffuse, atom:n or a measure JSON file"},
        {"--steps", "steps", "orbit length"},
        {"--support-bound", "support_bound", "atoms allowed in 1..N"},
        {"--partition", "partition", "dyadic or p-adic:<prime>"}}},
      {"delta",
       "geometry, bounds and certification on the fan of triangles",
       {{"--op", "op", "distance, retract, certify, e1 or pipeline"},
        {"--map", "map", "shift, baker or plugin:<path>"},
        {"--samples", "samples", "displacement samples"},
        {"--pairs", "pairs", "Lipschitz sample pairs"},
        {"--region", "region", "all, or mass>=q,mass<=q,n<=k,resolution=k"},
        {"--p", "p", "first point n:a:b (distance)"},
        {"--q", "q", "second point n:a:b (distance)"},
        {"--x", "x", "point i:v,i:v (retract)"},
        {"--delta", "delta", "separation constant (e1)"},
        {"--M", "M", "upper seminorm bound (e1)"},
        {"--trials", "trials", "random combinations (e1)"},
        {"--points", "points", "family size (e1)"},
        {"--family", "family", "basis or random:<d> (e1)"},
        {"--lower-bound", "lower_bound", "stated or chain (e1)"},
        {"--support-bound", "support_bound", "certificate support bound (baker)"}}},
      {"separate",
       "greedy or span-separated subsequence of a point stream",
       {{"--stream", "stream", "basis, random or a points JSON file"},
        {"--mode", "mode", "span or greedy"},
        {"--rho0", "rho0", "l1, linf or a seminorm JSON file"},
        {"--delta", "delta", "separation threshold"},
        {"--limit", "limit", "stream items to consume"},
        {"--dimension", "dimension", "ambient dimension of the random stream"}}},
  };
  return table;
}

afp::Json load_config(const std::string& path) {
  afp::Json doc = afp::read_json_file(path);
  if (doc.is_object() && doc.value("schema", "") == afp::kReportSchema) {
    if (!doc.contains("config")) throw afp::ConfigError("report has no config");
    return doc["config"];
  }
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact approximate-fixed-point experiments"};
  app.name("afp");
  app.set_version_flag("--version", afp::kVersion);
  app.require_subcommand(1);

  struct Bound {
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<Bound> bound(subcommands().size() + 1);
  const std::vector<Flag> common = {
      {"--config", "", "config JSON file, or a report whose config is replayed"},
      {"--seed", "seed", "random seed (AFP_SEED overrides)"},
      {"--report", "report", "write the JSON report here (.csv: write the series)"},
      {"--csv", "csv", "write the CSV series here"},
  };
  auto attach = [](Bound& b, const Flag& f) {
    const std::string key = *f.key ? f.key : "config";
    b.options[key] = b.app->add_option(f.flag, b.values[key], f.help);
  };
  for (std::size_t i = 0; i < subcommands().size(); ++i) {
    const auto& s = subcommands()[i];
    bound[i].app = app.add_subcommand(s.name, s.help);
    for (const auto& f : common) attach(bound[i], f);
    for (const auto& f : s.flags) attach(bound[i], f);
  }
  Bound& replay = bound.back();
  replay.app = app.add_subcommand("run", "run a config file or replay a report");
  for (const auto& f : common) {
    if (std::string(f.key) != "seed") attach(replay, f);
  }
  replay.options["config"]->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? afp::kExitOk : afp::kExitConfig;
  }

  try {
    for (std::size_t i = 0; i < bound.size(); ++i) {
      Bound& b = bound[i];
      if (!b.app->parsed()) continue;
      afp::Json config = afp::Json::object();
      if (b.options["config"]->count() > 0) config = load_config(b.values["config"]);
      if (!config.is_object()) throw afp::ConfigError("config must be a JSON object");
      if (&b != &replay) {
        const std::string name = subcommands()[i].name;
        if (config.contains("subcommand") && config["subcommand"] != name) {
          throw afp::ConfigError("config is for '" +
                                 config["subcommand"].get<std::string>() +
                                 "', not '" + name + "'");
        }
        config["subcommand"] = name;
      }
      for (const auto& [key, option] : b.options) {
        if (key != "config" && option->count() > 0) config[key] = b.values[key];
      }
      const afp::RunOutput out = afp::run(config, afp::seed_from_environment());
      afp::write_outputs(out);
      if (out.report["config"]["report"].is_null()) {
        std::cout << out.report.dump(2) << '\n';
      }
      return afp::kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "afp: " << e.what() << '\n';
    return afp::exit_code_for(e);
  }
  return afp::kExitFailure;
}
