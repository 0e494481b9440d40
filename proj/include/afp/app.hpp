#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>

#include "afp/json_io.hpp"

namespace afp {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kConfigSchema = "afp.config/1";
inline constexpr const char* kReportSchema = "afp.report/1";

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitDomainEscape = 3,
  kExitDepthExhausted = 4,
  kExitHypothesis = 5,
};

/// Checks keys and types, fills defaults and applies the seed override.
/// The result has a fixed key order, so equal experiments serialize to
/// equal bytes. Throws ConfigError.
Json normalize_config(const Json& config,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

/// Parses AFP_SEED when it is set. Throws ConfigError on a malformed value.
std::optional<std::uint64_t> seed_from_environment();

struct RunOutput {
  /// {"schema", "version", "config", "results", "timing"}.
  Json report;
  /// CSV series for cesaro and ex2; empty otherwise.
  std::string csv;
};

/// Runs one experiment. The embedded config is the normalized one, so
/// feeding report["config"] back reproduces report["results"].
RunOutput run(const Json& config,
              std::optional<std::uint64_t> seed_override = std::nullopt);

/// Writes the report and the CSV series to the paths named in the config.
/// A "report" path ending in ".csv" receives the series instead.
void write_outputs(const RunOutput& output);

/// Serialized report without the timing block.
std::string result_payload(const Json& report);

int exit_code_for(const std::exception& error);

}  // namespace afp
