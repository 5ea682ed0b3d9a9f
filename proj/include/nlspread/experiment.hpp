#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nlspread {

/// Environment variable that overrides the root against which relative output
/// directories are resolved.
inline constexpr const char* kOutputRootVariable = "NLSPREAD_OUTPUT_ROOT";

/// Validates a raw configuration and fills in every default, so that the result is
/// self-describing. Throws InvalidInput on schema violations.
nlohmann::json resolve_config(const nlohmann::json& raw);

/// Hash of the semantic part of a resolved configuration (output location and the
/// concurrency cap excluded).
std::string semantic_hash(const nlohmann::json& resolved);

struct ExperimentOutput {
  nlohmann::json report;
  std::vector<std::string> files;  ///< written artifacts, relative to the output directory
};

/// Runs a resolved configuration. With an empty out_dir nothing is written.
ExperimentOutput run_resolved(const nlohmann::json& resolved, const std::filesystem::path& out_dir);

/// Full CLI flow: read, resolve, run, write manifest. `command` ("run", "sweep" or
/// "audit") constrains or overrides the configured command. Returns the exit status:
/// 0 success, 2 schema violation, 3 numerical failure.
int run_experiment(const std::filesystem::path& config_path, const std::string& command, std::ostream& log);

}  // namespace nlspread
