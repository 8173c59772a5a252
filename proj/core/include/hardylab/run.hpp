#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardylab/config.hpp"
#include "hardylab/report.hpp"

namespace hardylab {

inline const std::vector<std::string> kCommands{
    "validate", "assemble", "solve", "sweep", "lambda-star", "diagnose",
    "criterion", "verify-expansion", "verify-barriers", "local-hardy", "report"};

/// Command-line overrides of the config file.
struct RunFlags {
  std::optional<std::string> out_dir;
  std::optional<std::string> cache_dir;
  std::optional<double> lambda;
  std::optional<double> tol;
  std::optional<std::vector<int>> levels;
  std::optional<double> lambda_from;
  std::optional<double> lambda_to;
  std::optional<int> steps;
  bool dump_vector = false;
  bool dump_grid = false;
};

struct RunResult {
  int exit_code = 0;
  std::string message;  // error text when exit_code != 0
  std::string config_hash;
  bool cache_hit = false;
  std::vector<OutputFile> outputs;  // manifest.json excluded
  std::string manifest_path;        // empty when the run failed
};

/// Pipeline for one command; never throws. Errors map to exit codes
/// 2 (validation), 3 (non-convergence), 4 (I/O) and leave no manifest.
RunResult run_config(const std::string& config_path, const std::string& command, const RunFlags& flags = {});
RunResult run_command(RunConfig cfg, const std::string& command, const RunFlags& flags = {});

/// sha256 of the resolved geometry and weights blocks.
std::string config_hash(const RunConfig& cfg);

}  // namespace hardylab
