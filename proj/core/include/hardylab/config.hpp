#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardylab/eigensolve.hpp"
#include "hardylab/geometry.hpp"
#include "hardylab/groundstate.hpp"
#include "hardylab/weights.hpp"

namespace hardylab {

struct SolverSection {
  SolverOptions eigen{};
  std::vector<int> levels{1024, 2048, 4096};
  std::vector<int> diagnostic_levels{256, 1024, 4096};
  double tol_lambda = 0.1;
  std::optional<double> gap_tolerance;
  double calibration_lambda = -100.0;
  double lambda = 0.0;
  double lambda_from = -5.0;
  double lambda_to = 5.0;
  int steps = 11;
  std::vector<double> epsilons{0.0, 0.1, 0.5};
  std::vector<double> log_powers{0.0, -1.0, 0.5};
  LogReading log_reading = LogReading::Folded;
};

struct OutputSection {
  std::string dir = "out";
  std::string cache_dir;  // empty: HARDYLAB_CACHE, else no cache
  bool dump_vector = false;
  bool dump_grid = false;
};

struct RunConfig {
  GeometryConfig geometry{};
  WeightSpec weights{};  // raw, not normalized
  SolverSection solver{};
  OutputSection output{};
};

/// INI-like text: [section] headers, key = value, '#' or ';' comments.
/// Unknown sections or keys, duplicates and malformed values are InvalidConfig.
RunConfig parse_config(const std::string& text);
/// IOError when unreadable.
RunConfig load_config(const std::string& path);

/// Every key, fixed order, floats at 17 significant digits. parse_config(to_ini(c)) == c.
std::string to_ini(const RunConfig& c);
/// Geometry and weights blocks only; input to the config hash.
std::string model_blocks(const RunConfig& c);

std::string format_double(double v);
std::vector<int> parse_int_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

}  // namespace hardylab
