// hardylab: command line front end for the weighted Hardy quotient lab.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hardylab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted Hardy quotient lab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config;
  hardylab::RunFlags flags;
  std::string out_dir, cache_dir, levels;
  double lambda = 0, tol = 0, from = 0, to = 0;
  int steps = 0;

  // no ExistingFile check: an unreadable config is an I/O failure (exit 4), not a usage error
  app.add_option("--config", config, "Config file")->required();
  auto* o_out = app.add_option("--out-dir", out_dir, "Output directory");
  auto* o_cache = app.add_option("--cache-dir", cache_dir, "Matrix cache directory (default $HARDYLAB_CACHE)");
  auto* o_lambda = app.add_option("--lambda", lambda, "Coupling lambda");
  auto* o_tol = app.add_option("--tol", tol, "Eigen solver tolerance");
  auto* o_levels = app.add_option("--levels", levels, "Radial refinement levels, comma separated");
  auto* o_from = app.add_option("--lambda-from", from, "Sweep start");
  auto* o_to = app.add_option("--lambda-to", to, "Sweep end");
  auto* o_steps = app.add_option("--steps", steps, "Sweep points");
  app.add_flag("--dump-vector", flags.dump_vector, "Write the eigenvector as CSV");
  app.add_flag("--dump-grid", flags.dump_grid, "Write grid nodes and measure weights as CSV");

  const std::vector<std::pair<std::string, std::string>> about{
      {"validate", "Check and normalize the weights, report maximizers"},
      {"assemble", "Build the quadratic forms (cached by config hash)"},
      {"solve", "Smallest eigenvalue mu at --lambda"},
      {"sweep", "mu over --lambda-from..--lambda-to in --steps points"},
      {"lambda-star", "Bracket the threshold lambda with extrapolated mu"},
      {"diagnose", "Bounded minimizer vs concentrating sequence at --lambda"},
      {"criterion", "Integrability test of the weight deficit near its maxima"},
      {"verify-expansion", "Residual of the ground-state expansion near the submanifold"},
      {"verify-barriers", "Sub- and supersolution checks, valid radius per case"},
      {"local-hardy", "Log-Hardy remainder constant on the tube"},
      {"report", "Summary over sweep, criterion and threshold"}};
  for (const auto& [name, text] : about) app.add_subcommand(name, text);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*o_out) flags.out_dir = out_dir;
  if (*o_cache) flags.cache_dir = cache_dir;
  if (*o_lambda) flags.lambda = lambda;
  if (*o_tol) flags.tol = tol;
  if (*o_from) flags.lambda_from = from;
  if (*o_to) flags.lambda_to = to;
  if (*o_steps) flags.steps = steps;
  if (*o_levels) {
    try {
      flags.levels = hardylab::parse_int_list(levels);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "hardylab: %s\n", e.what());
      return 2;
    }
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const hardylab::RunResult r = hardylab::run_config(config, command, flags);
  if (r.exit_code != 0) {
    std::fprintf(stderr, "hardylab %s: %s\n", command.c_str(), r.message.c_str());
    return r.exit_code;
  }
  std::printf("%s: %zu file(s), manifest %s%s\n", command.c_str(), r.outputs.size(), r.manifest_path.c_str(),
              r.cache_hit ? " (cache hit)" : "");
  return 0;
}
