#include "hardylab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hardylab/errors.hpp"

namespace hardylab {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidConfig, key + ": not a number: '" + v + "'");
  }
  if (used != v.size()) fail(ErrorCode::InvalidConfig, key + ": trailing characters in '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != static_cast<double>(static_cast<int>(x))) fail(ErrorCode::InvalidConfig, key + ": not an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::InvalidConfig, key + ": expected true/false");
}

using Section = std::map<std::string, std::string>;

// Pops a key from a section; whatever remains at the end is unknown.
struct Reader {
  std::string name;
  Section kv;

  std::optional<std::string> take(const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  }
  void done() const {
    if (!kv.empty()) fail(ErrorCode::InvalidConfig, "unknown key [" + name + "] " + kv.begin()->first);
  }
};

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& p : split(s, ',')) out.push_back(to_double("list", p));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  for (const auto& p : split(s, ',')) out.push_back(to_int("list", p));
  return out;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Reader> sections;
  for (const char* s : {"geometry", "weights", "solver", "output"}) sections[s].name = s;
  std::istringstream in(text);
  std::string line, current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::InvalidConfig, where + "bad section header");
      current = trim(line.substr(1, line.size() - 2));
      if (!sections.count(current)) fail(ErrorCode::InvalidConfig, where + "unknown section [" + current + "]");
      continue;
    }
    if (current.empty()) fail(ErrorCode::InvalidConfig, where + "key outside a section");
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::InvalidConfig, where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!sections[current].kv.emplace(key, value).second)
      fail(ErrorCode::InvalidConfig, where + "duplicate key " + key);
  }

  RunConfig c;
  auto& g = sections["geometry"];
  auto& gc = c.geometry;
  if (auto v = g.take("dimension")) gc.N = to_int("dimension", *v);
  if (auto v = g.take("submanifold_dimension")) gc.k = to_int("submanifold_dimension", *v);
  if (auto v = g.take("model")) {
    if (*v == "reduced") gc.model = Model::Reduced;
    else if (*v == "full_torus") gc.model = Model::FullTorus;
    else fail(ErrorCode::InvalidConfig, "model: expected reduced or full_torus");
  }
  if (auto v = g.take("tube_radius")) gc.R = to_double("tube_radius", *v);
  if (auto v = g.take("grading")) gc.grading_gamma = to_double("grading", *v);
  if (auto v = g.take("n_r")) gc.n_r = to_int("n_r", *v);
  if (auto v = g.take("n_z")) gc.n_z = to_int("n_z", *v);
  g.done();
  gc.validate();

  auto& w = sections["weights"];
  WeightSpec& ws = c.weights;
  ws.k = gc.k;
  ws.z0.assign(gc.k, 0.0);
  if (auto v = w.take("family")) {
    if (*v == "constant") ws.family = Family::Constant;
    else if (*v == "sin_power") ws.family = Family::SinPower;
    else if (*v == "custom") ws.family = Family::Custom;
    else fail(ErrorCode::InvalidConfig, "family: expected constant, sin_power or custom");
  }
  if (auto v = w.take("q0")) ws.q0 = to_double("q0", *v);
  if (auto v = w.take("A")) ws.A = to_double("A", *v);
  if (auto v = w.take("beta")) ws.beta = to_double("beta", *v);
  if (auto v = w.take("z0")) {
    ws.z0 = parse_double_list(*v);
    if (ws.z0.size() == 1 && gc.k > 1) ws.z0.assign(gc.k, ws.z0[0]);
    if (!ws.z0.empty() && static_cast<int>(ws.z0.size()) != gc.k) fail(ErrorCode::InvalidConfig, "z0: need k entries");
  }
  if (auto v = w.take("b_profile")) {
    ws.b_profile = parse_double_list(*v);
    if (ws.b_profile.empty()) fail(ErrorCode::InvalidConfig, "b_profile: empty");
  }
  if (auto v = w.take("eta_kind")) {
    if (*v == "rho") ws.eta_kind = EtaKind::Rho;
    else if (*v == "rho_squared") ws.eta_kind = EtaKind::RhoSquared;
    else if (*v == "rho_times_profile") ws.eta_kind = EtaKind::RhoTimesProfile;
    else if (*v == "custom") ws.eta_kind = EtaKind::Custom;
    else fail(ErrorCode::InvalidConfig, "eta_kind: expected rho, rho_squared, rho_times_profile or custom");
  }
  if (auto v = w.take("eta_scale")) ws.eta_scale = to_double("eta_scale", *v);
  if (auto v = w.take("q_scale")) ws.q_scale = to_double("q_scale", *v);
  auto expr = [&](const char* key, Expr& out) {
    if (auto v = w.take(key)) {
      try {
        out = Expr::parse(*v, gc.k);
      } catch (const Error& e) {
        fail(ErrorCode::InvalidConfig, std::string(key) + ": " + e.what());
      }
    }
  };
  expr("custom_q", ws.custom_q);
  expr("custom_b", ws.custom_b);
  expr("custom_eta", ws.custom_eta);
  expr("eta_profile", ws.eta_profile);
  w.done();
  if (ws.family == Family::Custom && ws.custom_q.empty())
    fail(ErrorCode::InvalidConfig, "family = custom needs custom_q");
  if (ws.eta_kind == EtaKind::Custom && ws.custom_eta.empty())
    fail(ErrorCode::InvalidConfig, "eta_kind = custom needs custom_eta");
  if (ws.eta_kind == EtaKind::RhoTimesProfile && ws.eta_profile.empty())
    fail(ErrorCode::InvalidConfig, "eta_kind = rho_times_profile needs eta_profile");

  auto& s = sections["solver"];
  SolverSection& sv = c.solver;
  if (auto v = s.take("tol")) sv.eigen.tol = to_double("tol", *v);
  if (auto v = s.take("max_iters")) sv.eigen.max_iters = to_int("max_iters", *v);
  if (auto v = s.take("inner")) {
    if (*v == "cholesky") sv.eigen.inner = InnerSolver::Cholesky;
    else if (*v == "jacobi_pcg") sv.eigen.inner = InnerSolver::JacobiPcg;
    else fail(ErrorCode::InvalidConfig, "inner: expected cholesky or jacobi_pcg");
  }
  if (auto v = s.take("pcg_max_iters")) sv.eigen.pcg_max_iters = to_int("pcg_max_iters", *v);
  if (auto v = s.take("pcg_tol")) sv.eigen.pcg_tol = to_double("pcg_tol", *v);
  if (auto v = s.take("levels")) sv.levels = parse_int_list(*v);
  if (auto v = s.take("diagnostic_levels")) sv.diagnostic_levels = parse_int_list(*v);
  if (auto v = s.take("tol_lambda")) sv.tol_lambda = to_double("tol_lambda", *v);
  if (auto v = s.take("gap_tolerance")) {
    if (*v != "auto") sv.gap_tolerance = to_double("gap_tolerance", *v);
  }
  if (auto v = s.take("calibration_lambda")) sv.calibration_lambda = to_double("calibration_lambda", *v);
  if (auto v = s.take("lambda")) sv.lambda = to_double("lambda", *v);
  if (auto v = s.take("lambda_from")) sv.lambda_from = to_double("lambda_from", *v);
  if (auto v = s.take("lambda_to")) sv.lambda_to = to_double("lambda_to", *v);
  if (auto v = s.take("steps")) sv.steps = to_int("steps", *v);
  if (auto v = s.take("epsilons")) sv.epsilons = parse_double_list(*v);
  if (auto v = s.take("log_powers")) sv.log_powers = parse_double_list(*v);
  if (auto v = s.take("log_reading")) {
    if (*v == "folded") sv.log_reading = LogReading::Folded;
    else if (*v == "stated") sv.log_reading = LogReading::Stated;
    else if (*v == "term_sum") sv.log_reading = LogReading::TermSum;
    else fail(ErrorCode::InvalidConfig, "log_reading: expected folded, stated or term_sum");
  }
  s.done();
  if (sv.levels.size() < 3 || sv.diagnostic_levels.size() < 3)
    fail(ErrorCode::InvalidConfig, "levels and diagnostic_levels need at least 3 entries");
  for (const auto* lv : {&sv.levels, &sv.diagnostic_levels})
    for (std::size_t i = 0; i < lv->size(); ++i)
      if ((*lv)[i] < 4 || (i > 0 && (*lv)[i] <= (*lv)[i - 1]))
        fail(ErrorCode::InvalidConfig, "levels must be increasing and >= 4");
  if (sv.steps < 2) fail(ErrorCode::InvalidConfig, "steps must be >= 2");
  if (!(sv.tol_lambda > 0)) fail(ErrorCode::InvalidConfig, "tol_lambda must be positive");

  auto& o = sections["output"];
  if (auto v = o.take("dir")) c.output.dir = *v;
  if (auto v = o.take("cache_dir")) c.output.cache_dir = *v;
  if (auto v = o.take("dump_vector")) c.output.dump_vector = to_bool("dump_vector", *v);
  if (auto v = o.take("dump_grid")) c.output.dump_grid = to_bool("dump_grid", *v);
  o.done();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IOError, "cannot read config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::string model_blocks(const RunConfig& c) {
  const auto& g = c.geometry;
  const auto& w = c.weights;
  std::ostringstream o;
  o << "[geometry]\n"
    << "dimension = " << g.N << "\n"
    << "submanifold_dimension = " << g.k << "\n"
    << "model = " << to_string(g.model) << "\n"
    << "tube_radius = " << format_double(g.R) << "\n"
    << "grading = " << format_double(g.grading_gamma) << "\n"
    << "n_r = " << g.n_r << "\n"
    << "n_z = " << g.n_z << "\n\n";
  o << "[weights]\n"
    << "family = " << to_string(w.family) << "\n"
    << "q0 = " << format_double(w.q0) << "\n"
    << "A = " << format_double(w.A) << "\n"
    << "beta = " << format_double(w.beta) << "\n"
    << "z0 = " << join(w.z0) << "\n"
    << "b_profile = " << join(w.b_profile) << "\n"
    << "eta_kind = " << to_string(w.eta_kind) << "\n"
    << "eta_scale = " << format_double(w.eta_scale) << "\n"
    << "q_scale = " << format_double(w.q_scale) << "\n";
  if (!w.custom_q.empty()) o << "custom_q = " << w.custom_q.text() << "\n";
  if (!w.custom_b.empty()) o << "custom_b = " << w.custom_b.text() << "\n";
  if (!w.custom_eta.empty()) o << "custom_eta = " << w.custom_eta.text() << "\n";
  if (!w.eta_profile.empty()) o << "eta_profile = " << w.eta_profile.text() << "\n";
  return o.str();
}

std::string to_ini(const RunConfig& c) {
  const auto& s = c.solver;
  std::ostringstream o;
  o << model_blocks(c) << "\n[solver]\n"
    << "tol = " << format_double(s.eigen.tol) << "\n"
    << "max_iters = " << s.eigen.max_iters << "\n"
    << "inner = " << (s.eigen.inner == InnerSolver::Cholesky ? "cholesky" : "jacobi_pcg") << "\n"
    << "pcg_max_iters = " << s.eigen.pcg_max_iters << "\n"
    << "pcg_tol = " << format_double(s.eigen.pcg_tol) << "\n"
    << "levels = " << join(s.levels) << "\n"
    << "diagnostic_levels = " << join(s.diagnostic_levels) << "\n"
    << "tol_lambda = " << format_double(s.tol_lambda) << "\n"
    << "gap_tolerance = " << (s.gap_tolerance ? format_double(*s.gap_tolerance) : std::string("auto")) << "\n"
    << "calibration_lambda = " << format_double(s.calibration_lambda) << "\n"
    << "lambda = " << format_double(s.lambda) << "\n"
    << "lambda_from = " << format_double(s.lambda_from) << "\n"
    << "lambda_to = " << format_double(s.lambda_to) << "\n"
    << "steps = " << s.steps << "\n"
    << "epsilons = " << join(s.epsilons) << "\n"
    << "log_powers = " << join(s.log_powers) << "\n";
  const char* reading = s.log_reading == LogReading::Folded   ? "folded"
                        : s.log_reading == LogReading::Stated ? "stated"
                                                              : "term_sum";
  o << "log_reading = " << reading << "\n\n[output]\n"
    << "dir = " << c.output.dir << "\n"
    << "cache_dir = " << c.output.cache_dir << "\n"
    << "dump_vector = " << (c.output.dump_vector ? "true" : "false") << "\n"
    << "dump_grid = " << (c.output.dump_grid ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace hardylab
