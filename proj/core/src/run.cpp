#include "hardylab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>

#include "hardylab/assembly.hpp"
#include "hardylab/criterion.hpp"
#include "hardylab/eigensolve.hpp"
#include "hardylab/errors.hpp"
#include "hardylab/groundstate.hpp"
#include "hardylab/threshold.hpp"
#include "json_out.hpp"

#ifndef HARDYLAB_VERSION
#define HARDYLAB_VERSION "dev"
#endif

namespace hardylab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string config_hash(const RunConfig& cfg) { return sha256_hex(model_blocks(cfg)); }

namespace {

std::string F(double v) { return format_double(v); }

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json ivec(const std::vector<int>& v) {
  json a = json::array();
  for (int x : v) a.push_back(x);
  return a;
}

class Timer {
public:
  void start(const std::string& name) {
    name_ = name;
    t0_ = std::chrono::steady_clock::now();
  }
  void stop() {
    timings_[name_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }
  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : timings_) j[k] = v;
    return j;
  }

private:
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
  std::map<std::string, double> timings_;
};

struct Context {
  RunConfig cfg;
  std::string hash;
  fs::path cache_dir;  // empty: no cache
  std::unique_ptr<OutputDir> out;
  Timer timer;
  std::vector<std::string> warnings;
  bool cache_hit = false;
  bool dump_vector = false;
  bool dump_grid = false;

  std::unique_ptr<Grid> grid;
  WeightSpec spec;  // normalized on grid
  std::optional<QuadraticForms> forms;

  json extra = json::object();  // command-specific manifest entries

  void prepare() {
    timer.start("validate");
    grid = std::make_unique<Grid>(cfg.geometry);
    spec = validate_and_normalize(cfg.weights, *grid);
    for (const auto& w : spec.warnings) warnings.push_back(w);
    timer.stop();
  }

  const QuadraticForms& ensure_forms() {
    if (forms) return *forms;
    timer.start("assemble");
    fs::path file;
    if (!cache_dir.empty()) {
      file = cache_file(cache_dir, hash);
      forms = load_forms(file, hash);
      cache_hit = forms.has_value();
    }
    if (!forms) {
      forms = assemble_forms(*grid, spec);
      forms->config_hash = hash;
      if (!file.empty()) save_forms(file, *forms);
    }
    timer.stop();
    return *forms;
  }

  SolverOptions solver() const { return cfg.solver.eigen; }
};

std::string z_header(int k, const char* single = "z") {
  if (k == 1) return single;
  std::string h;
  for (int j = 1; j <= k; ++j) h += (j > 1 ? ",z_" : "z_") + std::to_string(j);
  return h;
}

std::string z_cells(const std::vector<double>& z) {
  std::string s;
  for (std::size_t j = 0; j < z.size(); ++j) s += (j ? "," : "") + F(z[j]);
  return s;
}

json normalization_json(const WeightSpec& s) {
  json j;
  j["q_factor"] = s.q_factor;
  json mx = json::array();
  for (const auto& p : s.maximizers) mx.push_back(vec(p));
  j["maximizers"] = mx;
  j["continuum_maximizers"] = s.continuum_maximizers;
  return j;
}

void dump_grid(Context& c) {
  const Grid& g = *c.grid;
  const int k = c.cfg.geometry.k;
  std::string out = "index,r," + z_header(k, "z_1") + ",measure_weight\n";
  const auto w = g.lumped_node_measure();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const FermiPoint p = g.node_point(i);
    out += std::to_string(i) + "," + F(p.r) + "," + z_cells(p.z) + "," + F(w[i]) + "\n";
  }
  c.out->write("grid.csv", out);
}

void dump_vector(Context& c, const std::vector<double>& v, const std::string& name) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < v.size(); ++i) out += std::to_string(i) + "," + F(v[i]) + "\n";
  c.out->write(name, out);
}

void require_converged(const EigenResult& r, const std::string& what) {
  if (!r.converged)
    fail(ErrorCode::NotConverged, what + ": residual " + F(r.residual) + " after " + std::to_string(r.iterations) +
                                      " iterations");
}

// --- commands -----------------------------------------------------------

void cmd_validate(Context& c) {
  json j;
  j["hardy_constant"] = c.cfg.geometry.hardy_constant();
  j["node_count"] = c.grid->node_count();
  j["cell_count"] = c.grid->cell_count();
  j["total_measure"] = c.grid->total_measure();
  j["normalization"] = normalization_json(c.spec);
  json w = json::array();
  for (const auto& s : c.spec.warnings) w.push_back(s);
  j["warnings"] = w;
  c.out->write("normalization.json", dump_json(j));
}

void cmd_assemble(Context& c) {
  const QuadraticForms& f = c.ensure_forms();
  json j;
  j["config_hash"] = c.hash;
  j["dof_count"] = f.dof_count;
  j["nnz"] = f.pattern->nnz();
  j["eta_over_q_bound"] = f.eta_over_q_bound;
  j["q_over_log_bound"] = f.q_over_log_bound;
  std::vector<double> ones(f.dof_count, 1.0);
  json e;
  for (int k = 0; k < kFormCount; ++k) e[to_string(static_cast<Form>(k))] = f.energy(static_cast<Form>(k), ones);
  j["energy_of_one"] = e;
  c.out->write("assembly.json", dump_json(j));
}

std::string sweep_header() { return "lambda,mu,residual,iterations\n"; }
std::string sweep_row(const EigenResult& r) {
  return csv_line({F(r.lambda), F(r.mu), F(r.residual), std::to_string(r.iterations)});
}

void cmd_solve(Context& c) {
  const QuadraticForms& f = c.ensure_forms();
  c.timer.start("solve");
  const EigenResult r = solve_mu(f, c.cfg.solver.lambda, c.solver());
  c.timer.stop();
  require_converged(r, "solve");
  c.out->write("solve.csv", sweep_header() + sweep_row(r));
  if (c.dump_vector) dump_vector(c, r.vector, "vector.csv");
}

std::vector<double> sweep_lambdas(const SolverSection& s) {
  std::vector<double> out;
  for (int i = 0; i < s.steps; ++i)
    out.push_back(s.lambda_from + (s.lambda_to - s.lambda_from) * i / (s.steps - 1));
  return out;
}

std::vector<EigenResult> run_sweep(Context& c) {
  const QuadraticForms& f = c.ensure_forms();
  auto lambdas = sweep_lambdas(c.cfg.solver);
  if (!(c.cfg.solver.lambda_to > c.cfg.solver.lambda_from))
    fail(ErrorCode::InvalidConfig, "sweep needs lambda_from < lambda_to");
  c.timer.start("solve");
  auto rs = sweep(f, lambdas, c.solver());
  c.timer.stop();
  for (const auto& r : rs) require_converged(r, "sweep at lambda " + F(r.lambda));
  return rs;
}

void cmd_sweep(Context& c) {
  const auto rs = run_sweep(c);
  std::string out = sweep_header();
  for (const auto& r : rs) out += sweep_row(r);
  c.out->write("sweep.csv", out);
  if (c.dump_vector) dump_vector(c, rs.back().vector, "vector.csv");
}

ThresholdOptions threshold_options(const Context& c) {
  ThresholdOptions o;
  o.levels = c.cfg.solver.levels;
  o.tol_lambda = c.cfg.solver.tol_lambda;
  o.gap = c.cfg.solver.gap_tolerance;
  o.calibration_lambda = c.cfg.solver.calibration_lambda;
  o.solver = c.solver();
  return o;
}

json diagnostic_json(const AttainmentDiagnostic& d) {
  json j;
  j["lambda"] = d.lambda;
  j["levels"] = ivec(d.levels);
  j["mu"] = vec(d.mu);
  j["rho_inv_norm_series"] = vec(d.rho_inv_norm_series);
  j["mass_ratio_series"] = vec(d.mass_ratio_series);
  j["mass_radius"] = std::string("R/2^") + std::to_string(d.mass_level);
  j["verdict"] = to_string(d.verdict);
  return j;
}

json criterion_json(const CriterionReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["basis"] = to_string(r.basis);
  j["exponent_verdict"] = to_string(r.exponent_verdict);
  j["growth_verdict"] = to_string(r.growth_verdict);
  j["growth_exponent"] = r.growth_exponent;
  j["continuum_maximizers"] = r.maximizers.continuum;
  json mx = json::array();
  for (const auto& m : r.maximizers.points) mx.push_back({{"z", vec(m.z)}, {"localization_radius", m.localization_radius}});
  j["maximizers"] = mx;
  json beta = json::array();
  for (const auto& b : r.beta_estimates)
    beta.push_back({{"z", vec(b.z)},
                    {"beta", b.beta},
                    {"fit_residual", b.fit_residual},
                    {"samples", b.samples},
                    {"poor_fit", b.poor_fit}});
  j["beta"] = beta;
  json lv = json::array();
  for (const auto& l : r.levels)
    lv.push_back({{"level", l.level}, {"cap_radius", l.cap_radius}, {"integral", l.integral}, {"increment", l.increment}});
  j["levels"] = lv;
  json notes = json::array();
  for (const auto& n : r.notes) notes.push_back(n);
  j["notes"] = notes;
  return j;
}

CriterionReport run_criterion(Context& c) {
  c.timer.start("criterion");
  CriterionReport r = classify_criterion(c.spec);
  c.timer.stop();
  for (const auto& n : r.notes) c.warnings.push_back("criterion: " + n);
  if (r.verdict == Verdict::Inconclusive) c.warnings.push_back("criterion verdict Inconclusive");
  return r;
}

void cmd_criterion(Context& c) {
  const CriterionReport cr = run_criterion(c);
  std::string csv = "level,cap_radius,integral,increment\n";
  for (const auto& l : cr.levels)
    csv += csv_line({std::to_string(l.level), F(l.cap_radius), F(l.integral), F(l.increment)});
  c.out->write("criterion_levels.csv", csv);
  c.out->write("criterion.json", dump_json(criterion_json(cr)));
}

json threshold_json(const ThresholdResult& t) {
  json j;
  j["lambda_star"] = t.lambda_star;
  j["bracket"] = json::array({t.lo, t.hi});
  j["predicate_lo"] = t.predicate_lo;
  j["predicate_hi"] = t.predicate_hi;
  j["gap_tolerance"] = t.gap_tolerance;
  j["calibration_mu"] = t.calibration_mu;
  j["levels"] = ivec(t.levels);
  json per = json::array(), ext = json::array();
  for (const auto& p : t.probes) {
    for (std::size_t i = 0; i < p.mu.size(); ++i)
      per.push_back({{"n_r", t.levels[i]}, {"lambda", p.lambda}, {"mu", p.mu[i]}, {"residual", p.residual[i]}});
    ext.push_back({{"lambda", p.lambda},
                   {"mu", p.extrapolated.value},
                   {"error_estimate", p.extrapolated.error_estimate},
                   {"model", to_string(p.extrapolated.model)},
                   {"parameter", p.extrapolated.parameter},
                   {"below", p.below}});
  }
  j["per_mesh_mu"] = per;
  j["extrapolated_mu"] = ext;
  return j;
}

ThresholdResult run_threshold(Context& c) {
  c.timer.start("threshold");
  ThresholdResult t = find_lambda_star(c.cfg.geometry, c.cfg.weights, threshold_options(c));
  c.timer.stop();
  return t;
}

void cmd_lambda_star(Context& c) {
  const ThresholdResult t = run_threshold(c);
  json j = threshold_json(t);
  // attainment at lambda* is not decided; the pair is emitted for inspection
  const CriterionReport cr = run_criterion(c);
  c.timer.start("diagnose");
  const AttainmentDiagnostic d = attainment_diagnostic(c.cfg.geometry, c.cfg.weights, t.lambda_star,
                                                       c.cfg.solver.diagnostic_levels, c.solver());
  c.timer.stop();
  j["at_threshold"] = {{"criterion_verdict", to_string(cr.verdict)},
                       {"criterion_basis", to_string(cr.basis)},
                       {"diagnostic", diagnostic_json(d)}};
  c.out->write("lambda_star.json", dump_json(j));
}

std::string diagnostic_csv(const AttainmentDiagnostic& d) {
  std::string out = "lambda,n_r,mu,rho_inv_norm,mass_ratio\n";
  for (std::size_t i = 0; i < d.levels.size(); ++i)
    out += csv_line({F(d.lambda), std::to_string(d.levels[i]), F(d.mu[i]), F(d.rho_inv_norm_series[i]),
                     F(d.mass_ratio_series[i])});
  return out;
}

void cmd_diagnose(Context& c) {
  c.timer.start("diagnose");
  const AttainmentDiagnostic d = attainment_diagnostic(c.cfg.geometry, c.cfg.weights, c.cfg.solver.lambda,
                                                       c.cfg.solver.diagnostic_levels, c.solver());
  c.timer.stop();
  if (d.verdict == AttainmentVerdict::Inconclusive) c.warnings.push_back("attainment diagnostic Inconclusive");
  c.out->write("diagnostic.csv", diagnostic_csv(d));
  c.out->write("diagnostic.json", dump_json(diagnostic_json(d)));
}

void cmd_verify_expansion(Context& c) {
  const auto& g = c.cfg.geometry;
  const auto schedule = ExpansionSchedule::dyadic(g.k, 8);
  json summary = json::array();
  c.timer.start("expansion");
  for (std::size_t i = 0; i < c.cfg.solver.log_powers.size(); ++i) {
    const double a = c.cfg.solver.log_powers[i];
    const ExpansionCheck chk = expansion_residual(c.cfg.weights, {a, 0.0}, schedule, g, c.cfg.solver.log_reading);
    std::string csv = "rho," + z_header(g.k) + ",residual,scaled_residual,fd_error\n";
    for (const auto& s : chk.samples)
      csv += F(s.rho) + "," + z_cells(s.z) + "," + F(s.residual) + "," + F(s.scaled_residual) + "," + F(s.fd_error) + "\n";
    const std::string name = i == 0 ? "expansion.csv" : "expansion_" + std::to_string(i) + ".csv";
    c.out->write(name, csv);
    summary.push_back({{"a", a},
                       {"file", name},
                       {"reading", to_string(chk.reading)},
                       {"slope", chk.slope},
                       {"intercept", chk.intercept},
                       {"quartile_growth", quartile_growth(chk)},
                       {"max_scaled_residual", chk.max_scaled_residual},
                       {"dropped", chk.dropped},
                       {"fitted_log_coefficient", chk.fitted_log_coefficient},
                       {"folded_coefficient", chk.folded_coefficient},
                       {"stated_coefficient", chk.stated_coefficient},
                       {"termsum_coefficient", chk.termsum_coefficient},
                       {"nearest_reading", to_string(chk.nearest_reading)}});
    if (chk.dropped > 0) c.warnings.push_back("expansion a=" + F(a) + ": " + std::to_string(chk.dropped) + " samples below FD noise");
  }
  c.timer.stop();
  c.warnings.push_back("verify-expansion evaluates q as written (no normalization)");
  c.out->write("expansion.json", dump_json(json{{"checks", summary}}));
}

void cmd_verify_barriers(Context& c) {
  const auto& g = c.cfg.geometry;
  const double lambda = c.cfg.solver.lambda;
  const auto schedule = BarrierSchedule::log_spaced(g);
  std::string csv = "kind,epsilon,lambda,rho," + z_header(g.k) + ",value,fd_error,scaled,ok\n";
  json summary = json::array();
  c.timer.start("barriers");
  auto emit = [&](const BarrierReport& b) {
    for (const auto& s : b.samples)
      csv += to_string(b.kind) + "," + F(b.epsilon) + "," + F(b.lambda) + "," + F(s.rho) + "," + z_cells(s.z) + "," +
             F(s.value) + "," + F(s.fd_error) + "," + F(s.scaled) + "," + (s.ok ? "1" : "0") + "\n";
    summary.push_back({{"kind", to_string(b.kind)},
                       {"epsilon", b.epsilon},
                       {"lambda", b.lambda},
                       {"r_valid", b.r_valid},
                       {"worst_violation", b.worst_violation},
                       {"positivity_ok", b.positivity_ok}});
  };
  for (double eps : c.cfg.solver.epsilons)
    emit(barrier_check(BarrierKind::SubsolutionVeps, c.spec, lambda, eps, schedule, g));
  emit(barrier_check(BarrierKind::SupersolutionU, c.spec, lambda, 0.0, schedule, g));
  c.timer.stop();
  c.out->write("barriers.csv", csv);
  c.out->write("barriers.json", dump_json(json{{"checks", summary}}));
}

void cmd_local_hardy(Context& c) {
  const QuadraticForms& f = c.ensure_forms();
  c.timer.start("local_hardy");
  const EigenResult r1 = local_hardy_remainder(f, c.cfg.geometry, c.solver());
  require_converged(r1, "local-hardy");
  GeometryConfig fine = c.cfg.geometry;
  fine.n_r *= 2;
  const Grid g2(fine);
  const WeightSpec s2 = validate_and_normalize(c.cfg.weights, g2);
  const EigenResult r2 = local_hardy_remainder(assemble_forms(g2, s2), fine, c.solver());
  require_converged(r2, "local-hardy (refined)");
  c.timer.stop();
  json lv = json::array();
  lv.push_back({{"n_r", c.cfg.geometry.n_r}, {"c_h", r1.mu}, {"residual", r1.residual}, {"iterations", r1.iterations}});
  lv.push_back({{"n_r", fine.n_r}, {"c_h", r2.mu}, {"residual", r2.residual}, {"iterations", r2.iterations}});
  json j;
  j["levels"] = lv;
  j["relative_change"] = std::abs(r2.mu - r1.mu) / std::max(std::abs(r2.mu), 1e-300);
  j["outer_ring_constrained"] = true;
  c.out->write("local_hardy.json", dump_json(j));
  if (c.dump_vector) dump_vector(c, r1.vector, "vector.csv");
}

void cmd_report(Context& c) {
  std::string csv = "series,level,x,y\n";
  json summary;
  const auto rs = run_sweep(c);
  bool monotone = true;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    csv += csv_line({"mu_curve", std::to_string(c.cfg.geometry.n_r), F(rs[i].lambda), F(rs[i].mu)});
    if (i > 0 && rs[i].mu > rs[i - 1].mu + 1e-9) monotone = false;
  }
  summary["sweep"] = {{"n_r", c.cfg.geometry.n_r}, {"points", rs.size()}, {"monotone", monotone}};
  const CriterionReport cr = run_criterion(c);
  summary["criterion"] = {{"verdict", to_string(cr.verdict)}, {"basis", to_string(cr.basis)}};

  if (c.cfg.geometry.hardy_constant() > 0.0) {
    const ThresholdResult t = run_threshold(c);
    for (const auto& p : t.probes) {
      for (std::size_t i = 0; i < p.mu.size(); ++i)
        csv += csv_line({"threshold_mu", std::to_string(t.levels[i]), F(p.lambda), F(p.mu[i])});
      csv += csv_line({"threshold_mu", "extrapolated", F(p.lambda), F(p.extrapolated.value)});
    }
    summary["threshold"] = {{"lambda_star", t.lambda_star},
                            {"bracket", json::array({t.lo, t.hi})},
                            {"gap_tolerance", t.gap_tolerance}};
    c.timer.start("diagnose");
    LevelLadder ladder(c.cfg.geometry, c.cfg.weights, c.cfg.solver.diagnostic_levels);
    json diags = json::object();
    for (const auto& [name, lambda] : {std::pair<std::string, double>{"subcritical", t.lo - 1.0},
                                       std::pair<std::string, double>{"supercritical", t.hi + 1.0}}) {
      const AttainmentDiagnostic d = attainment_diagnostic(ladder, lambda, c.solver());
      for (std::size_t i = 0; i < d.levels.size(); ++i) {
        const std::string lv = std::to_string(d.levels[i]);
        csv += csv_line({"rho_inv_norm_" + name, lv, F(lambda), F(d.rho_inv_norm_series[i])});
        csv += csv_line({"mass_ratio_" + name, lv, F(lambda), F(d.mass_ratio_series[i])});
      }
      diags[name] = {{"lambda", lambda}, {"verdict", to_string(d.verdict)}};
    }
    c.timer.stop();
    summary["diagnostics"] = diags;
  } else {
    c.warnings.push_back("hardy constant is 0 (codimension 2): threshold skipped");
  }
  c.out->write("report.csv", csv);
  c.out->write("summary.json", dump_json(summary));
}

const std::map<std::string, std::function<void(Context&)>>& dispatch() {
  static const std::map<std::string, std::function<void(Context&)>> table{
      {"validate", cmd_validate},
      {"assemble", cmd_assemble},
      {"solve", cmd_solve},
      {"sweep", cmd_sweep},
      {"lambda-star", cmd_lambda_star},
      {"diagnose", cmd_diagnose},
      {"criterion", cmd_criterion},
      {"verify-expansion", cmd_verify_expansion},
      {"verify-barriers", cmd_verify_barriers},
      {"local-hardy", cmd_local_hardy},
      {"report", cmd_report},
  };
  return table;
}

json geometry_json(const GeometryConfig& g) {
  return {{"dimension", g.N},      {"submanifold_dimension", g.k}, {"model", to_string(g.model)},
          {"tube_radius", g.R},    {"grading", g.grading_gamma},   {"n_r", g.n_r},
          {"n_z", g.n_z},          {"hardy_constant", g.hardy_constant()}};
}

json weights_json(const WeightSpec& w) {
  json j = {{"family", to_string(w.family)}, {"q0", w.q0},
            {"A", w.A},                      {"beta", w.beta},
            {"z0", vec(w.z0)},               {"b_profile", vec(w.b_profile)},
            {"eta_kind", to_string(w.eta_kind)}, {"eta_scale", w.eta_scale},
            {"q_scale", w.q_scale}};
  if (!w.custom_q.empty()) j["custom_q"] = w.custom_q.text();
  if (!w.custom_b.empty()) j["custom_b"] = w.custom_b.text();
  if (!w.custom_eta.empty()) j["custom_eta"] = w.custom_eta.text();
  if (!w.eta_profile.empty()) j["eta_profile"] = w.eta_profile.text();
  return j;
}

void apply_flags(RunConfig& cfg, const RunFlags& f) {
  if (f.out_dir) cfg.output.dir = *f.out_dir;
  if (f.cache_dir) cfg.output.cache_dir = *f.cache_dir;
  if (f.lambda) cfg.solver.lambda = *f.lambda;
  if (f.tol) cfg.solver.eigen.tol = *f.tol;
  if (f.levels) {
    if (f.levels->size() < 3) fail(ErrorCode::InvalidConfig, "--levels needs at least 3 entries");
    cfg.solver.levels = *f.levels;
  }
  if (f.lambda_from) cfg.solver.lambda_from = *f.lambda_from;
  if (f.lambda_to) cfg.solver.lambda_to = *f.lambda_to;
  if (f.steps) {
    if (*f.steps < 2) fail(ErrorCode::InvalidConfig, "--steps must be >= 2");
    cfg.solver.steps = *f.steps;
  }
  if (f.dump_vector) cfg.output.dump_vector = true;
  if (f.dump_grid) cfg.output.dump_grid = true;
}

}  // namespace

RunResult run_command(RunConfig cfg, const std::string& command, const RunFlags& flags) {
  RunResult res;
  try {
    auto it = dispatch().find(command);
    if (it == dispatch().end()) fail(ErrorCode::InvalidConfig, "unknown command '" + command + "'");
    apply_flags(cfg, flags);
    if (!(cfg.solver.eigen.tol > 1e-12 && cfg.solver.eigen.tol < 1e-2))
      fail(ErrorCode::InvalidConfig, "tol must lie in (1e-12, 1e-2)");

    Context c;
    c.cfg = cfg;
    c.hash = config_hash(cfg);
    res.config_hash = c.hash;
    c.dump_vector = cfg.output.dump_vector;
    c.dump_grid = cfg.output.dump_grid;
    if (!cfg.output.cache_dir.empty()) {
      c.cache_dir = cfg.output.cache_dir;
    } else if (const char* env = std::getenv("HARDYLAB_CACHE"); env && *env) {
      c.cache_dir = env;
    }
    const fs::path manifest = fs::path(cfg.output.dir) / "manifest.json";
    std::error_code ec;
    fs::remove(manifest, ec);  // a stale manifest would vouch for a run that did not finish
    c.out = std::make_unique<OutputDir>(cfg.output.dir);

    c.prepare();
    if (c.dump_grid) dump_grid(c);
    it->second(c);

    json m;
    m["tool_version"] = HARDYLAB_VERSION;
    m["command"] = command;
    m["config_hash"] = c.hash;
    m["cache_hit"] = c.cache_hit;
    m["geometry"] = geometry_json(cfg.geometry);
    m["weights"] = weights_json(cfg.weights);
    m["normalization"] = normalization_json(c.spec);
    m["resolved_config"] = to_ini(cfg);
    json outs = json::array();
    for (const auto& f : c.out->files()) outs.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    m["outputs"] = outs;
    json w = json::array();
    w.push_back("numerator convention: A_b[u] - lambda M_eta[u]");
    for (const auto& s : c.warnings) w.push_back(s);
    m["warnings"] = w;
    m["timings"] = c.timer.to_json();
    write_atomic(manifest, dump_json(m));

    res.cache_hit = c.cache_hit;
    res.outputs = c.out->files();
    res.manifest_path = manifest.string();
  } catch (const Error& e) {
    res.exit_code = exit_code(e.code());
    res.message = e.what();
  } catch (const std::exception& e) {
    res.exit_code = 4;
    res.message = std::string("IOError: ") + e.what();
  }
  return res;
}

RunResult run_config(const std::string& config_path, const std::string& command, const RunFlags& flags) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = exit_code(e.code());
    r.message = e.what();
    return r;
  }
  return run_command(std::move(cfg), command, flags);
}

}  // namespace hardylab
