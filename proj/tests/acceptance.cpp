// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion N   just N
// Exit status 0 only when every selected criterion passes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hardylab/assembly.hpp"
#include "hardylab/config.hpp"
#include "hardylab/criterion.hpp"
#include "hardylab/eigensolve.hpp"
#include "hardylab/extrapolate.hpp"
#include "hardylab/groundstate.hpp"
#include "hardylab/run.hpp"
#include "hardylab/threshold.hpp"
#include "json.hpp"

using namespace hardylab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> info;  // printed under the verdict line, not part of it

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

GeometryConfig geom(int N, int k, double R, int n_r, int n_z) {
  GeometryConfig g;
  g.N = N;
  g.k = k;
  g.R = R;
  g.n_r = n_r;
  g.n_z = n_z;
  return g;
}

struct Ladder {
  std::vector<int> levels;
  std::vector<double> mu;
  Extrapolation ext;
};

Ladder flat_ladder(double lambda, int n_z) {
  Ladder L;
  L.levels = {64, 128, 256};
  const WeightSpec raw = make_constant(1.0, 1.0, EtaKind::RhoSquared, 1);
  GeometryConfig g = geom(5, 1, 0.25, 64, n_z);
  for (int n : L.levels) {
    g.n_r = n;
    const Grid grid(g);
    const auto f = assemble_forms(grid, validate_and_normalize(raw, grid));
    SolverOptions opt;
    opt.tol = 1e-9;
    const auto r = solve_mu(f, lambda, opt);
    L.mu.push_back(r.mu);
  }
  L.ext = extrapolate_levels(L.levels, L.mu, g.grading_gamma);
  return L;
}

// 1. flat sharp constant
Outcome criterion1() {
  Outcome o;
  const Ladder L = flat_ladder(-10.0, 64);
  o.check(L.ext.value >= 0.98 && L.ext.value <= 1.02,
          "mu_ext(lambda=-10) = " + fmt("%.6f", L.ext.value) + " in [0.98, 1.02]");
  o.info.push_back("per level " + fmt("%.6f", L.mu[0]) + " " + fmt("%.6f", L.mu[1]) + " " + fmt("%.6f", L.mu[2]) +
                   "; u=1 quotient bound 10 R^2/2 = 0.3125");
  const Ladder D = flat_ladder(-1000.0, 64);
  o.info.push_back("lambda=-1000: mu_ext = " + fmt("%.6f", D.ext.value) + " (" + to_string(D.ext.model) + ")");
  return o;
}

// 2. monotone and concave in lambda
Outcome criterion2() {
  Outcome o;
  std::vector<double> lambdas;
  for (int i = -5; i <= 5; ++i) lambdas.push_back(i);
  struct Case {
    const char* name;
    GeometryConfig g;
    WeightSpec w;
  };
  std::vector<Case> cases{
      {"flat N=5", geom(5, 1, 0.25, 64, 16), make_constant(1.0, 1.0, EtaKind::RhoSquared, 1)},
      {"sin_power N=4", geom(4, 1, 0.25, 64, 32), make_sin_family(0.5, 1.5, {0.0}, EtaKind::Rho)},
      {"sin_power k=2", geom(5, 2, 0.25, 32, 16), make_sin_family(0.5, 1.0, {0.0, 0.0}, EtaKind::RhoSquared)},
  };
  SolverOptions opt;
  opt.tol = 1e-10;
  for (auto& c : cases) {
    const Grid grid(c.g);
    const auto f = assemble_forms(grid, validate_and_normalize(c.w, grid));
    const auto rs = sweep(f, lambdas, opt);
    double worst_mono = -INFINITY, worst_conc = -INFINITY;
    bool conv = true;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      conv = conv && rs[i].converged;
      if (i > 0) worst_mono = std::max(worst_mono, rs[i].mu - rs[i - 1].mu);
      if (i > 0 && i + 1 < rs.size()) {
        const double defect = rs[i - 1].mu + rs[i + 1].mu - 2.0 * rs[i].mu;
        worst_conc = std::max(worst_conc, defect - 1e-8 * std::abs(rs[i].mu));
      }
    }
    o.check(conv && worst_mono <= 1e-9 && worst_conc <= 0.0,
            std::string(c.name) + " max step " + fmt("%.3g", worst_mono) + ", concavity slack " + fmt("%.3g", worst_conc));
  }
  return o;
}

// 3. local Hardy remainder
Outcome criterion3() {
  Outcome o;
  SolverOptions opt;
  opt.tol = 1e-9;
  for (double R : {0.1, 0.05}) {
    for (int fam = 0; fam < 2; ++fam) {
      const WeightSpec raw = fam == 0 ? make_constant(1.0, 1.0, EtaKind::RhoSquared, 1)
                                      : make_sin_family(0.5, 1.5, {0.0}, EtaKind::RhoSquared);
      double c[2];
      for (int l = 0; l < 2; ++l) {
        const GeometryConfig g = geom(5, 1, R, 64 << l, 16);
        const Grid grid(g);
        const auto f = assemble_forms(grid, validate_and_normalize(raw, grid));
        c[l] = local_hardy_remainder(f, g, opt).mu;
      }
      const double rel = std::abs(c[1] - c[0]) / std::abs(c[1]);
      o.check(c[0] > 0 && c[1] > 0 && rel <= 0.2, std::string(fam ? "sin_power" : "flat") + " R=" + fmt("%g", R) +
                                                      " c_h " + fmt("%.4f", c[0]) + " -> " + fmt("%.4f", c[1]) +
                                                      " (" + fmt("%.1f", 100 * rel) + "%)");
    }
  }
  return o;
}

// 4. expansion residual, constant-q oracle case
Outcome criterion4() {
  Outcome o;
  const GeometryConfig g = geom(5, 1, 0.25, 64, 16);
  const auto sched = ExpansionSchedule::dyadic(1, 8);
  for (double q : {0.75, 1.0}) {
    // q as written: normalization would lift a constant 0.75 to 1
    const WeightSpec w = make_constant(q, 1.0, EtaKind::RhoSquared, 1);
    for (double a : {0.0, -1.0, 0.5}) {
      const ExpansionCheck chk = expansion_residual(w, {a, 0.0}, sched, g);
      const double growth = quartile_growth(chk);
      const std::string what = "q=" + fmt("%g", q) + " a=" + fmt("%g", a) + " quartile ratio " + fmt("%.3f", growth);
      if (q == 0.75)
        o.check(growth <= 2.0, what);
      else
        o.info.push_back(what + (growth <= 2.0 ? "" : " (above 2, reported only)"));
    }
  }
  return o;
}

// 5. barrier signs
Outcome criterion5() {
  Outcome o;
  const GeometryConfig g = geom(4, 1, 0.25, 64, 16);
  const Grid grid(g);
  const WeightSpec w = validate_and_normalize(make_sin_family(0.5, 1.5, {0.0}, EtaKind::RhoSquared), grid);
  const auto sched = BarrierSchedule::log_spaced(g, 1e-6, 8);
  for (double lambda : {0.0, 1.0, 10.0}) {
    for (double eps : {0.0, 0.1, 0.5}) {
      const auto rep = barrier_check(BarrierKind::SubsolutionVeps, w, lambda, eps, sched, g);
      o.check(rep.r_valid >= 1e-3, "V_" + fmt("%g", eps) + " lambda=" + fmt("%g", lambda) + " r_valid " +
                                       fmt("%.3g", rep.r_valid));
    }
    const auto u = barrier_check(BarrierKind::SupersolutionU, w, lambda, 0.0, sched, g);
    o.check(u.r_valid >= 1e-3 && u.positivity_ok,
            "U lambda=" + fmt("%g", lambda) + " r_valid " + fmt("%.3g", u.r_valid) + (u.positivity_ok ? "" : " U<=0"));
  }
  return o;
}

// 6. criterion classifier
Outcome criterion6() {
  Outcome o;
  int ok = 0, total = 0;
  for (double beta : {0.25, 0.5, 0.75, 1.25, 1.5, 2.0}) {
    for (double A : {0.25, 0.5, 0.9}) {
      const GeometryConfig g = geom(5, 1, 0.25, 16, 16);
      const Grid grid(g);
      const WeightSpec w = validate_and_normalize(make_sin_family(A, beta, {0.0}), grid);
      const auto r = classify_criterion(w);
      const Verdict want = beta < 1.0 ? Verdict::Convergent : Verdict::Divergent;
      ++total;
      if (r.verdict == want) {
        ++ok;
      } else {
        o.check(false, "beta=" + fmt("%g", beta) + " A=" + fmt("%g", A) + " got " + to_string(r.verdict));
      }
    }
  }
  o.check(ok == total, std::to_string(ok) + "/" + std::to_string(total) + " verdicts match beta < 1");
  const GeometryConfig g = geom(5, 1, 0.25, 16, 16);
  const Grid grid(g);
  const auto r = classify_criterion(validate_and_normalize(make_sin_family(0.5, 1.0, {0.0}), grid));
  o.check(r.verdict == Verdict::Divergent && (r.basis == VerdictBasis::GrowthTest || r.basis == VerdictBasis::Both),
          "beta=1: " + to_string(r.verdict) + " via " + to_string(r.basis));
  return o;
}

// 7. barrier integral dichotomy
Outcome criterion7() {
  Outcome o;
  const GeometryConfig g = geom(5, 1, 0.25, 16, 16);
  const Grid grid(g);
  for (double beta : {1.5, 0.5}) {
    const WeightSpec w = validate_and_normalize(make_sin_family(0.5, beta, {0.0}), grid);
    std::vector<double> rhs;
    std::string series;
    bool lhs_ok = true;
    for (int j = 4; j <= 12; ++j) {
      const auto b = barrier_integral_bound(w, 0.5 * g.R, std::ldexp(1.0, -j), g);
      rhs.push_back(b.rhs);
      lhs_ok = lhs_ok && b.lhs >= b.rhs;
    }
    if (beta > 1.0) {
      double min_ratio = INFINITY;
      for (std::size_t i = 1; i < rhs.size(); ++i) min_ratio = std::min(min_ratio, rhs[i] / rhs[i - 1]);
      o.check(min_ratio >= 1.5, "beta=1.5 min growth per level " + fmt("%.4f", min_ratio));
    } else {
      const double rel = std::abs(rhs.back() - rhs[rhs.size() - 2]) / std::abs(rhs.back());
      o.check(rel <= 0.05, "beta=0.5 last two levels differ " + fmt("%.2e", rel));
    }
    o.info.push_back("beta=" + fmt("%g", beta) + " lhs >= rhs at every level: " + (lhs_ok ? "yes" : "no"));
  }
  return o;
}

// 8. threshold dichotomy
Outcome criterion8() {
  Outcome o;
  const GeometryConfig g = geom(5, 1, 0.25, 1024, 8);
  const WeightSpec raw = make_constant(1.0, 1.0, EtaKind::RhoSquared, 1);
  ThresholdOptions opt;
  opt.levels = {1024, 2048, 4096};
  opt.tol_lambda = 0.1;
  const ThresholdResult t = find_lambda_star(g, raw, opt);
  const double C = g.hardy_constant();
  LevelLadder ladder(g, raw, opt.levels);
  const Probe below = evaluate_probe(ladder, t.lo - 1.0, t.gap_tolerance, opt.solver);
  const Probe above = evaluate_probe(ladder, t.hi + 1.0, t.gap_tolerance, opt.solver);
  o.check(t.hi - t.lo <= 0.1 && !t.predicate_lo && t.predicate_hi,
          "bracket [" + fmt("%.4f", t.lo) + ", " + fmt("%.4f", t.hi) + "] predicates " +
              (t.predicate_lo ? "T" : "F") + "/" + (t.predicate_hi ? "T" : "F"));
  o.check(std::abs(below.extrapolated.value - C) <= t.gap_tolerance,
          "mu_ext(lo-1) = " + fmt("%.5f", below.extrapolated.value) + " within gap " + fmt("%.4g", t.gap_tolerance));
  o.check(above.extrapolated.value < C - t.gap_tolerance, "mu_ext(hi+1) = " + fmt("%.5f", above.extrapolated.value));
  LevelLadder diag(g, raw, kDiagnosticLevels);
  const auto d_hi = attainment_diagnostic(diag, t.hi + 1.0, opt.solver);
  const auto d_lo = attainment_diagnostic(diag, t.lo - 1.0, opt.solver);
  o.check(d_hi.verdict == AttainmentVerdict::BoundedMinimizer, "hi+1 " + to_string(d_hi.verdict));
  o.check(d_lo.verdict != AttainmentVerdict::BoundedMinimizer, "lo-1 " + to_string(d_lo.verdict));
  o.info.push_back("lambda* = " + fmt("%.4f", t.lambda_star) + "; closed form for this setup -41.3850");
  return o;
}

// 9. reduced model vs full torus grid
Outcome criterion9() {
  Outcome o;
  const WeightSpec raw = make_sin_family(0.5, 1.5, {0.0}, EtaKind::RhoSquared);
  SolverOptions opt;
  opt.tol = 1e-9;
  GeometryConfig gr = geom(4, 1, 0.25, 64, 12);
  const Grid grid_r(gr);
  GeometryConfig gf = geom(4, 1, 0.25, 12, 12);
  gf.model = Model::FullTorus;
  const Grid grid_f(gf);
  // 4D fill makes direct factorization impractical here
  SolverOptions opt_f = opt;
  opt_f.inner = InnerSolver::JacobiPcg;
  const auto ff = assemble_forms(grid_f, validate_and_normalize(raw, grid_f));
  const auto fr = assemble_forms(grid_r, validate_and_normalize(raw, grid_r));
  const auto mf = solve_mu(ff, 0.0, opt_f);
  const auto mr = solve_mu(fr, 0.0, opt);
  const double C = gr.hardy_constant();
  const double diff = std::abs(mr.mu - mf.mu);
  o.check(mr.converged && mf.converged && diff <= 0.03 * std::max(std::abs(mr.mu), C),
          "reduced " + fmt("%.3g", mr.mu) + " vs full torus " + fmt("%.3g", mf.mu) + ", |diff| " + fmt("%.2e", diff) +
              " <= 3% of max(|mu|, C)");
  return o;
}

// 10. determinism of every subcommand
Outcome criterion10() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("hardylab_acc10_" + std::to_string(::getpid()));
  fs::remove_all(root);
  RunConfig cfg;
  cfg.geometry = geom(5, 1, 0.25, 32, 8);
  cfg.weights = make_sin_family(0.5, 1.5, {0.0}, EtaKind::RhoSquared);
  cfg.solver.levels = {64, 128, 256};
  cfg.solver.diagnostic_levels = {32, 64, 128};
  cfg.solver.lambda = 1.0;
  cfg.solver.steps = 5;
  int identical = 0;
  for (const auto& cmd : kCommands) {
    std::vector<std::map<std::string, std::string>> payloads(2);
    bool ok = true;
    for (int run = 0; run < 2; ++run) {
      RunConfig c = cfg;
      // same paths each time, wiped so both runs start from a clean cache
      fs::remove_all(root / cmd);
      c.output.dir = (root / cmd / "out").string();
      c.output.cache_dir = (root / cmd / "cache").string();
      RunFlags flags;
      flags.dump_vector = flags.dump_grid = true;
      const RunResult r = run_command(c, cmd, flags);
      if (r.exit_code != 0) {
        o.check(false, cmd + " exit " + std::to_string(r.exit_code) + ": " + r.message);
        ok = false;
        break;
      }
      for (const auto& f : r.outputs) payloads[run][f.name] = f.sha256;
      std::ifstream mf(r.manifest_path);
      auto m = nlohmann::ordered_json::parse(mf);
      m.erase("timings");
      payloads[run]["manifest.json"] = m.dump();
    }
    if (!ok) continue;
    if (payloads[0] == payloads[1]) ++identical;
    else o.check(false, cmd + " differs between runs");
  }
  fs::remove_all(root);
  o.check(identical == static_cast<int>(kCommands.size()),
          std::to_string(identical) + "/" + std::to_string(kCommands.size()) + " subcommands byte-identical");
  return o;
}

struct Criterion {
  std::function<Outcome()> run;
  double budget_s;
};

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, Criterion> all{
      {1, {criterion1, 30}},  {2, {criterion2, 60}},  {3, {criterion3, 60}},  {4, {criterion4, 10}},
      {5, {criterion5, 30}},  {6, {criterion6, 60}},  {7, {criterion7, 30}},  {8, {criterion8, 300}},
      {9, {criterion9, 120}}, {10, {criterion10, 600}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
      return 2;
    }
  }
  if (selected.empty())
    for (const auto& [n, c] : all) selected.push_back(n);

  bool all_pass = true;
  for (int n : selected) {
    auto it = all.find(n);
    if (it == all.end()) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > it->second.budget_s) o.pass = false;
    std::printf("criterion %d: %s %s [%.1f s / %.0f s]\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                it->second.budget_s);
    for (const auto& line : o.info) std::printf("    info: %s\n", line.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
