#include "hardylab/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "hardylab/errors.hpp"

namespace hardylab {

LevelLadder::LevelLadder(const GeometryConfig& cfg, const WeightSpec& raw, std::vector<int> n_r_levels)
    : cfg_(cfg), levels_(std::move(n_r_levels)) {
  if (levels_.empty()) fail(ErrorCode::InvalidConfig, "no refinement levels");
  for (int n : levels_) {
    GeometryConfig c = cfg;
    c.n_r = n;
    grids_.push_back(std::make_unique<Grid>(c));
    specs_.push_back(validate_and_normalize(raw, *grids_.back()));
    forms_.push_back(assemble_forms(*grids_.back(), specs_.back()));
  }
}

Probe evaluate_probe(const LevelLadder& ladder, double lambda, double gap, const SolverOptions& opt) {
  Probe p;
  p.lambda = lambda;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const EigenResult r = solve_mu(ladder.forms(i), lambda, opt);
    if (!r.converged) fail(ErrorCode::NotConverged, "solve at lambda = " + std::to_string(lambda));
    p.mu.push_back(r.mu);
    p.residual.push_back(r.residual);
  }
  p.extrapolated = extrapolate_levels(ladder.levels(), p.mu, ladder.config().grading_gamma);
  p.below = p.extrapolated.value < ladder.config().hardy_constant() - gap;
  return p;
}

double calibrate_gap(const GeometryConfig& cfg, const ThresholdOptions& opt, double* mu_ext) {
  WeightSpec flat = make_constant(1.0, 1.0, EtaKind::RhoSquared, cfg.k);
  LevelLadder ladder(cfg, flat, opt.levels);
  const double lambda = opt.calibration_lambda / (cfg.R * cfg.R);
  const Probe p = evaluate_probe(ladder, lambda, 0.0, opt.solver);
  if (mu_ext) *mu_ext = p.extrapolated.value;
  return 3.0 * std::abs(p.extrapolated.value - cfg.hardy_constant());
}

ThresholdResult find_lambda_star(const GeometryConfig& cfg, const WeightSpec& raw, const ThresholdOptions& opt) {
  if (!(cfg.hardy_constant() > 0.0)) fail(ErrorCode::InvalidConfig, "threshold needs N-k >= 3");
  ThresholdResult res;
  res.levels = opt.levels;
  if (opt.gap) {
    res.gap_tolerance = *opt.gap;
  } else {
    res.gap_tolerance = calibrate_gap(cfg, opt, &res.calibration_mu);
  }
  LevelLadder ladder(cfg, raw, opt.levels);

  std::map<double, Probe> seen;
  auto P = [&](double lambda) -> bool {
    auto it = seen.find(lambda);
    if (it == seen.end()) it = seen.emplace(lambda, evaluate_probe(ladder, lambda, res.gap_tolerance, opt.solver)).first;
    return it->second.below;
  };

  double lo = -1.0, hi = 1.0;
  while (P(lo)) {
    lo *= 2.0;
    if (-lo > opt.lambda_limit) fail(ErrorCode::NoBracket, "predicate true down to -1e6");
  }
  while (!P(hi)) {
    hi *= 2.0;
    if (hi > opt.lambda_limit) fail(ErrorCode::NoBracket, "predicate false up to 1e6");
  }
  while (hi - lo > opt.tol_lambda) {
    const double mid = 0.5 * (lo + hi);
    if (P(mid)) hi = mid;
    else lo = mid;
  }
  res.lo = lo;
  res.hi = hi;
  res.lambda_star = 0.5 * (lo + hi);
  res.predicate_lo = P(lo);
  res.predicate_hi = P(hi);
  for (auto& [l, p] : seen) res.probes.push_back(p);
  return res;
}

std::string to_string(AttainmentVerdict v) {
  switch (v) {
    case AttainmentVerdict::BoundedMinimizer: return "BoundedMinimizer";
    case AttainmentVerdict::ConcentratingSequence: return "ConcentratingSequence";
    case AttainmentVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

AttainmentVerdict classify_attainment(const std::vector<double>& n, const std::vector<double>& m) {
  const std::size_t L = n.size();
  if (L < 2 || m.size() != L) return AttainmentVerdict::Inconclusive;
  const double dn = n[L - 1] - n[L - 2];
  const double dm = m[L - 1] - m[L - 2];
  const bool norm_stable = std::abs(dn) <= 0.1 * std::abs(n[L - 2]);
  const bool mass_stable = std::abs(dm) <= 0.1 * std::max(std::abs(m[L - 2]), 1e-12);
  if (norm_stable && mass_stable) return AttainmentVerdict::BoundedMinimizer;
  if (dn > 0.1 * std::abs(n[L - 2]) && dm > 0.0) return AttainmentVerdict::ConcentratingSequence;
  return AttainmentVerdict::Inconclusive;
}

AttainmentDiagnostic attainment_diagnostic(const LevelLadder& ladder, double lambda, const SolverOptions& opt) {
  AttainmentDiagnostic d;
  d.lambda = lambda;
  d.levels = ladder.levels();
  const double cut = ladder.config().R / std::ldexp(1.0, d.mass_level);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const QuadraticForms& F = ladder.forms(i);
    const EigenResult r = solve_mu(F, lambda, opt);
    if (!r.converged) fail(ErrorCode::NotConverged, "diagnostic solve at lambda = " + std::to_string(lambda));
    const double mq = F.energy(Form::M_q, r.vector);
    const double m0 = F.energy(Form::M_0, r.vector);
    const double inner = partial_energy(ladder.grid(i), ladder.spec(i), Form::M_q, r.vector,
                                        [&](const FermiPoint& p) { return p.r < cut; });
    d.mu.push_back(r.mu);
    d.rho_inv_norm_series.push_back(mq / m0);
    d.mass_ratio_series.push_back(inner / mq);
  }
  d.verdict = classify_attainment(d.rho_inv_norm_series, d.mass_ratio_series);
  return d;
}

AttainmentDiagnostic attainment_diagnostic(const GeometryConfig& cfg, const WeightSpec& raw, double lambda,
                                           const std::vector<int>& levels, const SolverOptions& opt) {
  LevelLadder ladder(cfg, raw, levels);
  return attainment_diagnostic(ladder, lambda, opt);
}

}  // namespace hardylab
