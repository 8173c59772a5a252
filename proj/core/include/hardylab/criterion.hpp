#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hardylab/weights.hpp"

namespace hardylab {

enum class Verdict { Convergent, Divergent, Inconclusive };
enum class VerdictBasis { ExponentTest, GrowthTest, Both, None };
std::string to_string(Verdict v);
std::string to_string(VerdictBasis b);

struct Maximizer {
  std::vector<double> z;
  double localization_radius;  // half-width where 1 - q/b stays below 1e-8
};

struct MaximizerSet {
  std::vector<Maximizer> points;
  bool continuum = false;  // positive-measure or non-isolated set: abstain
};

struct BetaEstimate {
  std::vector<double> z;
  double beta;          // min over coordinate rays
  double fit_residual;  // worst RMS log residual over rays
  int samples;
  bool poor_fit;
};

struct LevelEstimate {
  int level;          // cap radius 2^-level
  double cap_radius;
  double integral;
  double increment;   // integral - previous (0 at the first level)
};

struct CriterionOptions {
  int j_min = 4;
  int j_max = 24;
  double beta_margin = 0.05;
  double cauchy_tol = 0.05;
  /// Increments counted as non-decaying when log2 of their ratio stays above this.
  double decay_floor = -0.02;
  int ratio_window = 4;
};

struct CriterionReport {
  MaximizerSet maximizers;
  std::vector<BetaEstimate> beta_estimates;
  std::vector<LevelEstimate> levels;
  double growth_exponent = 0.0;  // mean log2 of successive increment ratios
  Verdict exponent_verdict = Verdict::Inconclusive;
  Verdict growth_verdict = Verdict::Inconclusive;
  Verdict verdict = Verdict::Inconclusive;
  VerdictBasis basis = VerdictBasis::None;
  std::vector<std::string> notes;
};

MaximizerSet find_maximizers(const WeightSpec& spec);
std::vector<BetaEstimate> estimate_exponents(const WeightSpec& spec, const MaximizerSet& set);
CriterionReport classify_criterion(const WeightSpec& spec, const CriterionOptions& opt = {});

/// Integral of (1 - q/b)^-1/2 over Sigma minus cubes of half-width cap around centers.
double criterion_integral(const WeightSpec& spec, const std::vector<std::vector<double>>& centers,
                          double cap);

/// Nested adaptive Gauss-Kronrod over T^k with sup-norm cubes of half-width
/// cap removed around centers; breakpoints are placed dyadically toward each center.
double integrate_sigma_excluding(const std::function<double(std::span<const double>)>& f, int k,
                                 const std::vector<std::vector<double>>& centers, double cap,
                                 double rel_tol = 1e-11);

}  // namespace hardylab
