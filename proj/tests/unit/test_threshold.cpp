#include <hardylab/threshold.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace hardylab;

namespace {
// b = q = 1, eta = rho^2, free tube: -kappa^2 / R^2 with kappa I1/I0 = (m-2)/2 (tests/oracles)
constexpr double kLambdaStarN5 = -41.385005746849438;

ThresholdOptions ladder(int n0) {
  ThresholdOptions o;
  o.levels = {n0, 2 * n0, 4 * n0};
  return o;
}
}  // namespace

TEST(Threshold, CorollarySetupNearClosedForm) {
  const GeometryConfig g = geom(5, 1, 0.25, 64, 4);
  const ThresholdResult t = find_lambda_star(g, make_constant(1.0), ladder(1024));
  EXPECT_LE(t.hi - t.lo, 0.1);
  EXPECT_FALSE(t.predicate_lo);
  EXPECT_TRUE(t.predicate_hi);
  EXPECT_GT(t.gap_tolerance, 0.0);
  // the safety gap can only delay the detected crossing
  EXPECT_GE(t.lambda_star, kLambdaStarN5 - 0.1);
  EXPECT_LT(std::abs(t.lambda_star / kLambdaStarN5 - 1.0), 0.02);
}

TEST(Threshold, PredicateMonotoneOnProbes) {
  const GeometryConfig g = geom(5, 1, 0.25, 64, 4);
  const ThresholdResult t = find_lambda_star(g, make_sin_family(0.5, 0.5, {0.0}), ladder(128));
  ASSERT_GE(t.probes.size(), 3u);
  for (std::size_t i = 1; i < t.probes.size(); ++i) {
    EXPECT_LT(t.probes[i - 1].lambda, t.probes[i].lambda);
    if (t.probes[i - 1].below) EXPECT_TRUE(t.probes[i].below) << t.probes[i].lambda;
  }
  EXPECT_LE(t.hi - t.lo, 0.1);
  EXPECT_LE(t.lo, t.lambda_star);
  EXPECT_GE(t.hi, t.lambda_star);
}

TEST(Threshold, EtaScaling) {
  const GeometryConfig g = geom(5, 1, 0.25, 64, 4);
  ThresholdOptions o = ladder(256);
  o.gap = 0.0067;
  const double base = find_lambda_star(g, make_constant(1.0), o).lambda_star;
  for (double c : {2.0, 0.5}) {
    WeightSpec w = make_constant(1.0);
    w.eta_scale = c;
    // bisection tolerance scales with the bracket, not with c
    EXPECT_NEAR(find_lambda_star(g, w, o).lambda_star, base / c, o.tol_lambda) << c;
  }
}

TEST(Threshold, NoBracket) {
  ThresholdOptions o = ladder(64);
  o.gap = 0.01;
  o.lambda_limit = 10.0;
  EXPECT_HL_ERROR(find_lambda_star(geom(5, 1, 0.25, 64, 4), make_constant(1.0), o), NoBracket);
}

TEST(Threshold, CalibrationNearConstant) {
  double mu = 0.0;
  const double gap = calibrate_gap(geom(5, 1, 0.25, 64, 4), ladder(256), &mu);
  EXPECT_NEAR(gap, 3.0 * std::abs(mu - 1.0), 1e-15);
  EXPECT_LT(std::abs(mu - 1.0), 0.02);
}

TEST(Attainment, Classifier) {
  // stabilized series
  EXPECT_EQ(classify_attainment({10.0, 10.5, 10.6}, {0.2, 0.21, 0.21}), AttainmentVerdict::BoundedMinimizer);
  // growing rho^-1 norm and growing concentration
  EXPECT_EQ(classify_attainment({10.0, 14.0, 20.0}, {0.3, 0.5, 0.7}), AttainmentVerdict::ConcentratingSequence);
  // growing norm, mass draining away from Sigma
  EXPECT_EQ(classify_attainment({10.0, 14.0, 20.0}, {0.5, 0.4, 0.3}), AttainmentVerdict::Inconclusive);
  // settled norm, mass still moving
  EXPECT_EQ(classify_attainment({10.0, 10.0, 10.0}, {0.1, 0.2, 0.4}), AttainmentVerdict::Inconclusive);
}

TEST(Attainment, ZeroEtaIndependentOfLambda) {
  WeightSpec w = make_sin_family(0.5, 1.5, {0.0});
  w.eta_scale = 0.0;
  const GeometryConfig g = geom(5, 1, 0.25, 64, 4);
  const LevelLadder L(g, w, {64, 256, 1024});
  const AttainmentDiagnostic a = attainment_diagnostic(L, -50.0), b = attainment_diagnostic(L, 50.0);
  EXPECT_EQ(a.verdict, b.verdict);
  for (std::size_t i = 0; i < a.mu.size(); ++i) EXPECT_NEAR(a.mu[i], b.mu[i], 1e-9);
}

TEST(Attainment, SupercriticalIsBounded) {
  const GeometryConfig g = geom(5, 1, 0.25, 64, 4);
  const AttainmentDiagnostic d = attainment_diagnostic(g, make_constant(1.0), -30.0, kDiagnosticLevels);
  EXPECT_EQ(d.verdict, AttainmentVerdict::BoundedMinimizer);
  EXPECT_EQ(d.levels, kDiagnosticLevels);
  for (double m : d.mass_ratio_series) {
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
  }
}
