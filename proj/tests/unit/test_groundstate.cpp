#include <hardylab/groundstate.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "helpers.hpp"

using namespace hardylab;

namespace {
// values from tests/oracles/gen_expected.py (60 digits)
constexpr double kVaM1 = 0.73059136554751396;
constexpr double kLapV001 = -88.047937857349743;
constexpr double kLapV0001 = -63250.08285196244;
constexpr double kL1VN5 = -1096.6193832291484;
constexpr double kL0VMax = 283183.24070964511;

Grid& grid5() {
  static Grid g(geom(5, 1, 0.25, 32, 8));
  return g;
}
}  // namespace

TEST(GroundState, AlphaExamples) {
  const WeightSpec q1 = make_constant(1.0), q75 = make_constant(0.75);
  EXPECT_DOUBLE_EQ(alpha(q1, pt(0.0, {0.0}), geom(5, 1, 0.25, 8, 8)), -1.0);
  EXPECT_DOUBLE_EQ(alpha(q75, pt(0.0, {0.0}), geom(4, 1, 0.25, 8, 8)), -0.25);
  EXPECT_NEAR(alpha(q1, pt(0.04, {0.0}), geom(5, 1, 0.25, 8, 8)), -0.8, 1e-15);
  // epsilon lowers q
  EXPECT_NEAR(alpha(q1, pt(0.0, {0.0}), geom(5, 1, 0.25, 8, 8), 0.19), -(1.0 - std::sqrt(0.19)), 1e-15);
}

TEST(GroundState, NegativeRadicand) {
  EXPECT_HL_ERROR(alpha(make_constant(1.0), pt(0.1, {0.0}), geom(5, 1, 0.25, 8, 8), -0.5), NegativeRadicand);
}

TEST(GroundState, EvalV) {
  const GeometryConfig g3 = geom(3, 1, 0.25, 8, 8);
  EXPECT_NEAR(eval_v(make_constant(1.0), {1.0, 0.0}, pt(std::exp(-1.0), {0.2}), g3), 1.0, 1e-15);
  const GeometryConfig g4 = geom(4, 1, 0.25, 8, 8);
  const WeightSpec q75 = make_constant(0.75);
  const double rho = std::exp(-2.0);
  EXPECT_NEAR(eval_v(q75, {-1.0, 0.0}, pt(rho, {0.5}), g4), kVaM1, 1e-14);
  // independent 100-digit evaluation
  using boost::multiprecision::cpp_bin_float_100;
  const cpp_bin_float_100 r = exp(cpp_bin_float_100(-2));
  const cpp_bin_float_100 al = cpp_bin_float_100(-0.5) * (1 - sqrt(cpp_bin_float_100(0.25) + r));
  const cpp_bin_float_100 v = pow(-log(r), -1) * pow(r, al);
  EXPECT_NEAR(eval_v(q75, {-1.0, 0.0}, pt(rho, {0.5}), g4), static_cast<double>(v), 1e-14);
  // a = 0 reduces to rho^alpha
  const double a0 = alpha(q75, pt(0.01, {0.0}), g4);
  EXPECT_NEAR(eval_v(q75, {0.0, 0.0}, pt(0.01, {0.0}), g4), std::pow(0.01, a0), 1e-14);
}

TEST(GroundState, Multiplicativity) {
  const GeometryConfig g = geom(5, 1, 0.25, 8, 8);
  const WeightSpec s = validate_and_normalize(make_sin_family(0.5, 0.75, {0.1}), grid5());
  for (double r : {1e-5, 1e-3, 0.1})
    for (double z : {0.1, 0.4}) {
      const double v0 = eval_v(s, {0.0, 0.0}, pt(r, {z}), g);
      for (double a : {-1.0, 0.5, 2.0})
        EXPECT_NEAR(eval_v(s, {a, 0.0}, pt(r, {z}), g) / v0, std::pow(-std::log(r), a), 1e-12 * std::pow(-std::log(r), a));
    }
}

TEST(GroundState, OutOfDomain) {
  const GeometryConfig g = geom(5, 1, 0.25, 8, 8);
  EXPECT_HL_ERROR(eval_v(make_constant(1.0), {}, pt(0.0, {0.0}), g), OutOfDomain);
  EXPECT_HL_ERROR(eval_v(make_constant(1.0), {}, pt(1.0, {0.0}), g), OutOfDomain);
}

TEST(GroundState, ConstantField) {
  const GeometryConfig g = geom(5, 1, 0.25, 8, 8);
  const WeightSpec s = validate_and_normalize(make_constant(1.0), grid5());
  Field one = [](const FermiPoint&) { return 1.0; };
  for (double r : {1e-4, 0.01, 0.2}) {
    EXPECT_NEAR(laplacian_fd(one, pt(r, {0.3}), r / 16, g), 0.0, 1e-6 / (r * r));
    EXPECT_NEAR(apply_L(one, s, 0.0, pt(r, {0.3}), r / 16, g), -1.0 / (r * r), 1e-9 / (r * r));
  }
}

TEST(GroundState, StepTooLarge) {
  Field one = [](const FermiPoint&) { return 1.0; };
  EXPECT_HL_ERROR(laplacian_fd(one, pt(0.1, {0.0}), 0.03, geom(5, 1, 0.25, 8, 8)), StepTooLarge);
  EXPECT_HL_ERROR(laplacian_fd(one, pt(0.1, {0.0}), 0.0, geom(5, 1, 0.25, 8, 8)), StepTooLarge);
}

TEST(GroundState, LambdaAffine) {
  const GeometryConfig g = geom(5, 1, 0.25, 8, 8);
  const WeightSpec s = validate_and_normalize(make_sin_family(0.5, 1.5, {0.0}), grid5());
  const GroundStateParams gp{-1.0, 0.1};
  for (double r : {1e-4, 1e-2}) {
    const FermiPoint p = pt(r, {0.3});
    const double l1 = apply_L_lambda(s, gp, 1.0, p, r / 16, g);
    const double l2 = apply_L_lambda(s, gp, 5.0, p, r / 16, g);
    const double expect = 4.0 * weight_eta(s, r, p.z) / (r * r) * eval_v(s, gp, p, g);
    const double scale = std::abs(l1) + std::abs(l2) + std::abs(expect);
    EXPECT_NEAR(l2 - l1, expect, 1e-12 * scale);
  }
}

TEST(GroundState, LaplacianMatchesOracle) {
  const GeometryConfig g = geom(4, 1, 0.25, 8, 8);
  const WeightSpec q75 = make_constant(0.75);
  Field v = [&](const FermiPoint& x) { return eval_v(q75, {-1.0, 0.0}, x, g); };
  // sixth order: halving h cuts the error by ~64
  for (auto [r, exact] : {std::pair{0.01, kLapV001}, std::pair{0.001, kLapV0001}}) {
    const double e16 = std::abs(laplacian_fd(v, pt(r, {0.0}), r / 16, g) / exact - 1.0);
    const double e32 = std::abs(laplacian_fd(v, pt(r, {0.0}), r / 32, g) / exact - 1.0);
    EXPECT_LT(e16, 2e-6) << r;
    EXPECT_LT(e32, e16 / 20) << r;
  }
}

TEST(GroundState, OperatorMatchesOracle) {
  const GeometryConfig g = geom(5, 1, 0.25, 8, 8);
  const WeightSpec s = validate_and_normalize(make_constant(1.0), grid5());
  // L cancels terms of size rho^-2 v, so compare on that scale
  const double scale = eval_v(s, {}, pt(0.01, {0.0}), g) / (0.01 * 0.01);
  EXPECT_NEAR(apply_L_lambda(s, {0.0, 0.0}, 1.0, pt(0.01, {0.0}), 0.01 / 16, g), kL1VN5, 1e-5 * scale);
  EXPECT_NEAR(apply_L_lambda(s, {0.0, 0.0}, 1.0, pt(0.01, {0.0}), 0.01 / 64, g), kL1VN5, 1e-8 * scale);
}

TEST(GroundState, SignAtMaximizer) {
  // q = 1, a = 0: the rho dependence of alpha leaves a positive leading term
  const GeometryConfig g = geom(4, 1, 0.25, 8, 8);
  const WeightSpec s = make_constant(1.0);
  const double L = apply_L_lambda(s, {0.0, 0.0}, 0.0, pt(1e-3, {0.0}), 1e-3 / 16, g);
  EXPECT_GT(L, 0.0);
  EXPECT_NEAR(L / kL0VMax, 1.0, 1e-4);
}

TEST(GroundState, ExpansionConstantQ) {
  const GeometryConfig g = geom(5, 1, 0.25, 64, 16);
  const auto sched = ExpansionSchedule::dyadic(1, 8);
  for (double a : {0.0, -1.0, 0.5}) {
    const ExpansionCheck c = expansion_residual(make_constant(0.75), {a, 0.0}, sched, g);
    EXPECT_EQ(c.samples.size(), 17u * 8u);
    for (std::size_t i = 1; i < c.samples.size(); ++i) EXPECT_LE(c.samples[i].rho, c.samples[i - 1].rho);
    EXPECT_LE(quartile_growth(c), 2.0) << "a=" << a;
    // residual at least rho^(1/2) below the rho^-2 v scale
    EXPECT_GE(c.slope, 0.5 - 0.2) << "a=" << a;
    EXPECT_EQ(c.nearest_reading, LogReading::Folded);
    EXPECT_NEAR(c.fitted_log_coefficient, c.folded_coefficient, 0.01);
  }
}

TEST(GroundState, ExpansionLogTermsBookkeeping) {
  // a(a-1) vanishes at a = 0 and a = 1; the folded coefficient is a (N-k-2+2 alpha(sigma,0))
  const GeometryConfig g = geom(5, 1, 0.25, 64, 16);
  const auto sched = ExpansionSchedule::dyadic(1, 8);
  const ExpansionCheck c0 = expansion_residual(make_constant(0.75), {0.0, 0.0}, sched, g);
  EXPECT_EQ(c0.folded_coefficient, 0.0);
  EXPECT_EQ(c0.termsum_coefficient, 0.0);
  const ExpansionCheck c1 = expansion_residual(make_constant(0.75), {1.0, 0.0}, sched, g);
  const double al = alpha(make_constant(0.75), pt(0.0, {0.0}), g);
  EXPECT_NEAR(c1.folded_coefficient, 4.0 - 2.0 + 2.0 * al, 1e-14);
  EXPECT_NEAR(c1.stated_coefficient, 3.0, 1e-14);
}

TEST(GroundState, BarrierRegression) {
  const GeometryConfig g = geom(4, 1, 0.25, 64, 16);
  const Grid grid(g);
  const WeightSpec w = validate_and_normalize(make_sin_family(0.5, 1.5, {0.0}), grid);
  const auto sched = BarrierSchedule::log_spaced(g, 1e-6, 8);
  // recorded values; the eps = 0 subsolution fails at the smallest radius near z0
  EXPECT_EQ(barrier_check(BarrierKind::SubsolutionVeps, w, 1.0, 0.0, sched, g).r_valid, 0.0);
  EXPECT_NEAR(barrier_check(BarrierKind::SubsolutionVeps, w, 1.0, 0.1, sched, g).r_valid, 0.0074989420933245579, 1e-12);
  EXPECT_NEAR(barrier_check(BarrierKind::SubsolutionVeps, w, 1.0, 0.5, sched, g).r_valid, 0.1, 1e-12);
  const auto u = barrier_check(BarrierKind::SupersolutionU, w, 1.0, 0.0, sched, g);
  EXPECT_TRUE(u.positivity_ok);
  EXPECT_NEAR(u.r_valid, 0.23713737056616552, 1e-12);
}

TEST(GroundState, BarrierRadiusShrinksWithLambda) {
  const GeometryConfig g = geom(4, 1, 0.25, 64, 16);
  const Grid grid(g);
  const WeightSpec w = validate_and_normalize(make_sin_family(0.5, 1.5, {0.0}), grid);
  const auto sched = BarrierSchedule::log_spaced(g, 1e-6, 8);
  for (double eps : {0.1, 0.5}) {
    double prev = INFINITY;
    for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
      const double r = barrier_check(BarrierKind::SubsolutionVeps, w, lambda, eps, sched, g).r_valid;
      EXPECT_LE(r, prev) << "eps=" << eps << " lambda=" << lambda;
      prev = r;
    }
  }
}

TEST(GroundState, UPositiveBelowInverseE) {
  const GeometryConfig g = geom(4, 1, 0.25, 8, 8);
  const WeightSpec s = make_constant(0.9);
  for (double r : {1e-6, 1e-3, 0.1, 0.3}) {
    const double v0 = eval_v(s, {0.0, 0.0}, pt(r, {0.0}), g);
    const double vm = eval_v(s, {-1.0, 0.0}, pt(r, {0.0}), g);
    EXPECT_GT(v0 - vm, 0.0);
  }
}

TEST(GroundState, BarrierIntegralConstantQ) {
  const GeometryConfig g = geom(5, 1, 0.25, 8, 8);
  for (double A : {0.25, 0.5, 0.9})
    EXPECT_NEAR(barrier_integral_bound(make_constant(1.0 - A), 0.1, 0.0, g).rhs, 1.0 / std::sqrt(A), 1e-12);
}
