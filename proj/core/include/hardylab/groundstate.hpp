#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hardylab/geometry.hpp"
#include "hardylab/weights.hpp"

namespace hardylab {

/// v_{a,q-eps} = (-log rho)^a rho^alpha.
struct GroundStateParams {
  double a = 0.0;
  double epsilon = 0.0;
};

/// alpha = ((2+k-N)/2) (1 - sqrt(1 - (q(sigma) - eps) + rho)). NegativeRadicand if < 0.
double alpha(const WeightSpec& spec, const FermiPoint& p, const GeometryConfig& cfg, double epsilon = 0.0);

/// OutOfDomain unless 0 < rho < 1.
double eval_v(const WeightSpec& spec, const GroundStateParams& gp, const FermiPoint& p,
              const GeometryConfig& cfg);

using Field = std::function<double(const FermiPoint&)>;

/// Flat Laplacian of a y-radial field: u_rr + (m-1)/r u_r + sum_j u_{z_j z_j},
/// sixth-order centered differences with step h. StepTooLarge if h > rho/4.
double laplacian_fd(const Field& u, const FermiPoint& p, double h, const GeometryConfig& cfg);

/// L u = -Lap u - C q rho^-2 u + lambda eta rho^-2 u.
double apply_L(const Field& u, const WeightSpec& spec, double lambda, const FermiPoint& p, double h,
               const GeometryConfig& cfg);

double apply_L_lambda(const WeightSpec& spec, const GroundStateParams& gp, double lambda,
                      const FermiPoint& p, double h, const GeometryConfig& cfg);

struct FdValue {
  double value;     // step h
  double fd_error;  // |L_h - L_{h/2}|
};

/// Default step rho/16 plus a step-halving error estimate.
FdValue apply_L_estimated(const Field& u, const WeightSpec& spec, double lambda, const FermiPoint& p,
                          const GeometryConfig& cfg);

// --- expansion residual -------------------------------------------------

enum class LogReading { Folded, Stated, TermSum };
std::string to_string(LogReading r);

struct ExpansionSchedule {
  int j_min = 4;
  int j_max = 20;
  std::vector<std::vector<double>> z_positions;  // >= 8 tangential positions

  static ExpansionSchedule dyadic(int k, int n_positions = 8);
};

struct ExpansionSample {
  double rho;
  std::vector<double> z;
  double residual;
  double scaled_residual;
  double fd_error;
  double log_coefficient;  // empirical (log rho)^-1 coefficient
  bool dropped;            // FD noise above the residual magnitude
};

struct ExpansionCheck {
  std::vector<ExpansionSample> samples;  // decreasing rho
  double slope = 0.0;
  double intercept = 0.0;
  double max_scaled_residual = 0.0;
  int dropped = 0;
  LogReading reading = LogReading::Folded;
  double fitted_log_coefficient = 0.0;  // at the smallest rho, averaged over z
  double folded_coefficient = 0.0;      // a (N-k-2+2 alpha(sigma, 0))
  double stated_coefficient = 0.0;      // N-k-a
  double termsum_coefficient = 0.0;     // a (N-k-2)
  LogReading nearest_reading = LogReading::Folded;
};

/// R = Lap v + C q rho^-2 v - a(a-1) rho^-2 log^-2 v - c1 rho^-2 log^-1 v
/// with c1 chosen by the reading.
ExpansionCheck expansion_residual(const WeightSpec& spec, const GroundStateParams& gp,
                                  const ExpansionSchedule& schedule, const GeometryConfig& cfg,
                                  LogReading reading = LogReading::Folded);

/// Mean of the last quartile over the mean of the first quartile of the
/// per-radius maximum scaled residual.
double quartile_growth(const ExpansionCheck& check);

// --- barriers -----------------------------------------------------------

enum class BarrierKind { SubsolutionVeps, SupersolutionU };
std::string to_string(BarrierKind k);

struct BarrierSample {
  double rho;
  std::vector<double> z;
  double value;     // L applied to the barrier
  double fd_error;
  double scaled;    // value * rho^2 / barrier
  bool ok;
};

struct BarrierReport {
  BarrierKind kind = BarrierKind::SubsolutionVeps;
  double lambda = 0.0;
  double epsilon = 0.0;
  double r_valid = 0.0;          // 0 when the smallest radius already fails
  double worst_violation = 0.0;  // max scaled sign defect on (0, r_valid]
  bool positivity_ok = true;     // U only
  std::vector<BarrierSample> samples;
};

struct BarrierSchedule {
  std::vector<double> radii;                     // ascending
  std::vector<std::vector<double>> z_positions;

  /// Log-spaced radii in (rho_min, R), per_decade points; tangential grid positions j/n_z.
  static BarrierSchedule log_spaced(const GeometryConfig& cfg, double rho_min = 1e-6, int per_decade = 8);
};

BarrierReport barrier_check(BarrierKind kind, const WeightSpec& spec, double lambda, double epsilon,
                            const BarrierSchedule& schedule, const GeometryConfig& cfg);

/// Both sides of int_{Sigma_r} V_0^2 rho^-2 >= C int_Sigma (1-q)^-1/2, with caps
/// of radius cap_radius removed around the maximizers (cap_radius 0: none).
struct BarrierIntegral {
  double lhs;
  double rhs;
};
BarrierIntegral barrier_integral_bound(const WeightSpec& spec, double r, double cap_radius,
                                       const GeometryConfig& cfg);

}  // namespace hardylab
