#pragma once

#include <span>
#include <string>
#include <vector>

#include "hardylab/expr.hpp"
#include "hardylab/geometry.hpp"

namespace hardylab {

enum class Family { Constant, SinPower, Custom };
enum class EtaKind { Rho, RhoSquared, RhoTimesProfile, Custom };

std::string to_string(Family f);
std::string to_string(EtaKind e);

/// Weight triple (b, q, eta). Raw q is kept; normalization stores the factor
/// that brings max over Sigma of q/b to 1.
struct WeightSpec {
  Family family = Family::Constant;
  int k = 1;
  double q0 = 1.0;             // Constant family
  double A = 0.5;              // SinPower amplitude, in (0,1)
  double beta = 1.0;           // SinPower contact exponent
  std::vector<double> z0;      // SinPower maximizer, size k
  std::vector<double> b_profile{1.0};  // b(z) = c0 + sum_axes sum_j c_j cos(2 pi j z_axis)
  EtaKind eta_kind = EtaKind::RhoSquared;
  double eta_scale = 1.0;
  double q_scale = 1.0;        // multiplies raw q before normalization
  Expr custom_q, custom_b, custom_eta, eta_profile;

  bool normalized = false;
  double q_factor = 1.0;       // q = q_scale * raw / max(q_scale * raw / b)
  std::vector<std::vector<double>> maximizers;
  bool continuum_maximizers = false;
  std::vector<std::string> warnings;

  /// True when b is constant and q/b has a closed-form maximum.
  bool analytic() const;
};

struct WeightValues {
  double b;
  double q;
  double eta;
};

WeightSpec make_constant(double q0, double b0 = 1.0, EtaKind eta = EtaKind::RhoSquared, int k = 1);
/// q = prod_axes (1 - A |sin(pi (z - z0))|^(2 beta)). BadParams unless A in (0,1), beta > 0.
WeightSpec make_sin_family(double A, double beta, std::vector<double> z0,
                           EtaKind eta = EtaKind::RhoSquared);
WeightSpec make_custom(const std::string& q_expr, const std::string& b_expr, int k,
                       EtaKind eta = EtaKind::RhoSquared);

/// Normalized evaluation; NotNormalized otherwise.
WeightValues eval_weights(const WeightSpec& spec, const FermiPoint& p);

// Unchecked pieces (current q_factor applied).
double weight_b(const WeightSpec& spec, double r, std::span<const double> z);
double weight_q(const WeightSpec& spec, double r, std::span<const double> z);
double weight_eta(const WeightSpec& spec, double r, std::span<const double> z);
/// eta = rho^e * g: exponent e of the radial power that is integrated exactly.
int eta_power(const WeightSpec& spec);
/// g = eta / rho^e evaluated without the singular factor where possible.
double eta_coefficient(const WeightSpec& spec, double r, std::span<const double> z);
/// q/b on Sigma.
double ratio_on_sigma(const WeightSpec& spec, std::span<const double> z);
/// 1 - q/b on Sigma, cancellation-free for the analytic families.
double deficit(const WeightSpec& spec, std::span<const double> z);

/// Tangential samples per axis for the Sigma sweep.
int sigma_samples_per_axis(int k);

struct SigmaMaxima {
  double max_ratio;
  std::vector<std::vector<double>> points;
  bool continuum;
};
/// Local maxima of q/b on Sigma within 1e-8 of the global maximum: dense
/// sampling, then golden-section refinement of -(1 - q/b).
SigmaMaxima scan_sigma_maxima(const WeightSpec& spec);

WeightSpec validate_and_normalize(const WeightSpec& spec, const Grid& grid);

}  // namespace hardylab
