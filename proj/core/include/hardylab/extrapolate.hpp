#pragma once

#include <span>
#include <string>

namespace hardylab {

enum class ExtrapolationModel { LogResolution, FittedPower, LastLevel };
std::string to_string(ExtrapolationModel m);

struct Extrapolation {
  double value = 0.0;
  double error_estimate = 0.0;  // |value - finest level|
  ExtrapolationModel model = ExtrapolationModel::LastLevel;
  double parameter = 0.0;       // d (log model) or fitted order (power model)
};

/// Three or more levels of radial refinement n_r with grading gamma; the last
/// three are used. Log model: mu(n) = mu_inf + c / (gamma ln n + d)^2, accepted
/// when the fitted offset keeps gamma ln n_1 + d >= 3/4 gamma ln n_1; otherwise
/// Aitken with fitted order; otherwise the finest level.
Extrapolation extrapolate_levels(std::span<const int> n_r, std::span<const double> values, double gamma);

}  // namespace hardylab
