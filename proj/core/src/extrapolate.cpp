#include "hardylab/extrapolate.hpp"

#include <cmath>
#include <boost/math/tools/roots.hpp>

#include "hardylab/errors.hpp"

namespace hardylab {

std::string to_string(ExtrapolationModel m) {
  switch (m) {
    case ExtrapolationModel::LogResolution: return "log_resolution";
    case ExtrapolationModel::FittedPower: return "fitted_power";
    case ExtrapolationModel::LastLevel: return "last_level";
  }
  return "?";
}

Extrapolation extrapolate_levels(std::span<const int> n_r, std::span<const double> values, double gamma) {
  if (n_r.size() != values.size() || values.empty()) fail(ErrorCode::InvalidConfig, "level/value size mismatch");
  Extrapolation out;
  const std::size_t L = values.size();
  out.value = values[L - 1];
  if (L < 3) {
    if (L == 2) out.error_estimate = std::abs(values[1] - values[0]);
    return out;
  }
  const double m1 = values[L - 3], m2 = values[L - 2], m3 = values[L - 1];
  const double d1 = m2 - m1, d2 = m3 - m2;
  out.error_estimate = std::abs(d2);
  if (d1 == 0.0 || d2 == 0.0 || (d1 > 0) != (d2 > 0)) return out;
  const double ratio = d1 / d2;
  if (!(ratio > 1.0)) return out;

  const double L1 = gamma * std::log(n_r[L - 3]), L2 = gamma * std::log(n_r[L - 2]),
               L3 = gamma * std::log(n_r[L - 1]);
  auto g = [](double x) { return 1.0 / (x * x); };
  auto F = [&](double d) { return (g(L1 + d) - g(L2 + d)) / (g(L2 + d) - g(L3 + d)) - ratio; };
  const double lo = -0.25 * L1, hi = 1e6;
  const double flo = F(lo), fhi = F(hi);
  if ((flo > 0.0) != (fhi > 0.0)) {
    boost::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(F, lo, hi, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(50), iters);
    const double d = 0.5 * (a + b);
    const double c = d1 / (g(L2 + d) - g(L1 + d));
    out.value = m3 - c * g(L3 + d);
    out.model = ExtrapolationModel::LogResolution;
    out.parameter = d;
    out.error_estimate = std::abs(out.value - m3);
    return out;
  }
  // Aitken / Richardson with the fitted order of the doubling sequence
  out.value = m3 - d2 * d2 / (d2 - d1);
  out.model = ExtrapolationModel::FittedPower;
  out.parameter = std::log2(ratio);
  out.error_estimate = std::abs(out.value - m3);
  return out;
}

}  // namespace hardylab
