#include "hardylab/groundstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "adaptive_gk.hpp"
#include "hardylab/criterion.hpp"
#include "hardylab/errors.hpp"

namespace hardylab {

namespace {

constexpr std::array<double, 4> kD2{-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
constexpr std::array<double, 4> kD1{0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};

double sigma_q(const WeightSpec& spec, const FermiPoint& p) { return weight_q(spec, 0.0, p.z); }

}  // namespace

double alpha(const WeightSpec& spec, const FermiPoint& p, const GeometryConfig& cfg, double epsilon) {
  const double rad = 1.0 - (sigma_q(spec, p) - epsilon) + p.r;
  if (rad < 0.0) fail(ErrorCode::NegativeRadicand, "1 - q + rho = " + std::to_string(rad));
  return ((2.0 + cfg.k - cfg.N) / 2.0) * (1.0 - std::sqrt(rad));
}

double eval_v(const WeightSpec& spec, const GroundStateParams& gp, const FermiPoint& p,
              const GeometryConfig& cfg) {
  if (!(p.r > 0.0 && p.r < 1.0)) fail(ErrorCode::OutOfDomain, "rho = " + std::to_string(p.r));
  const double l = std::log(p.r);
  const double al = alpha(spec, p, cfg, gp.epsilon);
  return std::exp(gp.a * std::log(-l) + al * l);
}

double laplacian_fd(const Field& u, const FermiPoint& p, double h, const GeometryConfig& cfg) {
  if (!(h > 0.0) || h > p.r / 4.0) fail(ErrorCode::StepTooLarge, "h must lie in (0, rho/4]");
  const int m = cfg.codim();
  FermiPoint q = p;
  const double u0 = u(p);
  double d2 = kD2[0] * u0, d1 = 0.0;
  for (int i = 1; i <= 3; ++i) {
    q.r = p.r + i * h;
    const double up = u(q);
    q.r = p.r - i * h;
    const double um = u(q);
    d2 += kD2[i] * (up + um);
    d1 += kD1[i] * (up - um);
  }
  q.r = p.r;
  double lap = d2 / (h * h) + (m - 1) / p.r * d1 / h;
  for (int j = 0; j < cfg.k; ++j) {
    double dz = kD2[0] * u0;
    for (int i = 1; i <= 3; ++i) {
      q.z[j] = wrap_unit(p.z[j] + i * h);
      const double up = u(q);
      q.z[j] = wrap_unit(p.z[j] - i * h);
      const double um = u(q);
      dz += kD2[i] * (up + um);
    }
    q.z[j] = p.z[j];
    lap += dz / (h * h);
  }
  return lap;
}

double apply_L(const Field& u, const WeightSpec& spec, double lambda, const FermiPoint& p, double h,
               const GeometryConfig& cfg) {
  const double lap = laplacian_fd(u, p, h, cfg);
  const double r2 = p.r * p.r;
  const double q = weight_q(spec, p.r, p.z), eta = weight_eta(spec, p.r, p.z);
  const double up = u(p);
  return -lap - cfg.hardy_constant() * q / r2 * up + lambda * eta / r2 * up;
}

double apply_L_lambda(const WeightSpec& spec, const GroundStateParams& gp, double lambda,
                      const FermiPoint& p, double h, const GeometryConfig& cfg) {
  Field v = [&](const FermiPoint& x) { return eval_v(spec, gp, x, cfg); };
  return apply_L(v, spec, lambda, p, h, cfg);
}

FdValue apply_L_estimated(const Field& u, const WeightSpec& spec, double lambda, const FermiPoint& p,
                          const GeometryConfig& cfg) {
  const double h = p.r / 16.0;
  const double coarse = apply_L(u, spec, lambda, p, h, cfg);
  const double fine = apply_L(u, spec, lambda, p, h / 2.0, cfg);
  return {coarse, std::abs(coarse - fine)};
}

std::string to_string(LogReading r) {
  switch (r) {
    case LogReading::Folded: return "folded";
    case LogReading::Stated: return "stated";
    case LogReading::TermSum: return "term_sum";
  }
  return "?";
}

ExpansionSchedule ExpansionSchedule::dyadic(int k, int n_positions) {
  ExpansionSchedule s;
  for (int i = 0; i < n_positions; ++i) {
    std::vector<double> z(k);
    for (int j = 0; j < k; ++j) z[j] = wrap_unit((i + 0.5) / n_positions + 0.1 * j);
    s.z_positions.push_back(std::move(z));
  }
  return s;
}

ExpansionCheck expansion_residual(const WeightSpec& spec, const GroundStateParams& gp,
                                  const ExpansionSchedule& schedule, const GeometryConfig& cfg,
                                  LogReading reading) {
  const int m = cfg.codim();
  const double C = cfg.hardy_constant();
  const double a = gp.a;
  ExpansionCheck out;
  out.reading = reading;
  Field v = [&](const FermiPoint& x) { return eval_v(spec, gp, x, cfg); };

  double fit_sum = 0.0;
  int fit_n = 0;
  for (int j = schedule.j_min; j <= schedule.j_max; ++j) {
    const double rho = std::ldexp(1.0, -j);
    const double l = std::log(rho);
    fit_sum = 0.0;
    fit_n = 0;
    for (const auto& z : schedule.z_positions) {
      FermiPoint p{rho, z, {}};
      const double vv = v(p);
      const double h = rho / 16.0;
      const double lap = laplacian_fd(v, p, h, cfg);
      const double lap_fine = laplacian_fd(v, p, h / 2.0, cfg);
      const double q = weight_q(spec, rho, z) - gp.epsilon;
      const double al = alpha(spec, p, cfg, gp.epsilon);
      double c1 = 0.0;
      switch (reading) {
        case LogReading::Folded: c1 = a * (m - 2 + 2.0 * al); break;
        case LogReading::Stated: c1 = m - a; break;
        case LogReading::TermSum: c1 = a * (m - 2); break;
      }
      const double base = lap + C * q / (rho * rho) * vv - a * (a - 1) / (rho * rho * l * l) * vv;
      const double R = base - c1 / (rho * rho * l) * vv;
      ExpansionSample s;
      s.rho = rho;
      s.z = z;
      s.residual = R;
      s.fd_error = std::abs(lap - lap_fine);
      s.scaled_residual = std::abs(R) * std::pow(rho, 1.5) / (std::abs(l) * vv);
      s.log_coefficient = base * rho * rho * l / vv;
      s.dropped = s.fd_error >= std::abs(R);
      if (s.dropped) ++out.dropped;
      else out.max_scaled_residual = std::max(out.max_scaled_residual, s.scaled_residual);
      fit_sum += s.log_coefficient;
      ++fit_n;
      out.samples.push_back(std::move(s));
    }
  }
  out.fitted_log_coefficient = fit_n ? fit_sum / fit_n : 0.0;

  double folded = 0.0;
  for (const auto& z : schedule.z_positions) {
    FermiPoint p{0.0, z, {}};
    folded += a * (m - 2 + 2.0 * alpha(spec, p, cfg, gp.epsilon));
  }
  out.folded_coefficient = schedule.z_positions.empty() ? 0.0 : folded / schedule.z_positions.size();
  out.stated_coefficient = m - a;
  out.termsum_coefficient = a * (m - 2);
  const double df = std::abs(out.fitted_log_coefficient - out.folded_coefficient);
  const double ds = std::abs(out.fitted_log_coefficient - out.stated_coefficient);
  const double dt = std::abs(out.fitted_log_coefficient - out.termsum_coefficient);
  out.nearest_reading = LogReading::Folded;
  if (ds < df && ds < dt) out.nearest_reading = LogReading::Stated;
  else if (dt < df && dt <= ds) out.nearest_reading = LogReading::TermSum;

  // log(|R| rho^2 / v) against log rho
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& s : out.samples) {
    if (s.dropped || s.residual == 0.0) continue;
    FermiPoint p{s.rho, s.z, {}};
    const double x = std::log(s.rho);
    const double y = std::log(std::abs(s.residual) * s.rho * s.rho / v(p));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2) {
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.intercept = (sy - out.slope * sx) / n;
  }
  return out;
}

double quartile_growth(const ExpansionCheck& check) {
  std::vector<double> per_radius;
  double cur_rho = -1.0;
  for (const auto& s : check.samples) {
    if (s.rho != cur_rho) {
      per_radius.push_back(0.0);
      cur_rho = s.rho;
    }
    if (!s.dropped) per_radius.back() = std::max(per_radius.back(), s.scaled_residual);
  }
  const std::size_t n = per_radius.size();
  const std::size_t q = std::max<std::size_t>(1, n / 4);
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    first += per_radius[i];
    last += per_radius[n - 1 - i];
  }
  return first > 0.0 ? last / first : (last > 0.0 ? INFINITY : 1.0);
}

std::string to_string(BarrierKind k) {
  return k == BarrierKind::SubsolutionVeps ? "SubsolutionVeps" : "SupersolutionU";
}

BarrierSchedule BarrierSchedule::log_spaced(const GeometryConfig& cfg, double rho_min, int per_decade) {
  BarrierSchedule s;
  for (int i = 0;; ++i) {
    const double r = rho_min * std::pow(10.0, static_cast<double>(i) / per_decade);
    if (r >= cfg.R) break;
    s.radii.push_back(r);
  }
  const int n = cfg.n_z;
  std::size_t total = 1;
  for (int j = 0; j < cfg.k; ++j) total *= n;
  for (std::size_t i = 0; i < total; ++i) {
    std::vector<double> z(cfg.k);
    std::size_t rem = i;
    for (int j = cfg.k - 1; j >= 0; --j) {
      z[j] = static_cast<double>(rem % n) / n;
      rem /= n;
    }
    s.z_positions.push_back(std::move(z));
  }
  return s;
}

BarrierReport barrier_check(BarrierKind kind, const WeightSpec& spec, double lambda, double epsilon,
                            const BarrierSchedule& schedule, const GeometryConfig& cfg) {
  BarrierReport rep;
  rep.kind = kind;
  rep.lambda = lambda;
  rep.epsilon = kind == BarrierKind::SubsolutionVeps ? epsilon : 0.0;
  const GroundStateParams g0{0.0, rep.epsilon}, gm1{-1.0, 0.0};
  Field w;
  if (kind == BarrierKind::SubsolutionVeps)
    w = [&](const FermiPoint& x) { return eval_v(spec, g0, x, cfg); };
  else
    w = [&](const FermiPoint& x) { return eval_v(spec, g0, x, cfg) - eval_v(spec, gm1, x, cfg); };

  bool all_ok_so_far = true;
  double worst_in = -INFINITY, worst_first = -INFINITY;
  for (double rho : schedule.radii) {
    bool radius_ok = true;
    double worst_here = -INFINITY;
    for (const auto& z : schedule.z_positions) {
      FermiPoint p{rho, z, {}};
      const double wv = w(p);
      const FdValue L = apply_L_estimated(w, spec, lambda, p, cfg);
      // roundoff floor of the sixth-order stencil at step rho/16
      const double tol = L.fd_error + 1e-12 * std::abs(wv) / (rho * rho);
      BarrierSample s;
      s.rho = rho;
      s.z = z;
      s.value = L.value;
      s.fd_error = L.fd_error;
      s.scaled = L.value * rho * rho / wv;
      if (kind == BarrierKind::SubsolutionVeps) {
        s.ok = L.value <= tol;
        worst_here = std::max(worst_here, s.scaled);
      } else {
        const bool pos = wv > 0.0;
        rep.positivity_ok = rep.positivity_ok && pos;
        s.ok = L.value >= -tol && pos;
        worst_here = std::max(worst_here, -s.scaled);
      }
      radius_ok = radius_ok && s.ok;
      rep.samples.push_back(std::move(s));
    }
    if (rho == schedule.radii.front()) worst_first = worst_here;
    if (all_ok_so_far && radius_ok) {
      rep.r_valid = rho;
      worst_in = std::max(worst_in, worst_here);
    } else {
      all_ok_so_far = false;
    }
  }
  rep.worst_violation = rep.r_valid > 0.0 ? worst_in : worst_first;
  return rep;
}

BarrierIntegral barrier_integral_bound(const WeightSpec& spec, double r, double cap,
                                       const GeometryConfig& cfg) {
  const int m = cfg.codim();
  const double omega = sphere_area(m);
  std::vector<std::vector<double>> centers = spec.maximizers;
  if (centers.empty()) centers = {std::vector<double>(spec.k, 0.0)};

  auto inner = [&](std::span<const double> z) {
    const double delta = std::max(deficit(spec, z), 0.0);
    const double c0 = (m - 2) * std::sqrt(delta);
    const double rs = std::min(r, 1e-3 * std::max(delta, 1e-300));
    // rho < rs: exponent frozen at its rho = 0 value
    const double tail = c0 > 0.0 ? std::exp(c0 * std::log(rs)) / c0 : INFINITY;
    auto g = [&](double t) {
      const double rho = std::exp(t);
      return std::exp((m - 2) * std::sqrt(delta + rho) * t);
    };
    const double body = rs < r ? detail::adaptive_gk(g, std::log(rs), std::log(r), 1e-10, 15) : 0.0;
    return omega * (tail + body);
  };
  auto rhs_f = [&](std::span<const double> z) {
    const double d = deficit(spec, z);
    return d > 0.0 ? 1.0 / std::sqrt(d) : INFINITY;
  };
  BarrierIntegral out;
  out.lhs = integrate_sigma_excluding(inner, spec.k, centers, cap, 1e-9);
  out.rhs = integrate_sigma_excluding(rhs_f, spec.k, centers, cap, 1e-11);
  return out;
}

}  // namespace hardylab
