#include "hardylab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hardylab/errors.hpp"

namespace hardylab {

std::string to_string(Family f) {
  switch (f) {
    case Family::Constant: return "constant";
    case Family::SinPower: return "sin_power";
    case Family::Custom: return "custom";
  }
  return "?";
}

std::string to_string(EtaKind e) {
  switch (e) {
    case EtaKind::Rho: return "rho";
    case EtaKind::RhoSquared: return "rho_squared";
    case EtaKind::RhoTimesProfile: return "rho_times_profile";
    case EtaKind::Custom: return "custom";
  }
  return "?";
}

bool WeightSpec::analytic() const {
  const bool b_const = custom_b.empty() && b_profile.size() == 1;
  return b_const && (family == Family::Constant || family == Family::SinPower);
}

WeightSpec make_constant(double q0, double b0, EtaKind eta, int k) {
  WeightSpec s;
  s.family = Family::Constant;
  s.k = k;
  s.q0 = q0;
  s.b_profile = {b0};
  s.eta_kind = eta;
  return s;
}

WeightSpec make_sin_family(double A, double beta, std::vector<double> z0, EtaKind eta) {
  if (!(A > 0.0 && A < 1.0)) fail(ErrorCode::BadParams, "A must lie in (0,1) so that q > 0");
  if (!(beta > 0.0)) fail(ErrorCode::BadParams, "beta must be positive");
  if (z0.empty()) fail(ErrorCode::BadParams, "z0 needs one entry per tangential axis");
  WeightSpec s;
  s.family = Family::SinPower;
  s.k = static_cast<int>(z0.size());
  s.A = A;
  s.beta = beta;
  s.z0 = std::move(z0);
  s.eta_kind = eta;
  return s;
}

WeightSpec make_custom(const std::string& q_expr, const std::string& b_expr, int k, EtaKind eta) {
  WeightSpec s;
  s.family = Family::Custom;
  s.k = k;
  s.custom_q = Expr::parse(q_expr, k);
  if (!b_expr.empty()) s.custom_b = Expr::parse(b_expr, k);
  s.eta_kind = eta;
  return s;
}

namespace {

double sin_term(const WeightSpec& s, double z, double z0) {
  return std::pow(std::abs(std::sin(std::numbers::pi * (z - z0))), 2.0 * s.beta);
}

std::vector<double> vars_of(double r, std::span<const double> z) {
  std::vector<double> v(z.size() + 1);
  v[0] = r;
  std::copy(z.begin(), z.end(), v.begin() + 1);
  return v;
}

double raw_q(const WeightSpec& s, double r, std::span<const double> z) {
  switch (s.family) {
    case Family::Constant: return s.q0;
    case Family::SinPower: {
      double q = 1.0;
      for (int j = 0; j < s.k; ++j) q *= 1.0 - s.A * sin_term(s, z[j], s.z0[j]);
      return q;
    }
    case Family::Custom: return s.custom_q.eval(vars_of(r, z));
  }
  return 0.0;
}

// Golden-section maximization of f on [a,b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

double weight_b(const WeightSpec& s, double r, std::span<const double> z) {
  if (!s.custom_b.empty()) return s.custom_b.eval(vars_of(r, z));
  double b = s.b_profile[0];
  for (std::size_t j = 1; j < s.b_profile.size(); ++j)
    for (double zi : z) b += s.b_profile[j] * std::cos(2.0 * std::numbers::pi * j * zi);
  return b;
}

double weight_q(const WeightSpec& s, double r, std::span<const double> z) {
  return s.q_scale * raw_q(s, r, z) * s.q_factor;
}

int eta_power(const WeightSpec& s) { return s.eta_kind == EtaKind::RhoSquared ? 2 : 1; }

double eta_coefficient(const WeightSpec& s, double r, std::span<const double> z) {
  switch (s.eta_kind) {
    case EtaKind::Rho:
    case EtaKind::RhoSquared: return s.eta_scale;
    case EtaKind::RhoTimesProfile:
      return s.eta_scale * (s.eta_profile.empty() ? 1.0 : s.eta_profile.eval(vars_of(r, z)));
    case EtaKind::Custom: return s.eta_scale * s.custom_eta.eval(vars_of(r, z)) / r;
  }
  return 0.0;
}

double weight_eta(const WeightSpec& s, double r, std::span<const double> z) {
  switch (s.eta_kind) {
    case EtaKind::Rho: return s.eta_scale * r;
    case EtaKind::RhoSquared: return s.eta_scale * r * r;
    case EtaKind::RhoTimesProfile:
      return s.eta_scale * r * (s.eta_profile.empty() ? 1.0 : s.eta_profile.eval(vars_of(r, z)));
    case EtaKind::Custom: return s.eta_scale * s.custom_eta.eval(vars_of(r, z));
  }
  return 0.0;
}

WeightValues eval_weights(const WeightSpec& s, const FermiPoint& p) {
  if (!s.normalized) fail(ErrorCode::NotNormalized);
  return {weight_b(s, p.r, p.z), weight_q(s, p.r, p.z), weight_eta(s, p.r, p.z)};
}

double ratio_on_sigma(const WeightSpec& s, std::span<const double> z) {
  return weight_q(s, 0.0, z) / weight_b(s, 0.0, z);
}

double deficit(const WeightSpec& s, std::span<const double> z) {
  if (s.normalized && s.analytic()) {
    if (s.family == Family::Constant) return 0.0;
    double acc = 0.0;
    for (int j = 0; j < s.k; ++j) acc += std::log1p(-s.A * sin_term(s, z[j], s.z0[j]));
    return -std::expm1(acc);
  }
  return 1.0 - ratio_on_sigma(s, z);
}

int sigma_samples_per_axis(int k) { return k == 1 ? (1 << 14) : (1 << (16 / k)); }

namespace {

struct SigmaScan {
  double max = 0.0;
  std::vector<std::vector<double>> maximizers;
  bool continuum = false;
};

// Dense periodic sample of f on T^k, local maxima refined by coordinate golden section.
template <class F>
SigmaScan scan_sigma(F&& f, int k) {
  const int n = sigma_samples_per_axis(k);
  std::size_t total = 1;
  for (int j = 0; j < k; ++j) total *= n;
  const double h = 1.0 / n;
  std::vector<double> vals(total);
  std::vector<double> z(k);
  auto decode = [&](std::size_t i, std::vector<int>& idx) {
    for (int j = k - 1; j >= 0; --j) {
      idx[j] = static_cast<int>(i % n);
      i /= n;
    }
  };
  std::vector<int> idx(k);
  for (std::size_t i = 0; i < total; ++i) {
    decode(i, idx);
    for (int j = 0; j < k; ++j) z[j] = idx[j] * h;
    vals[i] = f(z);
  }
  double smax = *std::max_element(vals.begin(), vals.end());

  // axis-neighbor local maxima (non-strict)
  std::vector<std::size_t> cand;
  std::vector<std::size_t> stride(k, 1);
  for (int j = k - 2; j >= 0; --j) stride[j] = stride[j + 1] * n;
  for (std::size_t i = 0; i < total; ++i) {
    decode(i, idx);
    bool is_max = true;
    for (int j = 0; j < k && is_max; ++j) {
      for (int s : {-1, 1}) {
        const int nj = (idx[j] + s + n) % n;
        const std::size_t ni = i + (static_cast<std::ptrdiff_t>(nj) - idx[j]) * stride[j];
        if (vals[ni] > vals[i]) {
          is_max = false;
          break;
        }
      }
    }
    if (is_max) cand.push_back(i);
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  if (cand.size() > 64) cand.resize(64);

  SigmaScan out;
  std::vector<std::pair<std::vector<double>, double>> refined;
  for (std::size_t c : cand) {
    decode(c, idx);
    std::vector<double> zc(k);
    for (int j = 0; j < k; ++j) zc[j] = idx[j] * h;
    double val = vals[c];
    for (int sweep = 0; sweep < (k == 1 ? 1 : 4); ++sweep) {
      for (int j = 0; j < k; ++j) {
        std::vector<double> zt = zc;
        auto line = [&](double t) {
          zt[j] = wrap_unit(t);
          return f(zt);
        };
        auto [t, v] = golden_max(line, zc[j] - h, zc[j] + h, 1e-13);
        if (v > val) {
          val = v;
          zc[j] = wrap_unit(t);
        }
      }
    }
    // high-order contact leaves a plateau that rounding cannot resolve: take its midpoint
    const double flat = val - 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(val));
    for (int j = 0; j < k; ++j) {
      std::vector<double> zt = zc;
      double ext[2];
      for (int side = 0; side < 2; ++side) {
        const double s = side ? 1.0 : -1.0;
        double lo = 0.0, hi = h;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (lo + hi);
          zt[j] = wrap_unit(zc[j] + s * m);
          if (f(zt) >= flat) lo = m;
          else hi = m;
        }
        ext[side] = lo;
      }
      zc[j] = wrap_unit(zc[j] + 0.5 * (ext[1] - ext[0]));
      zt[j] = zc[j];
      val = std::max(val, f(zt));
    }
    refined.emplace_back(zc, val);
  }
  double gmax = smax;
  for (auto& [zc, v] : refined) gmax = std::max(gmax, v);
  out.max = gmax;

  const double scale = std::max(1.0, std::abs(gmax));
  const double keep = gmax - 1e-8 * scale;
  for (auto& [zc, v] : refined) {
    if (v < keep) continue;
    bool dup = false;
    for (auto& m : out.maximizers) {
      double d2 = 0.0;
      for (int j = 0; j < k; ++j) {
        const double d = periodic_distance(zc[j] - m[j]);
        d2 += d * d;
      }
      if (std::sqrt(d2) < 2.0 * h) dup = true;
    }
    if (!dup) out.maximizers.push_back(zc);
  }
  std::size_t flat = 0;
  for (double v : vals)
    if (v >= gmax - 1e-12 * scale) ++flat;
  out.continuum = flat * 20 > total;
  return out;
}

}  // namespace

SigmaMaxima scan_sigma_maxima(const WeightSpec& spec) {
  auto f = [&](const std::vector<double>& z) { return -deficit(spec, z); };
  SigmaScan scan = scan_sigma(f, spec.k);
  return {1.0 + scan.max, std::move(scan.maximizers), scan.continuum};
}

WeightSpec validate_and_normalize(const WeightSpec& spec, const Grid& grid) {
  WeightSpec out = spec;
  const int k = spec.k;
  if (k != grid.config().k) fail(ErrorCode::BadParams, "weights k does not match geometry");
  switch (spec.family) {
    case Family::SinPower:
      if (!(spec.A > 0.0 && spec.A < 1.0)) fail(ErrorCode::BadParams, "A must lie in (0,1)");
      if (!(spec.beta > 0.0)) fail(ErrorCode::BadParams, "beta must be positive");
      if (static_cast<int>(spec.z0.size()) != k) fail(ErrorCode::BadParams, "z0 size must equal k");
      break;
    case Family::Constant:
      if (!(spec.q0 > 0.0)) fail(ErrorCode::NonPositiveWeight, "q0 must be positive");
      break;
    case Family::Custom:
      if (spec.custom_q.empty()) fail(ErrorCode::BadParams, "custom family needs custom_q");
      break;
  }
  if (!(spec.q_scale > 0.0)) fail(ErrorCode::BadParams, "q_scale must be positive");
  if (!(spec.eta_scale >= 0.0)) fail(ErrorCode::EtaNegative, "eta_scale must be nonnegative");
  if (spec.b_profile.empty()) fail(ErrorCode::BadParams, "b_profile is empty");
  if (spec.eta_kind == EtaKind::Custom && spec.custom_eta.empty())
    fail(ErrorCode::BadParams, "eta_kind custom needs custom_eta");

  out.q_factor = 1.0;
  out.normalized = false;
  out.warnings.clear();
  out.maximizers.clear();
  out.continuum_maximizers = false;

  auto check_point = [&](double r, std::span<const double> z) {
    const double b = weight_b(out, r, z), q = weight_q(out, r, z);
    if (!(b > 0.0) || !(q > 0.0)) {
      std::ostringstream os;
      os << "b=" << b << " q=" << q << " at r=" << r << " z0=" << z[0];
      fail(ErrorCode::NonPositiveWeight, os.str());
    }
    if (r > 0.0 && !(weight_eta(out, r, z) >= 0.0)) fail(ErrorCode::EtaNegative);
  };
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const FermiPoint& p = grid.cell_midpoint(c);
    check_point(p.r, p.z);
  }

  // normalization
  auto ratio = [&](const std::vector<double>& z) { return weight_q(out, 0.0, z) / weight_b(out, 0.0, z); };
  if (out.analytic()) {
    const double c0 = out.b_profile[0];
    if (!(c0 > 0.0)) fail(ErrorCode::NonPositiveWeight, "b <= 0");
    const double raw_max = out.family == Family::SinPower ? 1.0 : out.q0;
    out.q_factor = c0 / (out.q_scale * raw_max);
    if (out.family == Family::SinPower) out.maximizers.push_back(out.z0);
    else out.continuum_maximizers = true;
  } else {
    SigmaScan scan = scan_sigma(ratio, k);
    if (!(scan.max > 0.0)) fail(ErrorCode::NonPositiveWeight, "max q/b <= 0");
    out.q_factor = 1.0 / scan.max;
    out.maximizers = std::move(scan.maximizers);
    out.continuum_maximizers = scan.continuum;
  }

  // Sigma-sample checks, coarse enough to stay cheap for every k
  const int ns = std::min(sigma_samples_per_axis(k), k == 1 ? 4096 : 64);
  std::size_t total = 1;
  for (int j = 0; j < k; ++j) total *= ns;
  std::vector<double> z(k);
  double eta_sup = 0.0;
  bool eta_zero_off_sigma = false;
  std::string not_lipschitz;  // reported after the vanishing check, which is the sharper diagnosis
  const int n_lip = 57;
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    for (int j = k - 1; j >= 0; --j) {
      z[j] = static_cast<double>(rem % ns) / ns;
      rem /= ns;
    }
    check_point(0.0, z);
    eta_sup = std::max(eta_sup, std::abs(weight_eta(out, 0.0, z)));
    if (weight_eta(out, 0.5 * grid.config().R, z) <= 0.0) eta_zero_off_sigma = true;
    if (i % std::max<std::size_t>(1, total / 256) != 0) continue;
    for (int t = 0; t < n_lip; ++t) {
      const double lr = std::log(1e-14) + (std::log(grid.config().R / 10.0) - std::log(1e-14)) * t / (n_lip - 1);
      const double r = std::exp(lr);
      const double e = weight_eta(out, r, z);
      if (e < 0.0) fail(ErrorCode::EtaNegative);
      if (e / r > 1e6 && not_lipschitz.empty()) {
        std::ostringstream os;
        os << "eta/rho = " << e / r << " at rho=" << r;
        not_lipschitz = os.str();
      }
    }
  }
  if (eta_sup > 1e-8) fail(ErrorCode::EtaNotVanishing, "sup of eta on Sigma = " + std::to_string(eta_sup));
  if (!not_lipschitz.empty()) fail(ErrorCode::EtaNotLipschitz, not_lipschitz);
  if (eta_zero_off_sigma && out.eta_scale > 0.0)
    out.warnings.push_back("eta vanishes off Sigma at some tangential sample; positivity off Sigma fails");
  if (out.eta_scale == 0.0) out.warnings.push_back("eta is identically zero");

  out.normalized = true;
  return out;
}

}  // namespace hardylab
