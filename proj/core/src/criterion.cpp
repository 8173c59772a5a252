#include "hardylab/criterion.hpp"

#include <algorithm>
#include <cmath>

#include "adaptive_gk.hpp"
#include "hardylab/errors.hpp"

namespace hardylab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "Convergent";
    case Verdict::Divergent: return "Divergent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(VerdictBasis b) {
  switch (b) {
    case VerdictBasis::ExponentTest: return "ExponentTest";
    case VerdictBasis::GrowthTest: return "GrowthTest";
    case VerdictBasis::Both: return "Both";
    case VerdictBasis::None: return "None";
  }
  return "?";
}

namespace {

struct CapIntegrator {
  const std::function<double(std::span<const double>)>& f;
  int k;
  const std::vector<std::vector<double>>& centers;
  double cap;
  double tol;
  std::vector<double> z;

  // every center keeps its dyadic breakpoints: off the cap slab the integrand is still peaked near it
  std::vector<double> breakpoints(int axis) const {
    std::vector<double> b{0.0, 1.0};
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double x = centers[c][axis];
      b.push_back(wrap_unit(x));
      for (double d = 0.25; d >= std::max(cap * 0.999, 1e-9); d *= 0.5) {
        b.push_back(wrap_unit(x - d));
        b.push_back(wrap_unit(x + d));
      }
      if (cap > 0.0) {
        b.push_back(wrap_unit(x - cap));
        b.push_back(wrap_unit(x + cap));
      }
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

  double run(int axis, const std::vector<char>& active) {
    const std::vector<double> br = breakpoints(axis);
    const bool last = axis == k - 1;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double a = br[i], b = br[i + 1];
      if (!(b > a)) continue;
      const double mid = 0.5 * (a + b);
      std::vector<char> inner(active.size());
      bool excluded = false;
      for (std::size_t c = 0; c < centers.size(); ++c) {
        inner[c] = active[c] && periodic_distance(mid - centers[c][axis]) < cap;
        if (last && inner[c]) excluded = true;
      }
      if (excluded) continue;
      auto g = [&](double t) {
        z[axis] = t;
        return last ? f(z) : run(axis + 1, inner);
      };
      // outer levels integrate a noisy inner result: ask 100x less of them per level
      const double level_tol = tol * std::pow(100.0, k - 1 - axis);
      total += detail::adaptive_gk(g, a, b, level_tol, last ? 12 : 6);
    }
    return total;
  }
};

}  // namespace

double integrate_sigma_excluding(const std::function<double(std::span<const double>)>& f, int k,
                                 const std::vector<std::vector<double>>& centers, double cap,
                                 double rel_tol) {
  CapIntegrator ci{f, k, centers, cap, rel_tol, std::vector<double>(k, 0.0)};
  std::vector<char> active(centers.size(), 1);
  return ci.run(0, active);
}

double criterion_integral(const WeightSpec& spec, const std::vector<std::vector<double>>& centers,
                          double cap) {
  auto f = [&](std::span<const double> z) {
    const double d = deficit(spec, z);
    return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  };
  return integrate_sigma_excluding(f, spec.k, centers, cap);
}

MaximizerSet find_maximizers(const WeightSpec& spec) {
  if (!spec.normalized) fail(ErrorCode::NotNormalized);
  SigmaMaxima scan = scan_sigma_maxima(spec);
  MaximizerSet out;
  out.continuum = scan.continuum;
  const int k = spec.k;
  for (auto& z : scan.points) {
    // half-width along the axes where the deficit stays below 1e-8
    double loc = 0.5;
    for (int j = 0; j < k; ++j) {
      for (int s : {-1, 1}) {
        double lo = 0.0, hi = 0.5;
        std::vector<double> zt = z;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (lo + hi);
          zt[j] = wrap_unit(z[j] + s * m);
          if (deficit(spec, zt) <= 1e-8) lo = m;
          else hi = m;
        }
        loc = std::min(loc, lo);
      }
    }
    out.points.push_back({z, std::max(loc, 1e-15)});
  }
  for (std::size_t a = 0; a < out.points.size(); ++a) {
    for (std::size_t b = a + 1; b < out.points.size(); ++b) {
      double d2 = 0.0;
      for (int j = 0; j < k; ++j) {
        const double d = periodic_distance(out.points[a].z[j] - out.points[b].z[j]);
        d2 += d * d;
      }
      const double sep = std::sqrt(d2);
      if (sep <= 10.0 * std::max(out.points[a].localization_radius, out.points[b].localization_radius))
        out.continuum = true;
    }
  }
  if (out.points.empty()) out.continuum = true;
  return out;
}

std::vector<BetaEstimate> estimate_exponents(const WeightSpec& spec, const MaximizerSet& set) {
  std::vector<BetaEstimate> out;
  const int k = spec.k;
  const int n = 25;
  for (const auto& m : set.points) {
    BetaEstimate be{m.z, 1e300, 0.0, n, false};
    for (int j = 0; j < k; ++j) {
      for (int s : {-1, 1}) {
        std::vector<double> xs, ys;
        std::vector<double> zt = m.z;
        for (int i = 0; i < n; ++i) {
          const double d = std::pow(10.0, -6.0 + 4.0 * i / (n - 1));
          zt[j] = wrap_unit(m.z[j] + s * d);
          const double df = deficit(spec, zt);
          // below ~1e-13 the subtraction 1 - q/b carries no digits for general specs
          if (!(df > (spec.analytic() ? 0.0 : 1e-13))) continue;
          xs.push_back(std::log(d));
          ys.push_back(std::log(df));
        }
        const int cnt = static_cast<int>(xs.size());
        be.samples = std::min(be.samples, cnt);
        if (cnt < 5) {
          be.poor_fit = true;
          continue;
        }
        double mx = 0, my = 0;
        for (int i = 0; i < cnt; ++i) {
          mx += xs[i];
          my += ys[i];
        }
        mx /= cnt;
        my /= cnt;
        double sxx = 0, sxy = 0;
        for (int i = 0; i < cnt; ++i) {
          sxx += (xs[i] - mx) * (xs[i] - mx);
          sxy += (xs[i] - mx) * (ys[i] - my);
        }
        const double slope = sxy / sxx;
        double ss = 0;
        for (int i = 0; i < cnt; ++i) {
          const double r = ys[i] - (my + slope * (xs[i] - mx));
          ss += r * r;
        }
        const double rms = std::sqrt(ss / cnt);
        be.beta = std::min(be.beta, slope / 2.0);
        be.fit_residual = std::max(be.fit_residual, rms);
      }
    }
    if (be.fit_residual > 0.1) be.poor_fit = true;
    out.push_back(be);
  }
  return out;
}

CriterionReport classify_criterion(const WeightSpec& spec, const CriterionOptions& opt) {
  CriterionReport rep;
  rep.maximizers = find_maximizers(spec);
  const int k = spec.k;
  if (rep.maximizers.continuum) {
    rep.notes.push_back("ContinuumMaximizers: maximizer set not isolated; verdict withheld");
    return rep;
  }
  rep.beta_estimates = estimate_exponents(spec, rep.maximizers);

  bool poor = false;
  double beta_min = 1e300;
  for (const auto& b : rep.beta_estimates) {
    poor = poor || b.poor_fit;
    beta_min = std::min(beta_min, b.beta);
  }
  if (poor) {
    rep.exponent_verdict = Verdict::Inconclusive;
    rep.notes.push_back("PoorFit: exponent test skipped");
  } else if (beta_min < k - opt.beta_margin) {
    rep.exponent_verdict = Verdict::Convergent;
  } else if (beta_min > k + opt.beta_margin) {
    rep.exponent_verdict = Verdict::Divergent;
  } else {
    rep.exponent_verdict = Verdict::Inconclusive;
    rep.notes.push_back("beta within margin of k");
  }

  std::vector<std::vector<double>> centers;
  for (const auto& m : rep.maximizers.points) centers.push_back(m.z);
  double prev = 0.0;
  for (int j = opt.j_min; j <= opt.j_max; ++j) {
    const double cap = std::ldexp(1.0, -j);
    const double I = criterion_integral(spec, centers, cap);
    rep.levels.push_back({j, cap, I, j == opt.j_min ? 0.0 : I - prev});
    prev = I;
  }

  const std::size_t L = rep.levels.size();
  int used = 0;
  double acc = 0.0;
  for (std::size_t i = L - 1; i >= 2 && used < opt.ratio_window; --i, ++used) {
    const double d1 = rep.levels[i].increment, d0 = rep.levels[i - 1].increment;
    if (d1 <= 0.0 || d0 <= 0.0) break;
    acc += std::log2(d1 / d0);
  }
  if (used > 0) {
    rep.growth_exponent = acc / used;
    const double last = rep.levels[L - 1].integral, before = rep.levels[L - 2].integral;
    const bool cauchy = std::abs(last - before) <= opt.cauchy_tol * std::abs(last);
    if (rep.growth_exponent >= opt.decay_floor) rep.growth_verdict = Verdict::Divergent;
    else if (cauchy) rep.growth_verdict = Verdict::Convergent;
  }

  const Verdict e = rep.exponent_verdict, g = rep.growth_verdict;
  if (e != Verdict::Inconclusive && g != Verdict::Inconclusive) {
    if (e == g) {
      rep.verdict = e;
      rep.basis = VerdictBasis::Both;
    } else {
      rep.notes.push_back("exponent and growth tests disagree");
    }
  } else if (g != Verdict::Inconclusive) {
    rep.verdict = g;
    rep.basis = VerdictBasis::GrowthTest;
  } else if (e != Verdict::Inconclusive) {
    rep.verdict = e;
    rep.basis = VerdictBasis::ExponentTest;
  }
  return rep;
}

}  // namespace hardylab
