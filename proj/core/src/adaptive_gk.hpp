#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hardylab::detail {

// Bisecting Gauss-Kronrod driver. Boost's own recursion compares the error of the
// panel mapped to [-1,1] against a tolerance built from the unmapped estimate, which
// on short panels asks for far more than double precision and recurses to the depth
// limit. Here both sides live on the same scale.
template <class F>
double adaptive_gk(F&& f, double a, double b, double rel_tol, int max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto panel = [&](double lo, double hi, double& err, double& l1) {
    double e = 0.0, l = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &e, &l);
    err = e * 0.5 * (hi - lo);
    l1 = l;
    return v;
  };
  double err = 0.0, l1 = 0.0;
  const double whole = panel(a, b, err, l1);
  const double abs_tol = std::max(rel_tol * std::abs(whole), 50.0 * eps * l1);
  auto rec = [&](auto&& self, double lo, double hi, double v, double e, double tol, int depth) -> double {
    if (!(e > tol) || depth <= 0 || !std::isfinite(v)) return v;
    const double mid = 0.5 * (lo + hi);
    double e1, e2, l;
    const double v1 = panel(lo, mid, e1, l);
    const double v2 = panel(mid, hi, e2, l);
    // roundoff in f: a smooth panel gains orders of magnitude per halving, noise does not
    if (e1 + e2 >= 0.5 * e && std::abs(v1 + v2 - v) <= 1e-5 * std::abs(v1 + v2)) return v1 + v2;
    return self(self, lo, mid, v1, e1, 0.5 * tol, depth - 1) + self(self, mid, hi, v2, e2, 0.5 * tol, depth - 1);
  };
  return rec(rec, a, b, whole, err, abs_tol, max_depth);
}

}  // namespace hardylab::detail
