#include "hardylab/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hardylab/errors.hpp"

namespace hardylab {

namespace {

// 8-point Gauss-Legendre on [-1,1]
constexpr std::array<double, 8> kGx{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                    0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGw{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                    0.2223810344533745, 0.1012285362903763};

// log factor of M_log; clamped so that ln rho stays away from 0 outside the tube
double inv_log2(double rho) {
  const double l = std::log(std::min(rho, 0.5));
  return 1.0 / (l * l);
}

struct Radial {
  // [form-like kind][a][b]: 0 stiffness r^(m-1) phi'phi', 1 r^(m-1), 2 r^(m-3), 3 r^(m-3+e), 4 r^(m-3)/log^2
  double M[5][2][2] = {};
};

Radial radial_integrals(double r0, double r1, int m, int e, double q_c, double g_c, double* eta_q,
                        double* q_log) {
  Radial out;
  const double h = r1 - r0;
  for (int i = 0; i < 8; ++i) {
    double r, w;
    if (r0 == 0.0) {
      // r = r1 t^2 removes the r^(m-3) endpoint singularity
      const double t = 0.5 * (kGx[i] + 1.0);
      r = r1 * t * t;
      w = 0.5 * kGw[i] * 2.0 * r1 * t;
    } else {
      r = r0 + 0.5 * h * (kGx[i] + 1.0);
      w = 0.5 * h * kGw[i];
    }
    const double phi[2] = {(r1 - r) / h, (r - r0) / h};
    const double dphi[2] = {-1.0 / h, 1.0 / h};
    const double rm1 = std::pow(r, m - 1), rm3 = std::pow(r, m - 3);
    const double dens[5] = {rm1, rm1, rm3, rm3 * std::pow(r, e), rm3 * inv_log2(r)};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        out.M[0][a][b] += w * dens[0] * dphi[a] * dphi[b];
        for (int f = 1; f < 5; ++f) out.M[f][a][b] += w * dens[f] * phi[a] * phi[b];
      }
    if (eta_q) *eta_q = std::max(*eta_q, std::pow(r, e) * g_c / q_c);
    if (q_log) *q_log = std::max(*q_log, q_c / inv_log2(r));
  }
  return out;
}

void reduced_element(const Grid& grid, const WeightSpec& spec, std::size_t c, ElementMatrices& E,
                     double* eta_q, double* q_log) {
  const GeometryConfig& cfg = grid.config();
  const int m = cfg.codim(), k = cfg.k;
  const int nc = grid.corners_per_cell();
  const auto lo = grid.cell_lo(c), hi = grid.cell_hi(c);
  const FermiPoint& mid = grid.cell_midpoint(c);
  const double b_c = weight_b(spec, mid.r, mid.z);
  const double q_c = weight_q(spec, mid.r, mid.z);
  const double g_c = eta_coefficient(spec, mid.r, mid.z);
  const double omega = sphere_area(m);
  const Radial rad = radial_integrals(lo[0], hi[0], m, eta_power(spec), q_c, g_c, eta_q, q_log);

  for (auto& v : E) v.assign(static_cast<std::size_t>(nc) * nc, 0.0);
  for (int s = 0; s < nc; ++s) {
    for (int t = s; t < nc; ++t) {
      const int sr = s & 1, tr = t & 1;
      double mz = 1.0;
      for (int j = 0; j < k; ++j) {
        const double hz = hi[1 + j] - lo[1 + j];
        mz *= ((s >> (1 + j)) & 1) == ((t >> (1 + j)) & 1) ? hz / 3.0 : hz / 6.0;
      }
      double kz = 0.0;
      for (int j = 0; j < k; ++j) {
        double prod = 1.0;
        for (int i = 0; i < k; ++i) {
          const double hz = hi[1 + i] - lo[1 + i];
          const bool same = ((s >> (1 + i)) & 1) == ((t >> (1 + i)) & 1);
          if (i == j) prod *= same ? 1.0 / hz : -1.0 / hz;
          else prod *= same ? hz / 3.0 : hz / 6.0;
        }
        kz += prod;
      }
      const double vals[kFormCount] = {
          omega * b_c * (rad.M[0][sr][tr] * mz + rad.M[1][sr][tr] * kz),
          omega * q_c * rad.M[2][sr][tr] * mz,
          omega * g_c * rad.M[3][sr][tr] * mz,
          omega * rad.M[1][sr][tr] * mz,
          omega * rad.M[4][sr][tr] * mz,
      };
      for (int f = 0; f < kFormCount; ++f) {
        E[f][s * nc + t] = vals[f];
        E[f][t * nc + s] = vals[f];
      }
    }
  }
}

void torus_element(const Grid& grid, const WeightSpec& spec, std::size_t c, ElementMatrices& E,
                   double* eta_q, double* q_log) {
  const GeometryConfig& cfg = grid.config();
  const int d = cfg.N;
  const int nc = grid.corners_per_cell();
  const auto lo = grid.cell_lo(c), hi = grid.cell_hi(c);
  const double g = 0.5 / std::sqrt(3.0);
  std::vector<double> x(d), xi(d), hsz(d);
  for (int a = 0; a < d; ++a) hsz[a] = hi[a] - lo[a];
  double vol = 1.0;
  for (double h : hsz) vol *= h;
  const double w = vol / nc;  // 2^d points, equal weights
  std::vector<double> phi(nc), grad(static_cast<std::size_t>(nc) * d);

  for (auto& v : E) v.assign(static_cast<std::size_t>(nc) * nc, 0.0);
  for (int p = 0; p < nc; ++p) {
    for (int a = 0; a < d; ++a) {
      xi[a] = ((p >> a) & 1) ? 0.5 + g : 0.5 - g;
      x[a] = lo[a] + xi[a] * hsz[a];
    }
    const FermiPoint fp = to_fermi(x, cfg);
    const double r = fp.r;
    if (!(r > 0.0)) fail(ErrorCode::SingularMass, "quadrature point on Sigma");
    const double b = weight_b(spec, r, fp.z), q = weight_q(spec, r, fp.z), eta = weight_eta(spec, r, fp.z);
    const double r2 = r * r;
    if (eta_q) *eta_q = std::max(*eta_q, eta / q);
    if (q_log) *q_log = std::max(*q_log, q / inv_log2(r));
    for (int s = 0; s < nc; ++s) {
      double v = 1.0;
      for (int a = 0; a < d; ++a) v *= ((s >> a) & 1) ? xi[a] : 1.0 - xi[a];
      phi[s] = v;
      for (int a = 0; a < d; ++a) {
        double gv = ((s >> a) & 1) ? 1.0 / hsz[a] : -1.0 / hsz[a];
        for (int i = 0; i < d; ++i)
          if (i != a) gv *= ((s >> i) & 1) ? xi[i] : 1.0 - xi[i];
        grad[s * d + a] = gv;
      }
    }
    const double dens[kFormCount] = {b, q / r2, eta / r2, 1.0, inv_log2(r) / r2};
    for (int s = 0; s < nc; ++s) {
      for (int t = s; t < nc; ++t) {
        double gg = 0.0;
        for (int a = 0; a < d; ++a) gg += grad[s * d + a] * grad[t * d + a];
        const double pp = phi[s] * phi[t];
        E[0][s * nc + t] += w * dens[0] * gg;
        for (int f = 1; f < kFormCount; ++f) E[f][s * nc + t] += w * dens[f] * pp;
      }
    }
  }
  for (auto& M : E)
    for (int s = 0; s < nc; ++s)
      for (int t = s + 1; t < nc; ++t) M[t * nc + s] = M[s * nc + t];
}

}  // namespace

std::string to_string(Form f) {
  static const char* names[] = {"A_b", "M_q", "M_eta", "M_0", "M_log"};
  return names[static_cast<int>(f)];
}

std::ptrdiff_t SparsityPattern::find(int i, int j) const {
  const auto b = col.begin() + row_ptr[i], e = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return -1;
  return it - col.begin();
}

void QuadraticForms::apply(Form f, std::span<const double> x, std::span<double> y) const {
  const auto& v = (*this)[f];
  const auto& P = *pattern;
  for (std::size_t i = 0; i < P.n; ++i) {
    double s = 0.0;
    for (int p = P.row_ptr[i]; p < P.row_ptr[i + 1]; ++p) s += v[p] * x[P.col[p]];
    y[i] = s;
  }
}

double QuadraticForms::energy(Form f, std::span<const double> x) const {
  std::vector<double> y(dof_count);
  apply(f, x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < dof_count; ++i) s += x[i] * y[i];
  return s;
}

void element_matrices(const Grid& grid, const WeightSpec& spec, std::size_t cell, ElementMatrices& out,
                      double* eta_q, double* q_log) {
  if (grid.config().model == Model::Reduced) reduced_element(grid, spec, cell, out, eta_q, q_log);
  else torus_element(grid, spec, cell, out, eta_q, q_log);
}

QuadraticForms assemble_forms(const Grid& grid, const WeightSpec& spec) {
  if (!spec.normalized) fail(ErrorCode::NotNormalized);
  const std::size_t n = grid.node_count();
  const int nc = grid.corners_per_cell();

  auto pat = std::make_shared<SparsityPattern>();
  pat->n = n;
  {
    std::vector<std::vector<int>> rows(n);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const auto corners = grid.cell_corners(c);
      for (int a : corners)
        for (int b : corners) rows[a].push_back(b);
    }
    pat->row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& r = rows[i];
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
      pat->row_ptr[i + 1] = pat->row_ptr[i] + static_cast<int>(r.size());
    }
    pat->col.reserve(pat->row_ptr[n]);
    for (auto& r : rows) pat->col.insert(pat->col.end(), r.begin(), r.end());
  }

  QuadraticForms F;
  F.pattern = pat;
  F.dof_count = n;
  for (auto& v : F.values) v.assign(pat->nnz(), 0.0);

  ElementMatrices E;
  double eta_q = 0.0, q_log = 0.0;
  std::vector<std::ptrdiff_t> pos(static_cast<std::size_t>(nc) * nc);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    element_matrices(grid, spec, c, E, &eta_q, &q_log);
    const auto corners = grid.cell_corners(c);
    for (int s = 0; s < nc; ++s)
      for (int t = 0; t < nc; ++t) pos[s * nc + t] = pat->find(corners[s], corners[t]);
    for (int f = 0; f < kFormCount; ++f) {
      auto& vals = F.values[f];
      for (int s = 0; s < nc; ++s)
        for (int t = 0; t < nc; ++t) vals[pos[s * nc + t]] += E[f][s * nc + t];
    }
  }
  F.eta_over_q_bound = eta_q;
  F.q_over_log_bound = q_log;

  F.outer.assign(n, 0);
  const double R = grid.config().R;
  for (std::size_t i = 0; i < n; ++i) {
    const FermiPoint p = grid.node_point(i);
    F.outer[i] = p.r >= R * (1.0 - 1e-12) ? 1 : 0;
  }
  return F;
}

double partial_energy(const Grid& grid, const WeightSpec& spec, Form f, std::span<const double> u,
                      const std::function<bool(const FermiPoint&)>& keep) {
  ElementMatrices E;
  const int nc = grid.corners_per_cell();
  double total = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!keep(grid.cell_midpoint(c))) continue;
    element_matrices(grid, spec, c, E);
    const auto corners = grid.cell_corners(c);
    const auto& M = E[static_cast<int>(f)];
    for (int s = 0; s < nc; ++s)
      for (int t = 0; t < nc; ++t) total += u[corners[s]] * M[s * nc + t] * u[corners[t]];
  }
  return total;
}

double quotient(const QuadraticForms& forms, double lambda, std::span<const double> u) {
  const double den = forms.energy(Form::M_q, u);
  if (!(den > 0.0)) fail(ErrorCode::ZeroDenominator);
  return (forms.energy(Form::A_b, u) - lambda * forms.energy(Form::M_eta, u)) / den;
}

std::vector<double> interpolate_nodes(const Grid& grid, const std::function<double(const FermiPoint&)>& f) {
  std::vector<double> u(grid.node_count());
  const GeometryConfig& cfg = grid.config();
  const double r_first = cfg.model == Model::Reduced ? grid.radial_nodes()[1] : 1.0 / cfg.n_r;
  for (std::size_t i = 0; i < u.size(); ++i) {
    FermiPoint p = grid.node_point(i);
    if (p.r == 0.0) p.r = r_first;
    u[i] = f(p);
  }
  return u;
}

}  // namespace hardylab
