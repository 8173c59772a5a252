#include "hardylab/geometry.hpp"

#include <cmath>
#include <numbers>

#include "hardylab/errors.hpp"

namespace hardylab {

std::string to_string(Model m) { return m == Model::Reduced ? "reduced" : "full_torus"; }

double GeometryConfig::hardy_constant() const {
  const double h = (N - k - 2) / 2.0;
  return h * h;
}

void GeometryConfig::validate() const {
  if (N < 3) fail(ErrorCode::InvalidConfig, "dimension must be >= 3");
  if (k < 1 || k > N - 2) fail(ErrorCode::InvalidConfig, "need 1 <= submanifold_dimension <= dimension-2");
  if (!(R > 0.0 && R <= 0.5)) fail(ErrorCode::InvalidConfig, "tube_radius must lie in (0, 0.5]");
  if (!(grading_gamma >= 1.0)) fail(ErrorCode::InvalidConfig, "grading must be >= 1");
}

double sphere_area(int m) {
  return 2.0 * std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0);
}

double tube_volume(const GeometryConfig& cfg) {
  const int m = cfg.codim();
  return sphere_area(m) * std::pow(cfg.R, m) / m;
}

double wrap_unit(double x) {
  double w = x - std::floor(x);
  return w >= 1.0 ? 0.0 : w;
}

double periodic_distance(double x) { return std::abs(x - std::round(x)); }

double rho(std::span<const double> x, const GeometryConfig& cfg) {
  if (cfg.model == Model::Reduced) return std::abs(x[0]);
  double s = 0.0;
  for (int i = 0; i < cfg.codim(); ++i) {
    const double d = periodic_distance(x[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> project_sigma(std::span<const double> x, const GeometryConfig& cfg) {
  const int off = cfg.model == Model::Reduced ? 1 : cfg.codim();
  if (cfg.model == Model::FullTorus && rho(x, cfg) >= cfg.R)
    fail(ErrorCode::OutsideTube, "rho >= R");
  std::vector<double> z(cfg.k);
  for (int j = 0; j < cfg.k; ++j) z[j] = wrap_unit(x[off + j]);
  return z;
}

FermiPoint to_fermi(std::span<const double> x, const GeometryConfig& cfg) {
  FermiPoint p;
  p.r = rho(x, cfg);
  const int off = cfg.model == Model::Reduced ? 1 : cfg.codim();
  p.z.resize(cfg.k);
  for (int j = 0; j < cfg.k; ++j) p.z[j] = wrap_unit(x[off + j]);
  if (cfg.model == Model::FullTorus) {
    p.theta.resize(cfg.codim());
    for (int i = 0; i < cfg.codim(); ++i) {
      const double d = x[i] - std::round(x[i]);
      p.theta[i] = p.r > 0.0 ? d / p.r : 0.0;
    }
  }
  return p;
}

Grid::Grid(const GeometryConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg.n_r < 4 || cfg.n_z < 4) fail(ErrorCode::DegenerateGrid, "n_r and n_z must be >= 4");

  const int m = cfg.codim();
  if (cfg.model == Model::Reduced) {
    std::vector<double> r(cfg.n_r + 1);
    for (int i = 0; i <= cfg.n_r; ++i)
      r[i] = cfg.R * std::pow(static_cast<double>(i) / cfg.n_r, cfg.grading_gamma);
    r[cfg.n_r] = cfg.R;
    shape_.push_back(cfg.n_r + 1);
    periodic_.push_back(false);
    axis_nodes_.push_back(std::move(r));
  } else {
    for (int i = 0; i < m; ++i) {
      std::vector<double> y(cfg.n_r);
      for (int j = 0; j < cfg.n_r; ++j) y[j] = static_cast<double>(j) / cfg.n_r;
      shape_.push_back(cfg.n_r);
      periodic_.push_back(true);
      axis_nodes_.push_back(std::move(y));
    }
  }
  for (int j = 0; j < cfg.k; ++j) {
    std::vector<double> z(cfg.n_z);
    for (int i = 0; i < cfg.n_z; ++i) z[i] = static_cast<double>(i) / cfg.n_z;
    shape_.push_back(cfg.n_z);
    periodic_.push_back(true);
    axis_nodes_.push_back(std::move(z));
  }

  const int d = dims();
  node_count_ = 1;
  for (int s : shape_) node_count_ *= static_cast<std::size_t>(s);
  corners_ = 1 << d;

  std::vector<int> ncell(d);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    ncell[a] = periodic_[a] ? shape_[a] : shape_[a] - 1;
    total *= static_cast<std::size_t>(ncell[a]);
  }
  cell_corners_.resize(total * corners_);
  cell_lo_.resize(total * d);
  cell_hi_.resize(total * d);
  cell_mid_.resize(total);
  cell_measure_.resize(total);

  const double omega = sphere_area(m);
  std::vector<int> idx(d, 0);
  std::vector<double> mid(d);
  for (std::size_t c = 0; c < total; ++c) {
    // row-major decode, last axis fastest
    std::size_t rem = c;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % ncell[a]);
      rem /= ncell[a];
    }
    for (int s = 0; s < corners_; ++s) {
      std::size_t node = 0;
      for (int a = 0; a < d; ++a) {
        int i = idx[a] + ((s >> a) & 1);
        if (periodic_[a]) i %= shape_[a];
        node = node * shape_[a] + i;
      }
      cell_corners_[c * corners_ + s] = static_cast<int>(node);
    }
    double meas = 1.0;
    for (int a = 0; a < d; ++a) {
      const auto& ax = axis_nodes_[a];
      const double lo = ax[idx[a]];
      const double hi = (periodic_[a] && idx[a] + 1 == shape_[a]) ? 1.0 : ax[idx[a] + 1];
      cell_lo_[c * d + a] = lo;
      cell_hi_[c * d + a] = hi;
      mid[a] = 0.5 * (lo + hi);
      if (cfg.model == Model::Reduced && a == 0)
        meas *= omega * (std::pow(hi, m) - std::pow(lo, m)) / m;
      else
        meas *= hi - lo;
    }
    cell_measure_[c] = meas;
    cell_mid_[c] = to_fermi(mid, cfg_);
  }
}

std::vector<double> Grid::node_coords(std::size_t node) const {
  const int d = dims();
  std::vector<double> x(d);
  for (int a = d - 1; a >= 0; --a) {
    x[a] = axis_nodes_[a][node % shape_[a]];
    node /= shape_[a];
  }
  return x;
}

FermiPoint Grid::node_point(std::size_t node) const { return to_fermi(node_coords(node), cfg_); }

std::vector<double> Grid::lumped_node_measure() const {
  std::vector<double> w(node_count_, 0.0);
  for (std::size_t c = 0; c < cell_count(); ++c) {
    const double share = cell_measure_[c] / corners_;
    for (int n : cell_corners(c)) w[n] += share;
  }
  return w;
}

double Grid::total_measure() const {
  double s = 0.0;
  for (double v : cell_measure_) s += v;
  return s;
}

Grid build_grid(const GeometryConfig& cfg) { return Grid(cfg); }

}  // namespace hardylab
