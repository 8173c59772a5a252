#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hardylab {

enum class Model { Reduced, FullTorus };

std::string to_string(Model m);

/// Flat torus T^N with Sigma = {0}^(N-k) x T^k and a tube of radius R.
struct GeometryConfig {
  int N = 5;
  int k = 1;
  Model model = Model::Reduced;
  double R = 0.25;
  double grading_gamma = 2.0;
  int n_r = 64;
  int n_z = 16;

  int codim() const { return N - k; }
  /// ((N-k-2)/2)^2
  double hardy_constant() const;
  /// Throws InvalidConfig on out-of-range fields.
  void validate() const;
};

/// Area of the unit sphere S^(m-1) in R^m.
double sphere_area(int m);

/// Volume of B_R^(N-k) x T^k.
double tube_volume(const GeometryConfig& cfg);

struct FermiPoint {
  double r = 0.0;
  std::vector<double> z;
  std::vector<double> theta;  // unit normal direction, FullTorus only
};

/// Wrap to [0,1).
double wrap_unit(double x);
/// Distance to the nearest integer.
double periodic_distance(double x);

/// Model coordinates: Reduced (r, z_1..z_k); FullTorus (y_1..y_m, z_1..z_k).
double rho(std::span<const double> x, const GeometryConfig& cfg);
std::vector<double> project_sigma(std::span<const double> x, const GeometryConfig& cfg);
FermiPoint to_fermi(std::span<const double> x, const GeometryConfig& cfg);

/// Tensor grid. Reduced: axis 0 is r (n_r+1 nodes, free ends), axes 1..k are z
/// (periodic). FullTorus: all N axes periodic, n_r nodes per normal axis.
class Grid {
public:
  explicit Grid(const GeometryConfig& cfg);

  const GeometryConfig& config() const { return cfg_; }
  int dims() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  bool periodic(int axis) const { return periodic_[axis]; }
  /// Node coordinates along one axis.
  const std::vector<double>& axis_nodes(int axis) const { return axis_nodes_[axis]; }
  const std::vector<double>& radial_nodes() const { return axis_nodes_[0]; }

  std::size_t node_count() const { return node_count_; }
  std::size_t cell_count() const { return cell_measure_.size(); }
  int corners_per_cell() const { return corners_; }

  std::vector<double> node_coords(std::size_t node) const;
  FermiPoint node_point(std::size_t node) const;
  /// Node measure by lumping cell measures equally onto corners.
  std::vector<double> lumped_node_measure() const;

  std::span<const int> cell_corners(std::size_t c) const {
    return {cell_corners_.data() + c * corners_, static_cast<std::size_t>(corners_)};
  }
  /// Lower/upper cell bounds per axis (upper may exceed 1 on the periodic seam).
  std::span<const double> cell_lo(std::size_t c) const {
    return {cell_lo_.data() + c * dims(), static_cast<std::size_t>(dims())};
  }
  std::span<const double> cell_hi(std::size_t c) const {
    return {cell_hi_.data() + c * dims(), static_cast<std::size_t>(dims())};
  }
  const FermiPoint& cell_midpoint(std::size_t c) const { return cell_mid_[c]; }
  double cell_measure(std::size_t c) const { return cell_measure_[c]; }
  double total_measure() const;

private:
  GeometryConfig cfg_;
  std::vector<int> shape_;
  std::vector<bool> periodic_;
  std::vector<std::vector<double>> axis_nodes_;
  std::size_t node_count_ = 0;
  int corners_ = 0;
  std::vector<int> cell_corners_;
  std::vector<double> cell_lo_, cell_hi_;
  std::vector<FermiPoint> cell_mid_;
  std::vector<double> cell_measure_;
};

Grid build_grid(const GeometryConfig& cfg);

}  // namespace hardylab
