#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hardylab/geometry.hpp"
#include "hardylab/weights.hpp"

namespace hardylab {

/// Symmetric CSR pattern with sorted columns, shared by all forms.
struct SparsityPattern {
  std::size_t n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;

  std::size_t nnz() const { return col.size(); }
  /// Position of (i,j) in col/values; -1 if absent.
  std::ptrdiff_t find(int i, int j) const;
};

enum class Form { A_b = 0, M_q = 1, M_eta = 2, M_0 = 3, M_log = 4 };
inline constexpr int kFormCount = 5;
std::string to_string(Form f);

struct QuadraticForms {
  std::shared_ptr<const SparsityPattern> pattern;
  std::array<std::vector<double>, kFormCount> values;
  std::size_t dof_count = 0;
  std::string config_hash;
  /// M_eta <= eta_over_q_bound * M_q and M_q <= q_over_log_bound * M_log (Loewner),
  /// from the per-quadrature-point density ratios.
  double eta_over_q_bound = 0.0;
  double q_over_log_bound = 0.0;
  /// Dofs on rho >= R (outer ring of the tube).
  std::vector<char> outer;

  const std::vector<double>& operator[](Form f) const { return values[static_cast<int>(f)]; }
  std::vector<double>& operator[](Form f) { return values[static_cast<int>(f)]; }

  /// y = M x
  void apply(Form f, std::span<const double> x, std::span<double> y) const;
  /// x' M x
  double energy(Form f, std::span<const double> x) const;
};

/// Element matrices of one cell, corners x corners row-major, one per form.
using ElementMatrices = std::array<std::vector<double>, kFormCount>;
void element_matrices(const Grid& grid, const WeightSpec& spec, std::size_t cell, ElementMatrices& out,
                      double* eta_q_ratio = nullptr, double* q_log_ratio = nullptr);

QuadraticForms assemble_forms(const Grid& grid, const WeightSpec& spec);

/// sum over cells accepted by keep of u_c' E_c u_c for one form.
double partial_energy(const Grid& grid, const WeightSpec& spec, Form f, std::span<const double> u,
                      const std::function<bool(const FermiPoint&)>& keep);

/// (A_b[u] - lambda M_eta[u]) / M_q[u]; ZeroDenominator if M_q[u] = 0.
double quotient(const QuadraticForms& forms, double lambda, std::span<const double> u);

/// Nodal interpolant of a field (node values), the r = 0 ring taken from the first ring.
std::vector<double> interpolate_nodes(const Grid& grid, const std::function<double(const FermiPoint&)>& f);

}  // namespace hardylab
