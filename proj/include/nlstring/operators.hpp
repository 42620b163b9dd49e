#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "nlstring/banded_matrix.hpp"
#include "nlstring/grid.hpp"
#include "nlstring/params.hpp"

namespace nlstring {

/// Difference and averaging matrices of one subsystem with n intervals.
/// State vectors hold the n - 1 interior nodes; the end nodes are fixed at zero.
struct SubsystemOperators {
  int n = 0;
  double h = 0.0;
  BandedMatrix identity;  // (n-1) x (n-1)
  BandedMatrix d_xm;      // n x (n-1): node values -> interval slopes
  BandedMatrix d_xp;      // (n-1) x n: interval values -> interior nodes
  BandedMatrix d_xx;      // d_xp * d_xm
  BandedMatrix d_xxxx;    // biharmonic with the selected end closure
  BandedMatrix m_xdot;    // average of the two neighbours
};

/// Sparse row vector over interior nodes: interpolation I_p(x), or, scaled by
/// 1/h, the spreading operator J_p(x).
struct PointOperator {
  std::vector<std::pair<int, double>> entries;  // (interior index, weight)

  double dot(std::span<const double> values) const;
  /// out += amount * weights
  void add_to(std::span<double> out, double amount) const;
};

/// Lagrange weights of order p at x on nodes 0..n with unit spacing in
/// node coordinates; returns (first node, p + 1 weights).
std::pair<int, std::vector<double>> lagrange_weights(double x_in_nodes, int n, int order);

struct OperatorSet {
  Grid grid;
  int order = 3;
  BoundaryCondition boundary = BoundaryCondition::clamped;
  SubsystemOperators transverse;
  SubsystemOperators longitudinal;
  SparseMatrix interp_l_to_t;   // (n_t-1) x (n_l-1) upsampling of node values
  SparseMatrix interp_t_to_l;   // (n_l-1) x (n_t-1) downsampling of node values
  SparseMatrix adjoint_t_to_l;  // (h_t / h_l) * interp_l_to_t^T

  PointOperator read(double x) const;               // I_p(x), transverse grid
  PointOperator read_longitudinal(double x) const;  // I_p(x), longitudinal grid
  PointOperator spread(double x) const;             // J_p(x) = I_p(x)^T / h_t
};

/// Throws std::invalid_argument when the order exceeds the available grid points.
OperatorSet build_operators(const Grid& grid, int order,
                            BoundaryCondition boundary = BoundaryCondition::clamped);

SubsystemOperators build_subsystem(int n, BoundaryCondition boundary);

/// Plain-text dump (one row per line, space separated) for inspection and diffing.
void write_dense(std::ostream& os, const Eigen::MatrixXd& m);

}  // namespace nlstring
