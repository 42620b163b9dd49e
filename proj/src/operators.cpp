#include "nlstring/operators.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace nlstring {

double PointOperator::dot(std::span<const double> values) const {
  double s = 0.0;
  for (const auto& [i, w] : entries) s += w * values[static_cast<std::size_t>(i)];
  return s;
}

void PointOperator::add_to(std::span<double> out, double amount) const {
  for (const auto& [i, w] : entries) out[static_cast<std::size_t>(i)] += amount * w;
}

std::pair<int, std::vector<double>> lagrange_weights(double xi, int n, int order) {
  if (order < 1 || order > n) {
    throw std::invalid_argument(
        fmt::format("interpolation order {} needs at most {} intervals", order, n));
  }
  const double nearest = std::round(xi);
  if (std::abs(xi - nearest) < 1e-10) xi = nearest;
  int start = (order % 2 == 1) ? static_cast<int>(std::floor(xi)) - (order - 1) / 2
                               : static_cast<int>(std::lround(xi)) - order / 2;
  start = std::clamp(start, 0, n - order);

  std::vector<double> w(static_cast<std::size_t>(order) + 1, 1.0);
  for (int j = 0; j <= order; ++j) {
    for (int m = 0; m <= order; ++m) {
      if (m == j) continue;
      w[static_cast<std::size_t>(j)] *= (xi - (start + m)) / static_cast<double>(j - m);
    }
  }
  return {start, std::move(w)};
}

namespace {

// Interior-node weights: node l maps to interior index l - 1; end nodes are zero.
PointOperator point_operator(double xi, int n, int order) {
  const auto [start, w] = lagrange_weights(xi, n, order);
  PointOperator op;
  for (int j = 0; j <= order; ++j) {
    const int node = start + j;
    if (node <= 0 || node >= n) continue;
    const double weight = w[static_cast<std::size_t>(j)];
    if (weight != 0.0) op.entries.emplace_back(node - 1, weight);
  }
  return op;
}

// Rows: interior nodes of the destination grid (n_dst intervals).
SparseMatrix interpolation_matrix(int n_src, int n_dst, int order) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 1; i < n_dst; ++i) {
    const double xi = static_cast<double>(i) * n_src / n_dst;
    for (const auto& [col, w] : point_operator(xi, n_src, order).entries) {
      triplets.emplace_back(i - 1, col, w);
    }
  }
  SparseMatrix m(n_dst - 1, n_src - 1);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

SubsystemOperators build_subsystem(int n, BoundaryCondition boundary) {
  if (n < 3) throw std::invalid_argument("subsystem needs at least 3 intervals");
  SubsystemOperators ops;
  ops.n = n;
  ops.h = 1.0 / n;
  const auto m = static_cast<std::size_t>(n - 1);
  const auto intervals = static_cast<std::size_t>(n);
  const double inv_h = static_cast<double>(n);

  ops.identity = BandedMatrix::identity(m);

  ops.d_xm = BandedMatrix(intervals, m);
  ops.d_xm.set_band(0, std::vector<double>(intervals, inv_h));
  ops.d_xm.set_band(-1, std::vector<double>(intervals, -inv_h));

  ops.d_xp = BandedMatrix(m, intervals);
  ops.d_xp.set_band(0, std::vector<double>(m, -inv_h));
  ops.d_xp.set_band(1, std::vector<double>(m, inv_h));

  ops.d_xx = ops.d_xp * ops.d_xm;
  ops.d_xxxx = ops.d_xx * ops.d_xx;
  if (boundary == BoundaryCondition::clamped) {
    // Ghost node u_{-1} = u_1 (zero slope) adds 2/h^4 at both corners.
    const double corner = 2.0 * std::pow(inv_h, 4);
    ops.d_xxxx.set(0, 0, ops.d_xxxx(0, 0) + corner);
    ops.d_xxxx.set(m - 1, m - 1, ops.d_xxxx(m - 1, m - 1) + corner);
  }

  ops.m_xdot = BandedMatrix(m, m);
  ops.m_xdot.set_band(1, std::vector<double>(m, 0.5));
  ops.m_xdot.set_band(-1, std::vector<double>(m, 0.5));
  return ops;
}

OperatorSet build_operators(const Grid& grid, int order, BoundaryCondition boundary) {
  if (order < 1 || order > std::min(grid.n_t, grid.n_l)) {
    throw std::invalid_argument(fmt::format(
        "interpolation order {} larger than available grid points (n_t={}, n_l={})", order,
        grid.n_t, grid.n_l));
  }
  OperatorSet ops;
  ops.grid = grid;
  ops.order = order;
  ops.boundary = boundary;
  ops.transverse = build_subsystem(grid.n_t, boundary);
  ops.longitudinal = build_subsystem(grid.n_l, boundary);
  ops.interp_l_to_t = interpolation_matrix(grid.n_l, grid.n_t, order);
  ops.interp_t_to_l = interpolation_matrix(grid.n_t, grid.n_l, order);
  ops.adjoint_t_to_l = SparseMatrix(ops.interp_l_to_t.transpose()) * (grid.h_t / grid.h_l);
  return ops;
}

PointOperator OperatorSet::read(double x) const {
  return point_operator(x * grid.n_t, grid.n_t, order);
}

PointOperator OperatorSet::read_longitudinal(double x) const {
  return point_operator(x * grid.n_l, grid.n_l, order);
}

PointOperator OperatorSet::spread(double x) const {
  PointOperator op = read(x);
  for (auto& [_, w] : op.entries) w /= grid.h_t;
  return op;
}

void write_dense(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ' ';
      os << fmt::format("{:.17g}", m(i, j));
    }
    os << '\n';
  }
}

}  // namespace nlstring
