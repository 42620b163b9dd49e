#include "nlstring/scheme.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nlstring/errors.hpp"

namespace nlstring {

SimulationError::SimulationError(Kind kind, long step, const std::string& message)
    : std::runtime_error(fmt::format("{} at step {}: {}", kind_name(kind), step, message)),
      kind_(kind),
      step_(step) {}

std::string SimulationError::kind_name(Kind kind) {
  switch (kind) {
    case Kind::divergence: return "divergence";
    case Kind::non_finite: return "non-finite state";
    case Kind::non_convergence: return "newton non-convergence";
    case Kind::singular_system: return "singular system";
  }
  return "simulation error";
}

StringState StringState::zero(const Grid& grid) {
  StringState s;
  s.w_prev = Eigen::VectorXd::Zero(grid.unknowns());
  s.w_curr = Eigen::VectorXd::Zero(grid.unknowns());
  return s;
}

SparseMatrix stack_blocks(const SparseMatrix& tl, const SparseMatrix& tr,
                          const SparseMatrix& bl, const SparseMatrix& br) {
  const Eigen::Index top = tl.rows();
  const Eigen::Index left = tl.cols();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(tl.nonZeros() + tr.nonZeros() + bl.nonZeros() + br.nonZeros()));
  auto append = [&](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0) {
    for (Eigen::Index r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it)
        triplets.emplace_back(static_cast<int>(it.row() + r0), static_cast<int>(it.col() + c0), it.value());
  };
  append(tl, 0, 0);
  append(tr, 0, left);
  append(bl, top, 0);
  append(br, top, left);
  SparseMatrix out(top + bl.rows(), left + tr.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SchemeAssembler::SchemeAssembler(const StringParams& params, std::shared_ptr<const OperatorSet> ops)
    : params_(params),
      ops_(std::move(ops)),
      nt_(ops_->grid.transverse_unknowns()),
      nl_(ops_->grid.longitudinal_unknowns()) {
  const double k = ops_->grid.k;
  const double g2k2 = params_.gamma * params_.gamma * k * k;
  const auto& t = ops_->transverse;
  const auto& l = ops_->longitudinal;
  phi2_ = g2k2 * (params_.alpha * params_.alpha - 1.0) / 4.0;

  const SparseMatrix eye_t = t.identity.to_sparse();
  const SparseMatrix eye_l = l.identity.to_sparse();
  const SparseMatrix dxx_t = t.d_xx.to_sparse();
  const SparseMatrix dxx_l = l.d_xx.to_sparse();

  theta_t_ = params_.theta * eye_t + (1.0 - params_.theta) * t.m_xdot.to_sparse();
  const SparseMatrix loss0_t = 2.0 * params_.sigma0_t * k * eye_t;
  const SparseMatrix loss1_t = 2.0 * params_.sigma1_t * k * dxx_t;
  q_plus_t_ = theta_t_ + loss0_t - loss1_t;
  q_minus_t_ = theta_t_ - loss0_t + loss1_t;
  q_plus_l_ = (1.0 + 2.0 * params_.sigma0_l * k) * eye_l - 2.0 * params_.sigma1_l * k * dxx_l;
  q_minus_l_ = (1.0 - 2.0 * params_.sigma0_l * k) * eye_l + 2.0 * params_.sigma1_l * k * dxx_l;

  const SparseMatrix g_t = g2k2 * dxx_t;
  const SparseMatrix g_l = g2k2 * dxx_l;
  const SparseMatrix s_t = params_.kappa * params_.kappa * k * k * t.d_xxxx.to_sparse();
  b_t_ = -2.0 * theta_t_ - g_t + s_t;
  b_l_ = -2.0 * eye_l - params_.alpha * params_.alpha * g_l;

  dp_t_ = t.d_xp.to_sparse();
  dm_t_ = t.d_xm.to_sparse();
  dm_interp_ = dm_t_ * ops_->interp_l_to_t;
  adjoint_dp_ = ops_->adjoint_t_to_l * dp_t_;

  const SparseMatrix zero_tl(nt_, nl_);
  const SparseMatrix zero_lt(nl_, nt_);
  linear_.A = stack_blocks(q_plus_t_, zero_tl, zero_lt, q_plus_l_);
  linear_.B = stack_blocks(b_t_, zero_tl, zero_lt, b_l_);
  linear_.C = stack_blocks(q_minus_t_, zero_tl, zero_lt, q_minus_l_);
  linear_.lambda = Eigen::VectorXd::Zero(ops_->grid.n_t);
  linear_.phi2 = phi2_;
}

Eigen::VectorXd SchemeAssembler::slopes(const Eigen::VectorXd& w) const {
  return dm_t_ * w.head(nt_);
}

std::vector<double> SchemeAssembler::unknown_positions() const {
  std::vector<double> pos;
  pos.reserve(static_cast<std::size_t>(nt_ + nl_));
  for (int i = 1; i <= nt_; ++i) pos.push_back(i * ops_->grid.h_t);
  for (int j = 1; j <= nl_; ++j) pos.push_back(j * ops_->grid.h_l);
  return pos;
}

BlockSystem SchemeAssembler::assemble(const StringState& state) const {
  if (is_linear()) {
    BlockSystem sys = linear_;
    sys.lambda = slopes(state.w_curr);
    return sys;
  }
  BlockSystem sys;
  sys.phi2 = phi2_;
  sys.lambda = slopes(state.w_curr);
  const Eigen::VectorXd lambda2 = sys.lambda.cwiseProduct(sys.lambda);

  const SparseMatrix v = -phi2_ * (dp_t_ * lambda2.asDiagonal() * dm_t_);
  const SparseMatrix k_tl = -phi2_ * (dp_t_ * sys.lambda.asDiagonal() * dm_interp_);
  const SparseMatrix k_lt = -phi2_ * (adjoint_dp_ * sys.lambda.asDiagonal() * dm_t_);
  const SparseMatrix zero_lt(nl_, nt_);

  sys.A = stack_blocks(SparseMatrix(q_plus_t_ + v), k_tl, k_lt, q_plus_l_);
  sys.B = stack_blocks(b_t_, SparseMatrix(2.0 * k_tl), zero_lt, b_l_);
  sys.C = stack_blocks(SparseMatrix(q_minus_t_ + v), k_tl, k_lt, q_minus_l_);
  return sys;
}

Eigen::VectorXd free_rhs(const StringState& state, const BlockSystem& system) {
  return -(system.B * state.w_curr + system.C * state.w_prev);
}

StringState advance(const StringState& state, const BlockSystem& system,
                    const LinearSolver& solver, std::span<const double> forcing) {
  Eigen::VectorXd rhs = free_rhs(state, system);
  if (!forcing.empty()) {
    for (std::size_t i = 0; i < forcing.size(); ++i) rhs[static_cast<Eigen::Index>(i)] += forcing[i];
  }
  StringState next;
  solver.solve(rhs, next.w_curr);
  if (!next.w_curr.allFinite()) {
    throw SimulationError(SimulationError::Kind::non_finite, state.step + 1,
                          "state contains NaN or Inf");
  }
  next.w_prev = state.w_curr;
  next.step = state.step + 1;
  return next;
}

StringState step(const StringState& state, const BlockSystem& system,
                 std::span<const double> forcing, LinearSolverKind kind) {
  std::vector<double> positions(static_cast<std::size_t>(system.A.rows()));
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<double>(i);
  auto solver = make_linear_solver(kind, positions);
  try {
    solver->factorize(system.A);
  } catch (const SingularMatrixError& e) {
    throw SimulationError(SimulationError::Kind::singular_system, state.step + 1, e.what());
  }
  return advance(state, system, *solver, forcing);
}

}  // namespace nlstring
