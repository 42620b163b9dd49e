#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nlstring/banded_matrix.hpp"
#include "nlstring/linear_solver.hpp"
#include "nlstring/operators.hpp"
#include "nlstring/params.hpp"

namespace nlstring {

/// Two consecutive time levels of the stacked state w = [u; zeta].
struct StringState {
  Eigen::VectorXd w_prev;
  Eigen::VectorXd w_curr;
  long step = 0;  // time index of w_curr

  static StringState zero(const Grid& grid);
};

/// Matrices of A w^{n+1} + B w^n + C w^{n-1} = forcing terms.
struct BlockSystem {
  SparseMatrix A;
  SparseMatrix B;
  SparseMatrix C;
  Eigen::VectorXd lambda;  // slopes D_x- u^n, one per transverse interval
  double phi2 = 0.0;       // gamma^2 k^2 (alpha^2 - 1) / 4
};

/// Builds the per-step block system. Everything except the slope-dependent
/// blocks (V, K_tl, K_lt) is assembled once at construction.
class SchemeAssembler {
 public:
  SchemeAssembler(const StringParams& params, std::shared_ptr<const OperatorSet> ops);

  BlockSystem assemble(const StringState& state) const;

  bool is_linear() const { return phi2_ == 0.0; }
  double phi2() const { return phi2_; }
  const OperatorSet& operators() const { return *ops_; }
  const StringParams& params() const { return params_; }
  int transverse_unknowns() const { return nt_; }
  int longitudinal_unknowns() const { return nl_; }

  /// Constant system used when is_linear(); lambda is left at zero.
  const BlockSystem& linear_system() const { return linear_; }

  Eigen::VectorXd slopes(const Eigen::VectorXd& w) const;
  /// Spatial coordinate of each stacked unknown (transverse first).
  std::vector<double> unknown_positions() const;

  // Sub-blocks, exposed for inspection and tests.
  const SparseMatrix& q_plus_t() const { return q_plus_t_; }
  const SparseMatrix& q_minus_t() const { return q_minus_t_; }
  const SparseMatrix& q_plus_l() const { return q_plus_l_; }
  const SparseMatrix& q_minus_l() const { return q_minus_l_; }
  const SparseMatrix& theta_t() const { return theta_t_; }

 private:
  StringParams params_;
  std::shared_ptr<const OperatorSet> ops_;
  int nt_;
  int nl_;
  double phi2_;
  SparseMatrix theta_t_;
  SparseMatrix q_plus_t_, q_minus_t_, q_plus_l_, q_minus_l_;
  SparseMatrix b_t_, b_l_;
  SparseMatrix dp_t_, dm_t_;
  SparseMatrix dm_interp_;   // D_x- P, P = interp_l_to_t
  SparseMatrix adjoint_dp_;  // R D_x+, R = adjoint_t_to_l
  BlockSystem linear_;
};

/// Solves A w^{n+1} = -(B w^n + C w^{n-1}) + [f; 0] with `solver` already
/// factorised for system.A. `forcing` acts on the transverse rows only and is
/// the force on the string in step units (k^2 times the accelerating term).
/// Throws SimulationError on a non-finite result.
StringState advance(const StringState& state, const BlockSystem& system,
                    const LinearSolver& solver, std::span<const double> forcing);

/// Convenience form that factorises system.A itself.
StringState step(const StringState& state, const BlockSystem& system,
                 std::span<const double> forcing,
                 LinearSolverKind kind = LinearSolverKind::direct_sparse);

/// Right-hand side -(B w^n + C w^{n-1}).
Eigen::VectorXd free_rhs(const StringState& state, const BlockSystem& system);

/// Stacks four blocks [[tl, tr], [bl, br]] into one matrix.
SparseMatrix stack_blocks(const SparseMatrix& tl, const SparseMatrix& tr,
                          const SparseMatrix& bl, const SparseMatrix& br);

}  // namespace nlstring
