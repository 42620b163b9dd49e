#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlstring/excitation.hpp"
#include "nlstring/grid.hpp"
#include "nlstring/linear_solver.hpp"
#include "nlstring/operators.hpp"
#include "nlstring/params.hpp"
#include "nlstring/scheme.hpp"

namespace nlstring {

inline constexpr const char* kEngineVersion = "1.0.0";

struct RenderOptions {
  bool record_fields = false;  // keep u^n and zeta^n for every step
};

/// Per-step solver record, indexed by output sample.
struct StepDiagnostics {
  std::vector<int> newton_iterations;
  std::vector<double> newton_residual;
  std::vector<double> bow_v_rel;       // NaN when no bow is active
  std::vector<double> bow_force;       // F_B phi(v_rel)
  std::vector<double> hammer_force;    // F_H, 0 when no hammer is active
  int max_iterations = 0;
  double max_residual = 0.0;
};

struct Provenance {
  SimulationConfig config;
  std::uint64_t seed = 0;
  Grid grid;
  std::string engine_version = kEngineVersion;
};

struct RenderResult {
  std::vector<double> samples;
  std::optional<Eigen::MatrixXd> u_field;     // one row per sample, interior nodes
  std::optional<Eigen::MatrixXd> zeta_field;
  StepDiagnostics diagnostics;
  Provenance provenance;
  std::vector<std::string> warnings;
};

/// One string simulation. Strictly sequential; independent instances may run
/// concurrently and share an OperatorSet.
class StringEngine {
 public:
  explicit StringEngine(const SimulationConfig& config,
                        std::shared_ptr<const OperatorSet> ops = nullptr);

  const Grid& grid() const { return ops_->grid; }
  const OperatorSet& operators() const { return *ops_; }
  const SchemeAssembler& assembler() const { return assembler_; }
  const StringState& state() const { return state_; }
  void set_state(const StringState& state);
  const HammerState& hammer_state() const { return hammer_; }

  /// Readout of the current level w_curr.
  double readout() const { return readout_of(state_.w_curr); }
  double readout_of(const Eigen::VectorXd& w) const;

  struct StepReport {
    int iterations = 0;
    double residual = 0.0;
    double bow_v_rel = 0.0;
    double bow_force = 0.0;
    double hammer_force = 0.0;
    bool bow_active = false;
    bool hammer_active = false;
  };

  /// Advances by one time step with excitation coupling.
  StepReport advance();

  /// Transverse forcing vector (k^2 times the force density) applied in the
  /// last step; empty when no excitation was active.
  const std::vector<double>& last_forcing() const { return last_forcing_; }

 private:
  void refactorize_if_needed(const BlockSystem& system);
  Eigen::VectorXd contact_response(const PointOperator& spread);

  SimulationConfig config_;
  std::shared_ptr<const OperatorSet> ops_;
  SchemeAssembler assembler_;
  std::unique_ptr<LinearSolver> solver_;
  bool factorized_ = false;
  StringState state_;
  HammerState hammer_;
  std::optional<std::size_t> hammer_index_;
  double last_v_rel_ = 0.0;
  PointOperator readout_t_;
  PointOperator readout_l_;
  std::vector<double> last_forcing_;
};

/// Runs the full simulation. Throws std::invalid_argument for an invalid
/// config and SimulationError for divergence, non-finite states or Newton
/// non-convergence.
RenderResult render(const SimulationConfig& config, const RenderOptions& options = {});

/// Initial levels (w0, w1) for a config: the sum of all plucks, or rest.
std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_levels(const SimulationConfig& config,
                                                           const Grid& grid);

}  // namespace nlstring
