#include "nlstring/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "nlstring/errors.hpp"

namespace nlstring {

namespace {

constexpr double kDivergenceFactor = 1e6;

std::shared_ptr<const OperatorSet> operators_for(const SimulationConfig& config) {
  return std::make_shared<const OperatorSet>(
      build_operators(grid_for(config), config.interpolation_order, config.boundary));
}

double transverse_dot(const PointOperator& op, const Eigen::VectorXd& w) {
  double s = 0.0;
  for (const auto& [i, weight] : op.entries) s += weight * w[i];
  return s;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_levels(const SimulationConfig& config,
                                                           const Grid& grid) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.unknowns());
  for (const auto& ex : config.excitations) {
    if (const auto* p = std::get_if<PluckSpec>(&ex)) {
      w.head(grid.transverse_unknowns()) += pluck_shape(*p, grid);
    }
  }
  return {w, w};
}

StringEngine::StringEngine(const SimulationConfig& config, std::shared_ptr<const OperatorSet> ops)
    : config_(config),
      ops_(ops ? std::move(ops) : operators_for(config)),
      assembler_(config.string, ops_) {
  solver_ = make_linear_solver(config.solver.linear_solver, assembler_.unknown_positions());
  auto [w0, w1] = initial_levels(config_, ops_->grid);
  state_.w_prev = std::move(w0);
  state_.w_curr = std::move(w1);
  state_.step = 1;
  readout_t_ = ops_->read(config_.readout_position);
  readout_l_ = ops_->read_longitudinal(config_.readout_position);
}

void StringEngine::set_state(const StringState& state) {
  const auto n = static_cast<Eigen::Index>(ops_->grid.unknowns());
  if (state.w_prev.size() != n || state.w_curr.size() != n) {
    throw std::invalid_argument("state length does not match the grid");
  }
  state_ = state;
}

double StringEngine::readout_of(const Eigen::VectorXd& w) const {
  double y = 0.0;
  if (config_.readout_mix[0] != 0.0) y += config_.readout_mix[0] * transverse_dot(readout_t_, w);
  if (config_.readout_mix[1] != 0.0) {
    const int nt = ops_->grid.transverse_unknowns();
    double z = 0.0;
    for (const auto& [i, weight] : readout_l_.entries) z += weight * w[nt + i];
    y += config_.readout_mix[1] * z;
  }
  return y;
}

void StringEngine::refactorize_if_needed(const BlockSystem& system) {
  if (assembler_.is_linear() && factorized_) return;
  try {
    solver_->factorize(system.A);
  } catch (const SingularMatrixError& e) {
    throw SimulationError(SimulationError::Kind::singular_system, state_.step + 1, e.what());
  }
  factorized_ = true;
}

Eigen::VectorXd StringEngine::contact_response(const PointOperator& spread) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ops_->grid.unknowns());
  for (const auto& [i, weight] : spread.entries) rhs[i] += weight;
  Eigen::VectorXd g;
  solver_->solve(rhs, g);
  return g;
}

StringEngine::StepReport StringEngine::advance() {
  const double k = ops_->grid.k;
  const long n = state_.step;
  const double t = static_cast<double>(n) * k;
  const auto& settings = config_.solver;

  BlockSystem local;
  const BlockSystem* system = &assembler_.linear_system();
  if (!assembler_.is_linear()) {
    local = assembler_.assemble(state_);
    system = &local;
  }
  refactorize_if_needed(*system);

  Eigen::VectorXd w_free;
  solver_->solve(free_rhs(state_, *system), w_free);

  StepReport report;
  const ActiveSet active = excitation_schedule(config_.excitations, t);
  last_forcing_.clear();

  const BowSpec* bow = active.bow ? &std::get<BowSpec>(config_.excitations[*active.bow]) : nullptr;
  const HammerSpec* hammer =
      active.hammer ? &std::get<HammerSpec>(config_.excitations[*active.hammer]) : nullptr;

  if (hammer && hammer_index_ != active.hammer) {
    hammer_ = hammer_launch(*hammer, k);
    hammer_index_ = active.hammer;
  }
  if (!hammer) {
    hammer_index_.reset();
    hammer_ = HammerState{};
  }

  double bow_force_amp = bow ? bow->force.at(t) : 0.0;
  if (bow && bow_force_amp == 0.0) bow = nullptr;

  PointOperator bow_read, bow_spread, hammer_read, hammer_spread;
  Eigen::VectorXd g_bow, g_hammer;
  double gain_bow = 0.0, gain_hammer = 0.0, bow_velocity = 0.0;
  if (bow) {
    const double x = bow->position.at(t);
    bow_read = ops_->read(x);
    bow_spread = ops_->spread(x);
    g_bow = contact_response(bow_spread);
    gain_bow = transverse_dot(bow_read, g_bow);
    bow_velocity = bow->velocity.at(t);
  }
  double eta_curr = 0.0, eta_prev = 0.0;
  if (hammer) {
    hammer_read = ops_->read(hammer->position);
    hammer_spread = ops_->spread(hammer->position);
    g_hammer = contact_response(hammer_spread);
    gain_hammer = transverse_dot(hammer_read, g_hammer);
    eta_curr = hammer_.u_curr - transverse_dot(hammer_read, state_.w_curr);
    eta_prev = hammer_.u_prev - transverse_dot(hammer_read, state_.w_prev);
  }

  const double k2 = k * k;
  double f_bow = 0.0;
  double f_hammer = 0.0;
  HammerResult hammer_result;
  BowResult bow_result;
  if (bow || hammer) {
    const int passes = (bow && hammer) ? settings.newton_max_iter : 1;
    bool converged = false;
    for (int pass = 0; pass < passes && !converged; ++pass) {
      double new_hammer = f_hammer;
      double new_bow = f_bow;
      if (hammer) {
        double eta_free = 2.0 * hammer_.u_curr - hammer_.u_prev - transverse_dot(hammer_read, w_free);
        if (bow) eta_free += k2 * f_bow * transverse_dot(hammer_read, g_bow);
        hammer_result = hammer_couple(*hammer, hammer_, eta_curr, eta_prev, eta_free, gain_hammer, k);
        new_hammer = hammer_result.force;
        report.iterations += hammer_result.iterations;
      }
      if (bow) {
        double moved = transverse_dot(bow_read, w_free) - transverse_dot(bow_read, state_.w_prev);
        if (hammer) moved += k2 * hammer->mass_ratio * new_hammer * transverse_dot(bow_read, g_hammer);
        const double v_free = moved / (2.0 * k) - bow_velocity;
        bow_result = bow_couple(v_free, bow_velocity, bow_force_amp, gain_bow, k, bow->sharpness,
                                bow->offset, settings, n + 1, last_v_rel_);
        new_bow = bow_result.force;
        report.iterations += bow_result.iterations;
        report.residual = std::max(report.residual, bow_result.residual);
      }
      const double tol = settings.newton_tol;
      converged = std::abs(new_bow - f_bow) <= tol * std::max(1.0, std::abs(new_bow)) &&
                  std::abs(new_hammer - f_hammer) <= tol * std::max(1.0, std::abs(new_hammer));
      f_bow = new_bow;
      f_hammer = new_hammer;
      if (passes == 1) converged = true;
    }
    if (!converged) {
      throw SimulationError(SimulationError::Kind::non_convergence, n + 1,
                            "bow and hammer coupling did not converge");
    }

    last_forcing_.assign(static_cast<std::size_t>(ops_->grid.transverse_unknowns()), 0.0);
    if (bow) {
      w_free.noalias() -= (k2 * f_bow) * g_bow;
      bow_spread.add_to(last_forcing_, -k2 * f_bow);
      last_v_rel_ = bow_result.v_rel;
      report.bow_active = true;
      report.bow_v_rel = bow_result.v_rel;
      report.bow_force = f_bow;
    }
    if (hammer) {
      w_free.noalias() += (k2 * hammer->mass_ratio * f_hammer) * g_hammer;
      hammer_spread.add_to(last_forcing_, k2 * hammer->mass_ratio * f_hammer);
      hammer_ = hammer_result.next;
      report.hammer_active = true;
      report.hammer_force = f_hammer;
    }
  }

  if (!w_free.allFinite()) {
    throw SimulationError(SimulationError::Kind::non_finite, n + 1, "state contains NaN or Inf");
  }
  state_.w_prev.swap(state_.w_curr);
  state_.w_curr = std::move(w_free);
  state_.step = n + 1;
  return report;
}

RenderResult render(const SimulationConfig& config, const RenderOptions& options) {
  const ValidationReport report = validate(config);
  if (!report.ok()) throw std::invalid_argument(report.summary());

  StringEngine engine(config);
  RenderResult result;
  result.provenance.config = config;
  result.provenance.seed = config.seed;
  result.provenance.grid = engine.grid();

  const long total = config.step_count();
  const int nt = engine.grid().transverse_unknowns();
  const int nl = engine.grid().longitudinal_unknowns();
  result.samples.reserve(static_cast<std::size_t>(total));
  auto& diag = result.diagnostics;
  if (options.record_fields) {
    result.u_field = Eigen::MatrixXd::Zero(total, nt);
    result.zeta_field = Eigen::MatrixXd::Zero(total, nl);
  }

  const double initial_peak =
      std::max(engine.state().w_prev.lpNorm<Eigen::Infinity>(),
               engine.state().w_curr.lpNorm<Eigen::Infinity>());
  const double limit = kDivergenceFactor * std::max(initial_peak, 1e-6);
  bool growth_warned = false;

  auto record = [&](const Eigen::VectorXd& w, const StringEngine::StepReport& r) {
    const auto row = static_cast<Eigen::Index>(result.samples.size());
    result.samples.push_back(engine.readout_of(w));
    diag.newton_iterations.push_back(r.iterations);
    diag.newton_residual.push_back(r.residual);
    diag.bow_v_rel.push_back(r.bow_active ? r.bow_v_rel : std::numeric_limits<double>::quiet_NaN());
    diag.bow_force.push_back(r.bow_force);
    diag.hammer_force.push_back(r.hammer_force);
    diag.max_iterations = std::max(diag.max_iterations, r.iterations);
    diag.max_residual = std::max(diag.max_residual, r.residual);
    if (options.record_fields) {
      result.u_field->row(row) = w.head(nt).transpose();
      result.zeta_field->row(row) = w.tail(nl).transpose();
    }
  };

  if (total >= 1) record(engine.state().w_prev, {});
  if (total >= 2) record(engine.state().w_curr, {});
  for (long n = 2; n < total; ++n) {
    const auto r = engine.advance();
    const double peak = engine.state().w_curr.lpNorm<Eigen::Infinity>();
    if (peak > limit) {
      throw SimulationError(SimulationError::Kind::divergence, engine.state().step,
                            fmt::format("max |w| = {:.3e} exceeds {:.3e}", peak, limit));
    }
    if (!growth_warned && initial_peak > 0.0 && peak > 10.0 * initial_peak) {
      result.warnings.push_back(
          fmt::format("step {}: displacement exceeded 10x the initial peak", engine.state().step));
      growth_warned = true;
    }
    record(engine.state().w_curr, r);
  }
  return result;
}

}  // namespace nlstring
