#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlstring/excitation_spec.hpp"
#include "nlstring/grid.hpp"
#include "nlstring/operators.hpp"
#include "nlstring/params.hpp"

namespace nlstring {

/// sign(v) * (eps + (1 - eps) * exp(-a |v|)), with sign(0) = 0.
double friction_curve(double v_rel, double a, double eps);

/// Derivative of friction_curve away from v_rel = 0.
double friction_curve_slope(double v_rel, double a, double eps);

/// Raised-cosine pluck sampled on the transverse interior nodes.
Eigen::VectorXd pluck_shape(const PluckSpec& spec, const Grid& grid);

/// Initial levels (w0, w1) of the stacked state; zero velocity, zeta = 0.
std::pair<Eigen::VectorXd, Eigen::VectorXd> pluck_init(const PluckSpec& spec, const Grid& grid);

/// Linear response of one point excitation for the current step: the change of
/// w^{n+1} per unit of k^2 * (force amplitude) spread at the contact point.
struct ContactResponse {
  PointOperator read;        // I_p(x) on the transverse grid
  Eigen::VectorXd response;  // A^{-1} [J_p(x); 0]
  double gain = 0.0;         // read . response (transverse part)
};

struct BowResult {
  double force_factor = 0.0;  // phi at the converged v_rel (stick: v_free / c)
  double v_rel = 0.0;
  double force = 0.0;         // F_B * force_factor, acts as -J_B * force on u
  int iterations = 0;
  double residual = 0.0;
  bool sticking = false;
};

/// Solves the bow-string relative velocity for one step.
///
/// `v_free` is the relative velocity the string would have without the bow
/// (A^{-1} of every other term, minus the bow velocity). With c = k F a / 2 the
/// residual is r(v) = v + c phi(v) - v_free. Where several roots exist the
/// previous state decides: a string that was slipping keeps slipping on the
/// same side while a slip root exists, otherwise it sticks (v_rel = 0, force
/// factor v_free / c). Slip roots are found by Newton with bisection fallback
/// on a bracket over the monotone part of the residual.
/// Throws SimulationError on non-convergence.
BowResult bow_couple(double v_free, double bow_velocity, double force, double gain, double k,
                     double sharpness, double offset, const SolverSettings& solver, long step,
                     double previous_v_rel = 0.0);

struct HammerState {
  double u_prev = 0.0;
  double u_curr = 0.0;
  double last_force = 0.0;
  bool launched = false;
};

struct HammerResult {
  double force = 0.0;  // F_H >= 0; acts as +J_H * mass_ratio * force on u
  HammerState next;
  int iterations = 0;
  bool contact = false;
};

/// Contact force of the lumped-mass hammer for one step.
///
/// `eta_free` is u_H^{n+1} - I_H u^{n+1} with F_H = 0 and `eta_prev` the
/// distance at n - 1. The force is linear in eta^{n+1} once the gate
/// ([eta^n]^+)^{alpha_H - 1} is frozen, so the joint solve has a closed form;
/// it is clamped to F_H >= 0.
HammerResult hammer_couple(const HammerSpec& spec, const HammerState& state, double eta_curr,
                           double eta_prev, double eta_free, double gain, double k);

/// Ballistic hammer update (no contact).
HammerState hammer_free_flight(const HammerState& state);

/// Hammer state at its launch step: u_H = u_h0 one level back, u_h0 + k v_h0 now.
HammerState hammer_launch(const HammerSpec& spec, double k);

struct ActiveSet {
  std::optional<std::size_t> bow;     // index into the excitation list
  std::optional<std::size_t> hammer;

  bool empty() const { return !bow && !hammer; }
  std::size_t size() const { return (bow ? 1u : 0u) + (hammer ? 1u : 0u); }
};

/// Excitations contributing a force for the step that starts at time t.
/// Plucks never appear; bows and hammers are active on [start, end).
ActiveSet excitation_schedule(const std::vector<ExcitationSpec>& excitations, double t);

}  // namespace nlstring
