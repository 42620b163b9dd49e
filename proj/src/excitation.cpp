#include "nlstring/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nlstring/errors.hpp"

namespace nlstring {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double friction_curve(double v_rel, double a, double eps) {
  return sign(v_rel) * (eps + (1.0 - eps) * std::exp(-a * std::abs(v_rel)));
}

double friction_curve_slope(double v_rel, double a, double eps) {
  return -(1.0 - eps) * a * std::exp(-a * std::abs(v_rel));
}

Eigen::VectorXd pluck_shape(const PluckSpec& spec, const Grid& grid) {
  const int n = grid.n_t;
  const double h = grid.h_t;
  const int centre = std::clamp(static_cast<int>(std::lround(spec.position / h)), 1, n - 1);
  const double xc = centre * h;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n - 1);
  for (int i = 1; i < n; ++i) {
    const double d = i * h - xc;
    if (std::abs(d) < spec.width / 2.0) {
      u[i - 1] = spec.amplitude / 2.0 * (1.0 + std::cos(2.0 * std::numbers::pi * d / spec.width));
    }
  }
  u[centre - 1] = spec.amplitude;
  return u;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> pluck_init(const PluckSpec& spec, const Grid& grid) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.unknowns());
  w.head(grid.transverse_unknowns()) = pluck_shape(spec, grid);
  return {w, w};
}

BowResult bow_couple(double v_free, double bow_velocity, double force, double gain, double k,
                     double sharpness, double offset, const SolverSettings& solver, long step,
                     double previous_v_rel) {
  BowResult out;
  const double tol = solver.newton_tol * std::max(1.0, std::abs(bow_velocity));
  if (force == 0.0) {
    out.v_rel = v_free;
    out.iterations = 1;
    return out;
  }
  const double c = k * force * gain / 2.0;

  // Positive branch; phi is odd so the negative case mirrors it.
  const double s = v_free >= 0.0 ? 1.0 : -1.0;
  const double target = std::abs(v_free);
  auto residual = [&](double v) { return v + c * friction_curve(v, sharpness, offset) - target; };

  // Below the dip of v + c phi(v) the residual is not monotone; v_dip is its minimum.
  const double depth = sharpness * c * (1.0 - offset);
  const double v_dip = depth > 1.0 ? std::log(depth) / sharpness : 0.0;
  const bool slipping_same_side = previous_v_rel * s > 0.0;
  const bool slip_root = target > c || (slipping_same_side && v_dip > 0.0 && residual(v_dip) <= 0.0);
  if (!slip_root) {
    out.sticking = true;
    out.v_rel = 0.0;
    out.force_factor = c > 0.0 ? v_free / c : 0.0;
    out.force = force * out.force_factor;
    out.iterations = 1;
    return out;
  }

  double lo = v_dip;
  double hi = target;
  double v = std::clamp(s * previous_v_rel, lo, hi);
  if (!(v > lo)) v = hi;
  double r = residual(v);
  int it = 0;
  while (std::abs(r) > tol) {
    if (++it > solver.newton_max_iter) {
      throw SimulationError(SimulationError::Kind::non_convergence, step,
                            fmt::format("bow: |r| = {:.3e} after {} iterations", std::abs(r),
                                        solver.newton_max_iter));
    }
    if (r > 0.0) hi = v; else lo = v;
    const double slope = 1.0 + c * friction_curve_slope(v, sharpness, offset);
    double next = slope > 0.0 ? v - r / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    v = next;
    r = residual(v);
  }
  out.v_rel = s * v;
  out.force_factor = friction_curve(out.v_rel, sharpness, offset);
  out.force = force * out.force_factor;
  out.iterations = std::max(it, 1);
  out.residual = std::abs(r);
  return out;
}

HammerState hammer_launch(const HammerSpec& spec, double k) {
  HammerState s;
  s.u_prev = spec.displacement;
  s.u_curr = spec.displacement + k * spec.velocity;
  s.launched = true;
  return s;
}

HammerState hammer_free_flight(const HammerState& state) {
  HammerState next = state;
  next.u_prev = state.u_curr;
  next.u_curr = 2.0 * state.u_curr - state.u_prev;
  next.last_force = 0.0;
  return next;
}

HammerResult hammer_couple(const HammerSpec& spec, const HammerState& state, double eta_curr,
                           double eta_prev, double eta_free, double gain, double k) {
  HammerResult out;
  out.iterations = 1;
  if (!(eta_curr > 0.0)) {
    out.next = hammer_free_flight(state);
    return out;
  }
  const double c = std::pow(spec.stiffness, 1.0 + spec.exponent) *
                   std::pow(eta_curr, spec.exponent - 1.0);
  const double f = c * (eta_free + eta_prev) / 2.0 /
                   (1.0 + c * k * k * (1.0 + spec.mass_ratio * gain) / 2.0);
  out.force = std::max(0.0, f);
  out.contact = out.force > 0.0;
  out.next.u_prev = state.u_curr;
  out.next.u_curr = 2.0 * state.u_curr - state.u_prev - k * k * out.force;
  out.next.last_force = out.force;
  out.next.launched = true;
  return out;
}

ActiveSet excitation_schedule(const std::vector<ExcitationSpec>& excitations, double t) {
  ActiveSet set;
  for (std::size_t i = 0; i < excitations.size(); ++i) {
    if (const auto* b = std::get_if<BowSpec>(&excitations[i])) {
      if (t >= b->start && t < b->end && !set.bow) set.bow = i;
    } else if (const auto* h = std::get_if<HammerSpec>(&excitations[i])) {
      if (t >= h->start && t < h->end && !set.hammer) set.hammer = i;
    }
  }
  return set;
}

}  // namespace nlstring
