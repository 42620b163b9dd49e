#include "nlstring/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "nlstring/grid.hpp"

namespace nlstring {

Envelope::Envelope(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  if (!std::is_sorted(points_.begin(), points_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; })) {
    throw std::invalid_argument("envelope breakpoints must be sorted by time");
  }
}

Envelope Envelope::constant(double value) { return Envelope({{0.0, value}}); }

double Envelope::at(double t) const {
  if (points_.empty()) return 0.0;
  if (t <= points_.front().first) return points_.front().second;
  if (t >= points_.back().first) return points_.back().second;
  const auto upper = std::upper_bound(points_.begin(), points_.end(), t,
                                      [](double x, const auto& p) { return x < p.first; });
  const auto lower = std::prev(upper);
  const double span = upper->first - lower->first;
  if (span <= 0.0) return upper->second;
  const double w = (t - lower->first) / span;
  return lower->second + w * (upper->second - lower->second);
}

double Envelope::min_value() const {
  double m = points_.empty() ? 0.0 : points_.front().second;
  for (const auto& p : points_) m = std::min(m, p.second);
  return m;
}

double Envelope::max_value() const {
  double m = points_.empty() ? 0.0 : points_.front().second;
  for (const auto& p : points_) m = std::max(m, p.second);
  return m;
}

std::string excitation_kind(const ExcitationSpec& spec) {
  struct Visitor {
    std::string operator()(const PluckSpec&) const { return "pluck"; }
    std::string operator()(const BowSpec&) const { return "bow"; }
    std::string operator()(const HammerSpec&) const { return "hammer"; }
  };
  return std::visit(Visitor{}, spec);
}

StringParams from_f0(double f0, StringParams base) {
  if (!(f0 > 0.0) || !std::isfinite(f0)) {
    throw std::invalid_argument(fmt::format("f0 must be > 0 (got {})", f0));
  }
  base.gamma = 2.0 * f0;
  return base;
}

std::string to_string(LinearSolverKind kind) {
  return kind == LinearSolverKind::direct_banded ? "direct-banded" : "direct-sparse";
}

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::clamped ? "clamped" : "simply-supported";
}

LinearSolverKind parse_linear_solver(const std::string& name) {
  if (name == "direct-banded" || name == "banded") return LinearSolverKind::direct_banded;
  if (name == "direct-sparse" || name == "sparse") return LinearSolverKind::direct_sparse;
  throw std::invalid_argument("unknown linear solver '" + name + "'");
}

BoundaryCondition parse_boundary(const std::string& name) {
  if (name == "clamped") return BoundaryCondition::clamped;
  if (name == "simply-supported" || name == "simply_supported") {
    return BoundaryCondition::simply_supported;
  }
  throw std::invalid_argument("unknown boundary condition '" + name + "'");
}

long SimulationConfig::step_count() const {
  return static_cast<long>(std::llround(duration * sample_rate));
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out;
}

namespace {

bool inside_unit(double x) { return x > 0.0 && x < 1.0; }

struct Window {
  double start;
  double end;
};

bool overlaps(const Window& a, const Window& b) {
  return a.start < b.end && b.start < a.end;
}

void check_string(const StringParams& s, std::vector<std::string>& out) {
  if (!(s.gamma > 0.0)) out.push_back("gamma must be > 0");
  if (!(s.kappa >= 0.0)) out.push_back("kappa must be >= 0");
  if (!(s.alpha >= 1.0)) out.push_back("alpha must be >= 1");
  if (!(s.sigma0_t >= 0.0) || !(s.sigma1_t >= 0.0) || !(s.sigma0_l >= 0.0) ||
      !(s.sigma1_l >= 0.0)) {
    out.push_back("loss coefficients must be >= 0");
  }
  if (!(s.theta >= 0.5)) out.push_back("theta must be >= 1/2");
}

void check_excitations(const SimulationConfig& c, std::vector<std::string>& out) {
  std::vector<Window> bows;
  std::vector<Window> hammers;
  for (const auto& spec : c.excitations) {
    if (const auto* p = std::get_if<PluckSpec>(&spec)) {
      if (!(p->amplitude > 0.0)) out.push_back("pluck amplitude must be > 0");
      if (!inside_unit(p->position)) out.push_back("pluck position must lie in (0, 1)");
      const double max_width = 2.0 * std::min(p->position, 1.0 - p->position);
      if (!(p->width > 0.0) || p->width > max_width * (1.0 + 1e-12)) {
        out.push_back(fmt::format("pluck width must lie in (0, {:.6g}]", max_width));
      }
    } else if (const auto* b = std::get_if<BowSpec>(&spec)) {
      if (!(b->start >= 0.0) || !(b->end > b->start)) out.push_back("bow window must satisfy 0 <= start < end");
      if (b->position.empty() || b->velocity.empty() || b->force.empty()) {
        out.push_back("bow envelopes must not be empty");
        continue;
      }
      if (!inside_unit(b->position.min_value()) || !inside_unit(b->position.max_value())) {
        out.push_back("bow position must lie in (0, 1)");
      }
      if (!(b->force.min_value() >= 0.0)) out.push_back("bow force must be >= 0");
      if (!(b->sharpness >= 0.0)) out.push_back("bow sharpness a must be >= 0");
      if (!(b->offset >= 0.0 && b->offset <= 1.0)) out.push_back("bow offset epsilon must lie in [0, 1]");
      bows.push_back({b->start, b->end});
    } else if (const auto* h = std::get_if<HammerSpec>(&spec)) {
      if (!(h->start >= 0.0) || !(h->end > h->start)) out.push_back("hammer window must satisfy 0 <= start < end");
      if (!inside_unit(h->position)) out.push_back("hammer position must lie in (0, 1)");
      if (!(h->mass_ratio > 0.0)) out.push_back("hammer mass ratio must be > 0");
      if (!(h->stiffness > 0.0)) out.push_back("hammer stiffness must be > 0");
      if (!(h->exponent >= 1.0)) out.push_back("hammer exponent must be >= 1");
      if (!std::isfinite(h->displacement) || !std::isfinite(h->velocity)) {
        out.push_back("hammer initial state must be finite");
      }
      hammers.push_back({h->start, h->end});
    }
  }
  auto any_overlap = [](const std::vector<Window>& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = i + 1; j < w.size(); ++j)
        if (overlaps(w[i], w[j])) return true;
    return false;
  };
  if (any_overlap(bows)) out.push_back("bow windows must not overlap");
  if (any_overlap(hammers)) out.push_back("hammer windows must not overlap");
}

}  // namespace

ValidationReport validate(const SimulationConfig& c) {
  ValidationReport report;
  auto& out = report.violations;
  check_string(c.string, out);
  if (!(c.sample_rate > 0.0) || !std::isfinite(c.sample_rate)) out.push_back("sample_rate must be > 0");
  if (!(c.duration >= 0.0) || !std::isfinite(c.duration)) out.push_back("duration must be >= 0");
  if (!inside_unit(c.readout_position)) out.push_back("readout position must lie in (0, 1)");
  if (!std::isfinite(c.readout_mix[0]) || !std::isfinite(c.readout_mix[1])) {
    out.push_back("readout mix must be finite");
  }
  if (c.interpolation_order < 1) out.push_back("interpolation order must be >= 1");
  if (!(c.solver.newton_tol > 0.0)) out.push_back("newton_tol must be > 0");
  if (c.solver.newton_max_iter < 1) out.push_back("newton_max_iter must be >= 1");
  if (c.transverse_intervals < 0 || c.longitudinal_intervals < 0) {
    out.push_back("interval overrides must be >= 0");
  }
  check_excitations(c, out);

  // Grid checks only make sense once the scalar parameters are sane.
  if (out.empty()) {
    try {
      const Grid grid = grid_for(c);
      const auto stability = check_grid(grid, c.string);
      out.insert(out.end(), stability.violations.begin(), stability.violations.end());
      if (c.interpolation_order > std::min(grid.n_t, grid.n_l)) {
        out.push_back(fmt::format("interpolation order {} exceeds available grid points",
                                  c.interpolation_order));
      }
    } catch (const GridError& e) {
      out.emplace_back(e.what());
    }
  }
  return report;
}

}  // namespace nlstring
