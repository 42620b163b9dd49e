#include "nlstring/grid.hpp"

#include <cmath>

#include <fmt/format.h>

namespace nlstring {

namespace {

constexpr int kMinIntervals = 3;
// Relative slack on spacing comparisons; h = 1/n is rarely exactly h_min.
constexpr double kSpacingSlack = 1e-12;

int interval_count(double h_min) {
  return static_cast<int>(std::floor(1.0 / h_min + 1e-9));
}

}  // namespace

double min_transverse_spacing(const StringParams& p, double k) {
  const double c = 2.0 * p.theta - 1.0;
  if (!(c > 0.0)) {
    throw GridError(fmt::format("theta = {} admits no stable transverse spacing", p.theta));
  }
  const double g2k2 = p.gamma * p.gamma * k * k;
  const double radicand = g2k2 * g2k2 + 16.0 * c * p.kappa * p.kappa * k * k;
  return std::sqrt((g2k2 + std::sqrt(radicand)) / (2.0 * c));
}

double min_longitudinal_spacing(const StringParams& p, double k) {
  return p.gamma * p.alpha * k;
}

double transverse_stability_number(const StringParams& p, double k, double h_t) {
  const double h2 = h_t * h_t;
  return p.gamma * p.gamma * k * k / h2 + 4.0 * p.kappa * p.kappa * k * k / (h2 * h2);
}

Grid make_grid(double sample_rate, int n_t, int n_l) {
  if (n_t < kMinIntervals || n_l < kMinIntervals) {
    throw GridError(fmt::format("grid needs at least {} intervals per subsystem (got n_t={}, n_l={})",
                                kMinIntervals, n_t, n_l));
  }
  Grid g;
  g.k = 1.0 / sample_rate;
  g.n_t = n_t;
  g.n_l = n_l;
  g.h_t = 1.0 / n_t;
  g.h_l = 1.0 / n_l;
  return g;
}

Grid compute_grid(const StringParams& params, double sample_rate) {
  if (!(sample_rate > 0.0)) throw GridError("sample_rate must be > 0");
  const double k = 1.0 / sample_rate;
  const double ht_min = min_transverse_spacing(params, k);
  const double hl_min = min_longitudinal_spacing(params, k);
  if (!(ht_min > 0.0) || !(hl_min > 0.0)) throw GridError("grid spacing must be positive");
  const int n_t = interval_count(ht_min);
  const int n_l = interval_count(hl_min);
  if (n_t < kMinIntervals || n_l < kMinIntervals) {
    throw GridError(fmt::format(
        "parameters too extreme for sample rate {}: n_t={}, n_l={} (need >= {})", sample_rate,
        n_t, n_l, kMinIntervals));
  }
  return make_grid(sample_rate, n_t, n_l);
}

ValidationReport check_grid(const Grid& grid, const StringParams& params) {
  ValidationReport report;
  if (grid.n_t < kMinIntervals || grid.n_l < kMinIntervals) {
    report.violations.push_back("grid needs at least 3 intervals per subsystem");
    return report;
  }
  double ht_min = 0.0;
  try {
    ht_min = min_transverse_spacing(params, grid.k);
  } catch (const GridError& e) {
    report.violations.emplace_back(e.what());
    return report;
  }
  const double hl_min = min_longitudinal_spacing(params, grid.k);
  if (grid.h_t < ht_min * (1.0 - kSpacingSlack)) {
    report.violations.push_back(fmt::format(
        "transverse spacing h_t={:.6g} below stability limit {:.6g}", grid.h_t, ht_min));
  }
  if (grid.h_l < hl_min * (1.0 - kSpacingSlack)) {
    report.violations.push_back(fmt::format(
        "longitudinal spacing h_l={:.6g} below stability limit {:.6g}", grid.h_l, hl_min));
  }
  return report;
}

Grid grid_for(const SimulationConfig& config) {
  if (config.transverse_intervals == 0 && config.longitudinal_intervals == 0) {
    return compute_grid(config.string, config.sample_rate);
  }
  const Grid auto_grid = compute_grid(config.string, config.sample_rate);
  const int n_t = config.transverse_intervals > 0 ? config.transverse_intervals : auto_grid.n_t;
  const int n_l = config.longitudinal_intervals > 0 ? config.longitudinal_intervals : auto_grid.n_l;
  return make_grid(config.sample_rate, n_t, n_l);
}

}  // namespace nlstring
