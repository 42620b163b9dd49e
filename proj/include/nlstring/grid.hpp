#pragma once

#include <stdexcept>
#include <string>

#include "nlstring/params.hpp"

namespace nlstring {

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spatio-temporal grid. The unit-length string is split into n_t transverse
/// and n_l longitudinal intervals; state vectors hold interior nodes only.
struct Grid {
  double k = 0.0;    // time step, s
  double h_t = 0.0;  // transverse spacing
  double h_l = 0.0;  // longitudinal spacing
  int n_t = 0;
  int n_l = 0;

  int transverse_unknowns() const { return n_t - 1; }
  int longitudinal_unknowns() const { return n_l - 1; }
  int unknowns() const { return transverse_unknowns() + longitudinal_unknowns(); }

  bool operator==(const Grid&) const = default;
};

/// Smallest stable transverse spacing of the theta-scheme with stiffness:
///   h^2 = (g^2 k^2 + sqrt(g^4 k^4 + 16 (2 theta - 1) kappa^2 k^2)) / (2 (2 theta - 1)).
/// For theta = 1 this is the classic explicit stiff-string bound.
double min_transverse_spacing(const StringParams& params, double k);

/// Smallest stable longitudinal spacing, gamma * alpha * k.
double min_longitudinal_spacing(const StringParams& params, double k);

/// Left-hand side of the transverse stability condition,
///   g^2 k^2 / h^2 + 4 kappa^2 k^2 / h^4  <=  2 theta - 1.
double transverse_stability_number(const StringParams& params, double k, double h_t);

/// Coarsest stable grid: n = floor(1 / h_min), h = 1 / n.
/// Throws GridError when either subsystem would get fewer than 3 intervals.
Grid compute_grid(const StringParams& params, double sample_rate);

/// Grid with explicit interval counts (no stability check; see check_grid).
Grid make_grid(double sample_rate, int n_t, int n_l);

/// Returns stability violations of an arbitrary grid for the given parameters.
ValidationReport check_grid(const Grid& grid, const StringParams& params);

/// Grid implied by a config (honours interval overrides).
Grid grid_for(const SimulationConfig& config);

}  // namespace nlstring
