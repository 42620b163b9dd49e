#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "nlstring/excitation_spec.hpp"

namespace nlstring {

/// Implicit-scheme parameter that minimises numerical dispersion, (1 + 4/pi^2) / 2.
inline constexpr double kDefaultTheta = (1.0 + 4.0 / (std::numbers::pi * std::numbers::pi)) / 2.0;

/// Normalised string parameters (unit-length domain).
///
/// gamma  wave speed, 1/s; the ideal string sounds at gamma / 2.
/// kappa  stiffness, 1/s.
/// alpha  stiffness-to-tension ratio; alpha == 1 removes the nonlinear coupling.
/// sigma0_*, sigma1_*  frequency-independent and frequency-dependent loss of the
///        transverse (t) and longitudinal (l) subsystems.
/// theta  free parameter of the implicit transverse scheme, >= 1/2.
struct StringParams {
  double gamma = 600.0;
  double kappa = 0.0;
  double alpha = 1.0;
  double sigma0_t = 0.0;
  double sigma1_t = 0.0;
  double sigma0_l = 0.0;
  double sigma1_l = 0.0;
  double theta = kDefaultTheta;

  double fundamental_frequency() const { return gamma / 2.0; }

  bool operator==(const StringParams&) const = default;
};

/// Returns `base` with gamma = 2 f0. Throws std::invalid_argument for f0 <= 0.
StringParams from_f0(double f0, StringParams base = {});

enum class LinearSolverKind { direct_banded, direct_sparse };
enum class BoundaryCondition { clamped, simply_supported };

std::string to_string(LinearSolverKind kind);
std::string to_string(BoundaryCondition bc);
LinearSolverKind parse_linear_solver(const std::string& name);
BoundaryCondition parse_boundary(const std::string& name);

struct SolverSettings {
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  LinearSolverKind linear_solver = LinearSolverKind::direct_banded;

  bool operator==(const SolverSettings&) const = default;
};

struct SimulationConfig {
  StringParams string;
  double sample_rate = 48000.0;
  double duration = 1.0;
  std::vector<ExcitationSpec> excitations;
  double readout_position = 0.3;
  std::array<double, 2> readout_mix{1.0, 0.0};  // weights of (u, zeta)
  int interpolation_order = 3;
  BoundaryCondition boundary = BoundaryCondition::clamped;
  SolverSettings solver;
  // Interval counts; 0 selects the coarsest stable grid.
  int transverse_intervals = 0;
  int longitudinal_intervals = 0;
  std::uint64_t seed = 0;  // provenance only

  double time_step() const { return 1.0 / sample_rate; }
  long step_count() const;

  bool operator==(const SimulationConfig&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const SimulationConfig& config);

}  // namespace nlstring
