#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlstring/params.hpp"
#include "nlstring/sampling.hpp"

namespace nlstring {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config schema (YAML; JSON documents are accepted too):
///
///   string: {f0 | gamma, kappa, alpha, sigma0, sigma1, sigma0_l, sigma1_l, theta}
///   sample_rate, duration                       (required)
///   readout: {position, mix: [u, zeta]}
///   interpolation_order, boundary: clamped | simply-supported
///   grid: {transverse_intervals, longitudinal_intervals}
///   solver: {newton_tol, newton_max_iter, linear_solver: direct-banded | direct-sparse}
///   seed
///   excitations: list of {type: pluck | bow | hammer, ...}
///
/// sigma0/sigma1 set both subsystems; sigma0_l/sigma1_l override the
/// longitudinal ones. Bow envelopes are a number or a list of [t, value] pairs.
SimulationConfig load_config(const std::filesystem::path& path);
SimulationConfig parse_config(const std::string& text);

/// Same schema as the file format; keys are sorted so the dump is canonical.
nlohmann::json to_json(const SimulationConfig& config);
std::string canonical_json(const SimulationConfig& config);
/// SHA-256 of canonical_json, hex encoded.
std::string config_hash(const SimulationConfig& config);

void save_config(const SimulationConfig& config, const std::filesystem::path& path);

/// Distribution schema:
///   seed, base: {config without required keys}, kinds: [pluck, bow, hammer]
///   ranges: {name: {min, max, law: uniform | log-uniform}}
ParamDistribution load_distribution(const std::filesystem::path& path);
ParamDistribution parse_distribution(const std::string& text);
nlohmann::json to_json(const ParamDistribution& dist);

/// One benchmark case: a config plus the number of independent renders.
struct SweepCase {
  std::string label;
  SimulationConfig config;
  int batch = 1;
  int workers = 1;
};

/// Sweep schema:
///   base: {config}, repeats
///   cases: list of {label, steps | duration, transverse_intervals,
///                   longitudinal_intervals, batch, workers}
struct SweepSpec {
  std::vector<SweepCase> cases;
  int repeats = 1;
};

SweepSpec load_sweep(const std::filesystem::path& path);
SweepSpec parse_sweep(const std::string& text);

}  // namespace nlstring
