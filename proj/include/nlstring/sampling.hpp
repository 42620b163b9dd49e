#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nlstring/params.hpp"

namespace nlstring {

enum class SamplingLaw { uniform, log_uniform };

std::string to_string(SamplingLaw law);
SamplingLaw parse_sampling_law(const std::string& name);

struct ParamRange {
  double min = 0.0;
  double max = 0.0;
  SamplingLaw law = SamplingLaw::uniform;

  /// Maps u in [0, 1) onto the range.
  double draw(double u) const;
  bool operator==(const ParamRange&) const = default;
};

enum class ExcitationKind { pluck, bow, hammer };

std::string to_string(ExcitationKind kind);
ExcitationKind parse_excitation_kind(const std::string& name);

/// Ranges for randomised dataset generation. Non-sampled fields of `base`
/// (sample rate, duration, readout, solver, boundary) carry over to every sample.
///
/// Default loss ranges are a repository choice; the other defaults follow the
/// parameter regions exercised in the verification suites.
struct ParamDistribution {
  std::uint64_t seed = 0;
  SimulationConfig base;

  ParamRange f0{100.0, 600.0, SamplingLaw::log_uniform};
  ParamRange kappa{0.1, 10.0, SamplingLaw::log_uniform};
  ParamRange alpha{1.0, 4.0, SamplingLaw::uniform};
  ParamRange sigma0{0.05, 2.0, SamplingLaw::log_uniform};
  ParamRange sigma1{1e-5, 1e-3, SamplingLaw::log_uniform};

  std::vector<ExcitationKind> kinds{ExcitationKind::pluck};

  ParamRange pluck_amplitude{1e-3, 1e-2, SamplingLaw::log_uniform};
  ParamRange pluck_position{0.05, 0.5, SamplingLaw::uniform};
  ParamRange pluck_width{0.05, 0.3, SamplingLaw::uniform};

  ParamRange bow_position{0.05, 0.3, SamplingLaw::uniform};
  ParamRange bow_velocity{0.05, 0.5, SamplingLaw::log_uniform};
  ParamRange bow_force{30.0, 1000.0, SamplingLaw::log_uniform};
  ParamRange bow_sharpness{10.0, 300.0, SamplingLaw::log_uniform};
  ParamRange bow_offset{0.0, 0.5, SamplingLaw::uniform};
  ParamRange bow_release{0.5, 0.9, SamplingLaw::uniform};  // fraction of duration

  ParamRange hammer_position{0.05, 0.3, SamplingLaw::uniform};
  ParamRange hammer_velocity{0.5, 5.0, SamplingLaw::log_uniform};
  ParamRange hammer_mass_ratio{0.5, 2.0, SamplingLaw::log_uniform};
  ParamRange hammer_stiffness{500.0, 3000.0, SamplingLaw::log_uniform};
  ParamRange hammer_exponent{1.5, 3.5, SamplingLaw::uniform};

  bool operator==(const ParamDistribution&) const = default;
};

ValidationReport validate(const ParamDistribution& dist);

/// Sample `index` of the distribution; a pure function of (dist, index).
SimulationConfig sample_one(const ParamDistribution& dist, std::uint64_t index);

/// First n samples. Throws std::invalid_argument for an invalid distribution.
std::vector<SimulationConfig> sample(const ParamDistribution& dist, std::size_t n);

}  // namespace nlstring
