#include "nlstring/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "nlstring/grid.hpp"
#include "nlstring/rng.hpp"

namespace nlstring {

std::string to_string(SamplingLaw law) {
  return law == SamplingLaw::uniform ? "uniform" : "log-uniform";
}

SamplingLaw parse_sampling_law(const std::string& name) {
  if (name == "uniform") return SamplingLaw::uniform;
  if (name == "log-uniform" || name == "log_uniform" || name == "loguniform") {
    return SamplingLaw::log_uniform;
  }
  throw std::invalid_argument("unknown sampling law '" + name + "'");
}

std::string to_string(ExcitationKind kind) {
  switch (kind) {
    case ExcitationKind::pluck: return "pluck";
    case ExcitationKind::bow: return "bow";
    case ExcitationKind::hammer: return "hammer";
  }
  return "pluck";
}

ExcitationKind parse_excitation_kind(const std::string& name) {
  if (name == "pluck") return ExcitationKind::pluck;
  if (name == "bow") return ExcitationKind::bow;
  if (name == "hammer") return ExcitationKind::hammer;
  throw std::invalid_argument("unknown excitation kind '" + name + "'");
}

double ParamRange::draw(double u) const {
  if (min == max) return min;
  double v = 0.0;
  if (law == SamplingLaw::uniform) {
    v = min + u * (max - min);
  } else {
    v = std::exp(std::log(min) + u * (std::log(max) - std::log(min)));
  }
  // Rounding in exp/log can step just outside the closed range.
  return std::clamp(v, min, max);
}

namespace {

struct NamedRange {
  const char* name;
  const ParamRange* range;
  bool unit_interval;  // must lie strictly inside (0, 1)
};

std::vector<NamedRange> ranges_of(const ParamDistribution& d) {
  return {{"f0", &d.f0, false},
          {"kappa", &d.kappa, false},
          {"alpha", &d.alpha, false},
          {"sigma0", &d.sigma0, false},
          {"sigma1", &d.sigma1, false},
          {"pluck_amplitude", &d.pluck_amplitude, false},
          {"pluck_position", &d.pluck_position, true},
          {"pluck_width", &d.pluck_width, false},
          {"bow_position", &d.bow_position, true},
          {"bow_velocity", &d.bow_velocity, false},
          {"bow_force", &d.bow_force, false},
          {"bow_sharpness", &d.bow_sharpness, false},
          {"bow_offset", &d.bow_offset, false},
          {"bow_release", &d.bow_release, false},
          {"hammer_position", &d.hammer_position, true},
          {"hammer_velocity", &d.hammer_velocity, false},
          {"hammer_mass_ratio", &d.hammer_mass_ratio, false},
          {"hammer_stiffness", &d.hammer_stiffness, false},
          {"hammer_exponent", &d.hammer_exponent, false}};
}

}  // namespace

ValidationReport validate(const ParamDistribution& d) {
  ValidationReport report;
  auto& out = report.violations;
  for (const auto& r : ranges_of(d)) {
    if (!std::isfinite(r.range->min) || !std::isfinite(r.range->max)) {
      out.push_back(fmt::format("{}: range must be finite", r.name));
      continue;
    }
    if (r.range->min > r.range->max) out.push_back(fmt::format("{}: min must be <= max", r.name));
    if (r.range->law == SamplingLaw::log_uniform && !(r.range->min > 0.0)) {
      out.push_back(fmt::format("{}: log-uniform range needs min > 0", r.name));
    }
    if (r.unit_interval && !(r.range->min > 0.0 && r.range->max < 1.0)) {
      out.push_back(fmt::format("{}: range must lie inside (0, 1)", r.name));
    }
  }
  if (!(d.f0.min > 0.0)) out.push_back("f0: range must be positive");
  if (!(d.kappa.min >= 0.0)) out.push_back("kappa: range must be >= 0");
  if (!(d.alpha.min >= 1.0)) out.push_back("alpha: range must be >= 1");
  if (!(d.sigma0.min >= 0.0) || !(d.sigma1.min >= 0.0)) out.push_back("loss ranges must be >= 0");
  if (!(d.pluck_amplitude.min > 0.0)) out.push_back("pluck_amplitude: range must be positive");
  if (!(d.pluck_width.min > 0.0)) out.push_back("pluck_width: range must be positive");
  if (!(d.bow_force.min >= 0.0)) out.push_back("bow_force: range must be >= 0");
  if (!(d.bow_offset.min >= 0.0 && d.bow_offset.max <= 1.0)) out.push_back("bow_offset: range must lie in [0, 1]");
  if (!(d.bow_release.min > 0.0 && d.bow_release.max <= 1.0)) out.push_back("bow_release: range must lie in (0, 1]");
  if (!(d.hammer_exponent.min >= 1.0)) out.push_back("hammer_exponent: range must be >= 1");
  if (!(d.hammer_mass_ratio.min > 0.0) || !(d.hammer_stiffness.min > 0.0)) {
    out.push_back("hammer mass ratio and stiffness ranges must be positive");
  }
  if (d.kinds.empty()) out.push_back("at least one excitation kind is required");
  if (!out.empty()) return report;

  // The most demanding corner (highest pitch, stiffest, largest alpha) must still grid.
  SimulationConfig corner = d.base;
  corner.string = from_f0(d.f0.max, corner.string);
  corner.string.kappa = d.kappa.max;
  corner.string.alpha = d.alpha.max;
  corner.excitations.clear();
  const auto base_report = validate(corner);
  for (const auto& v : base_report.violations) out.push_back("base/corner config: " + v);
  return report;
}

SimulationConfig sample_one(const ParamDistribution& d, std::uint64_t index) {
  const std::uint64_t seed = derive_seed(d.seed, index);
  CounterRng rng(seed, 0);
  // Every draw happens unconditionally and in a fixed order so the stream
  // layout never depends on which excitation kind is picked.
  SimulationConfig c = d.base;
  c.seed = seed;
  c.excitations.clear();

  const double f0 = d.f0.draw(rng.uniform());
  c.string = from_f0(f0, c.string);
  c.string.kappa = d.kappa.draw(rng.uniform());
  c.string.alpha = d.alpha.draw(rng.uniform());
  c.string.sigma0_t = c.string.sigma0_l = d.sigma0.draw(rng.uniform());
  c.string.sigma1_t = c.string.sigma1_l = d.sigma1.draw(rng.uniform());

  const auto kind_index = static_cast<std::size_t>(rng.uniform() * d.kinds.size());
  const ExcitationKind kind = d.kinds[std::min(kind_index, d.kinds.size() - 1)];

  PluckSpec pluck;
  pluck.amplitude = d.pluck_amplitude.draw(rng.uniform());
  pluck.position = d.pluck_position.draw(rng.uniform());
  pluck.width = std::min(d.pluck_width.draw(rng.uniform()),
                         2.0 * std::min(pluck.position, 1.0 - pluck.position));

  BowSpec bow;
  bow.position = Envelope::constant(d.bow_position.draw(rng.uniform()));
  bow.velocity = Envelope::constant(d.bow_velocity.draw(rng.uniform()));
  const double force = d.bow_force.draw(rng.uniform());
  bow.sharpness = d.bow_sharpness.draw(rng.uniform());
  bow.offset = d.bow_offset.draw(rng.uniform());
  const double release = d.bow_release.draw(rng.uniform()) * c.duration;
  bow.force = Envelope({{0.0, force}, {release, force}, {release, 0.0}});

  HammerSpec hammer;
  hammer.position = d.hammer_position.draw(rng.uniform());
  hammer.velocity = d.hammer_velocity.draw(rng.uniform());
  hammer.mass_ratio = d.hammer_mass_ratio.draw(rng.uniform());
  hammer.stiffness = d.hammer_stiffness.draw(rng.uniform());
  hammer.exponent = d.hammer_exponent.draw(rng.uniform());

  switch (kind) {
    case ExcitationKind::pluck: c.excitations.emplace_back(pluck); break;
    case ExcitationKind::bow: c.excitations.emplace_back(bow); break;
    case ExcitationKind::hammer: c.excitations.emplace_back(hammer); break;
  }
  return c;
}

std::vector<SimulationConfig> sample(const ParamDistribution& d, std::size_t n) {
  const auto report = validate(d);
  if (!report.ok()) throw std::invalid_argument("invalid distribution: " + report.summary());
  std::vector<SimulationConfig> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(d, i));
  return out;
}

}  // namespace nlstring
