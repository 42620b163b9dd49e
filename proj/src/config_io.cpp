#include "nlstring/config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "nlstring/checksum.hpp"

namespace nlstring {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("malformed document: {}", e.what()));
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, T fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("field '{}' has the wrong type", key));
  }
}

double get_double(const YAML::Node& node, const std::string& key, double fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  if (v.IsScalar()) {
    const std::string s = v.Scalar();
    if (s == "inf" || s == ".inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  return get<double>(node, key, fallback);
}

Envelope parse_envelope(const YAML::Node& node, const std::string& key, const Envelope& fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  if (v.IsScalar()) return Envelope::constant(get<double>(node, key, 0.0));
  if (!v.IsSequence()) throw ConfigError(fmt::format("envelope '{}' must be a number or a list", key));
  std::vector<std::pair<double, double>> pts;
  for (const auto& item : v) {
    if (!item.IsSequence() || item.size() != 2) {
      throw ConfigError(fmt::format("envelope '{}' entries must be [t, value] pairs", key));
    }
    pts.emplace_back(item[0].as<double>(), item[1].as<double>());
  }
  try {
    return Envelope(std::move(pts));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("envelope '{}': {}", key, e.what()));
  }
}

ExcitationSpec parse_excitation(const YAML::Node& node) {
  const std::string type = get<std::string>(node, "type", "");
  if (type == "pluck") {
    PluckSpec p;
    p.amplitude = get_double(node, "amplitude", p.amplitude);
    p.position = get_double(node, "position", p.position);
    p.width = get_double(node, "width", p.width);
    return p;
  }
  if (type == "bow") {
    BowSpec b;
    b.start = get_double(node, "start", b.start);
    b.end = get_double(node, "end", b.end);
    b.position = parse_envelope(node, "position", b.position);
    b.velocity = parse_envelope(node, "velocity", b.velocity);
    b.force = parse_envelope(node, "force", b.force);
    b.sharpness = get_double(node, "sharpness", b.sharpness);
    b.offset = get_double(node, "offset", b.offset);
    return b;
  }
  if (type == "hammer") {
    HammerSpec h;
    h.start = get_double(node, "start", h.start);
    h.end = get_double(node, "end", h.end);
    h.position = get_double(node, "position", h.position);
    h.displacement = get_double(node, "displacement", h.displacement);
    h.velocity = get_double(node, "velocity", h.velocity);
    h.mass_ratio = get_double(node, "mass_ratio", h.mass_ratio);
    h.stiffness = get_double(node, "stiffness", h.stiffness);
    h.exponent = get_double(node, "exponent", h.exponent);
    return h;
  }
  throw ConfigError(fmt::format("unknown excitation type '{}'", type));
}

// Fills `c` from `node`; `strict` demands the keys without defaults.
void read_config(const YAML::Node& node, SimulationConfig& c, bool strict) {
  if (!node.IsMap()) throw ConfigError("config must be a mapping");
  const YAML::Node s = node["string"];
  if (s) {
    if (s["f0"] && s["gamma"]) throw ConfigError("give either string.f0 or string.gamma, not both");
    if (s["f0"]) {
      c.string.gamma = 2.0 * get<double>(s, "f0", 0.0);
    } else if (s["gamma"]) {
      c.string.gamma = get<double>(s, "gamma", 0.0);
    } else if (strict) {
      throw ConfigError("string.f0 (or string.gamma) is required");
    }
    c.string.kappa = get_double(s, "kappa", c.string.kappa);
    c.string.alpha = get_double(s, "alpha", c.string.alpha);
    const double s0 = get_double(s, "sigma0", c.string.sigma0_t);
    const double s1 = get_double(s, "sigma1", c.string.sigma1_t);
    c.string.sigma0_t = s0;
    c.string.sigma1_t = s1;
    c.string.sigma0_l = get_double(s, "sigma0_l", s["sigma0"] ? s0 : c.string.sigma0_l);
    c.string.sigma1_l = get_double(s, "sigma1_l", s["sigma1"] ? s1 : c.string.sigma1_l);
    c.string.theta = get_double(s, "theta", c.string.theta);
  } else if (strict) {
    throw ConfigError("string.f0 (or string.gamma) is required");
  }
  if (strict && !node["sample_rate"]) throw ConfigError("sample_rate is required");
  if (strict && !node["duration"]) throw ConfigError("duration is required");
  c.sample_rate = get_double(node, "sample_rate", c.sample_rate);
  c.duration = get_double(node, "duration", c.duration);
  if (const YAML::Node r = node["readout"]) {
    c.readout_position = get_double(r, "position", c.readout_position);
    if (const YAML::Node mix = r["mix"]) {
      if (!mix.IsSequence() || mix.size() != 2) throw ConfigError("readout.mix must be [u, zeta]");
      c.readout_mix = {mix[0].as<double>(), mix[1].as<double>()};
    }
  }
  c.interpolation_order = get<int>(node, "interpolation_order", c.interpolation_order);
  if (node["boundary"]) {
    try {
      c.boundary = parse_boundary(get<std::string>(node, "boundary", ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (const YAML::Node g = node["grid"]) {
    c.transverse_intervals = get<int>(g, "transverse_intervals", c.transverse_intervals);
    c.longitudinal_intervals = get<int>(g, "longitudinal_intervals", c.longitudinal_intervals);
  }
  if (const YAML::Node sv = node["solver"]) {
    c.solver.newton_tol = get_double(sv, "newton_tol", c.solver.newton_tol);
    c.solver.newton_max_iter = get<int>(sv, "newton_max_iter", c.solver.newton_max_iter);
    if (sv["linear_solver"]) {
      try {
        c.solver.linear_solver = parse_linear_solver(get<std::string>(sv, "linear_solver", ""));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  c.seed = get<std::uint64_t>(node, "seed", c.seed);
  if (const YAML::Node ex = node["excitations"]) {
    if (!ex.IsSequence()) throw ConfigError("excitations must be a list");
    c.excitations.clear();
    for (const auto& item : ex) c.excitations.push_back(parse_excitation(item));
  }
}

json envelope_json(const Envelope& e) {
  if (e.points().size() == 1 && e.points().front().first == 0.0) return e.points().front().second;
  json arr = json::array();
  for (const auto& [t, v] : e.points()) arr.push_back({t, v});
  return arr;
}

json excitation_json(const ExcitationSpec& spec) {
  json j;
  if (const auto* p = std::get_if<PluckSpec>(&spec)) {
    j = {{"type", "pluck"}, {"amplitude", p->amplitude}, {"position", p->position}, {"width", p->width}};
  } else if (const auto* b = std::get_if<BowSpec>(&spec)) {
    j = {{"type", "bow"},
         {"start", b->start},
         {"position", envelope_json(b->position)},
         {"velocity", envelope_json(b->velocity)},
         {"force", envelope_json(b->force)},
         {"sharpness", b->sharpness},
         {"offset", b->offset}};
    if (std::isfinite(b->end)) j["end"] = b->end;
  } else if (const auto* h = std::get_if<HammerSpec>(&spec)) {
    j = {{"type", "hammer"},          {"start", h->start},
         {"position", h->position},   {"displacement", h->displacement},
         {"velocity", h->velocity},   {"mass_ratio", h->mass_ratio},
         {"stiffness", h->stiffness}, {"exponent", h->exponent}};
    if (std::isfinite(h->end)) j["end"] = h->end;
  }
  return j;
}

ParamRange parse_range(const YAML::Node& node, const std::string& key, ParamRange fallback) {
  const YAML::Node r = node[key];
  if (!r) return fallback;
  fallback.min = get_double(r, "min", fallback.min);
  fallback.max = get_double(r, "max", fallback.max);
  if (r["law"]) {
    try {
      fallback.law = parse_sampling_law(get<std::string>(r, "law", ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return fallback;
}

json range_json(const ParamRange& r) {
  return {{"min", r.min}, {"max", r.max}, {"law", to_string(r.law)}};
}

// Every named range of a distribution, for parsing and serialisation alike.
template <typename Dist, typename Fn>
void for_each_range(Dist& d, Fn&& fn) {
  fn("f0", d.f0);
  fn("kappa", d.kappa);
  fn("alpha", d.alpha);
  fn("sigma0", d.sigma0);
  fn("sigma1", d.sigma1);
  fn("pluck_amplitude", d.pluck_amplitude);
  fn("pluck_position", d.pluck_position);
  fn("pluck_width", d.pluck_width);
  fn("bow_position", d.bow_position);
  fn("bow_velocity", d.bow_velocity);
  fn("bow_force", d.bow_force);
  fn("bow_sharpness", d.bow_sharpness);
  fn("bow_offset", d.bow_offset);
  fn("bow_release", d.bow_release);
  fn("hammer_position", d.hammer_position);
  fn("hammer_velocity", d.hammer_velocity);
  fn("hammer_mass_ratio", d.hammer_mass_ratio);
  fn("hammer_stiffness", d.hammer_stiffness);
  fn("hammer_exponent", d.hammer_exponent);
}

}  // namespace

SimulationConfig parse_config(const std::string& text) {
  SimulationConfig c;
  read_config(parse_yaml(text), c, true);
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

json to_json(const SimulationConfig& c) {
  json j;
  j["string"] = {{"gamma", c.string.gamma},       {"kappa", c.string.kappa},
                 {"alpha", c.string.alpha},       {"sigma0", c.string.sigma0_t},
                 {"sigma1", c.string.sigma1_t},   {"sigma0_l", c.string.sigma0_l},
                 {"sigma1_l", c.string.sigma1_l}, {"theta", c.string.theta}};
  j["sample_rate"] = c.sample_rate;
  j["duration"] = c.duration;
  j["readout"] = {{"position", c.readout_position}, {"mix", {c.readout_mix[0], c.readout_mix[1]}}};
  j["interpolation_order"] = c.interpolation_order;
  j["boundary"] = to_string(c.boundary);
  j["grid"] = {{"transverse_intervals", c.transverse_intervals},
               {"longitudinal_intervals", c.longitudinal_intervals}};
  j["solver"] = {{"newton_tol", c.solver.newton_tol},
                 {"newton_max_iter", c.solver.newton_max_iter},
                 {"linear_solver", to_string(c.solver.linear_solver)}};
  j["seed"] = c.seed;
  j["excitations"] = json::array();
  for (const auto& e : c.excitations) j["excitations"].push_back(excitation_json(e));
  return j;
}

std::string canonical_json(const SimulationConfig& config) { return to_json(config).dump(); }

std::string config_hash(const SimulationConfig& config) { return sha256_hex(canonical_json(config)); }

void save_config(const SimulationConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << to_json(config).dump(2) << '\n';
}

ParamDistribution parse_distribution(const std::string& text) {
  const YAML::Node node = parse_yaml(text);
  if (!node.IsMap()) throw ConfigError("distribution must be a mapping");
  ParamDistribution d;
  d.seed = get<std::uint64_t>(node, "seed", d.seed);
  if (const YAML::Node base = node["base"]) read_config(base, d.base, false);
  if (const YAML::Node kinds = node["kinds"]) {
    if (!kinds.IsSequence()) throw ConfigError("kinds must be a list");
    d.kinds.clear();
    for (const auto& k : kinds) {
      try {
        d.kinds.push_back(parse_excitation_kind(k.as<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (const YAML::Node ranges = node["ranges"]) {
    for (auto it = ranges.begin(); it != ranges.end(); ++it) {
      bool known = false;
      const auto name = it->first.as<std::string>();
      for_each_range(d, [&](const char* key, ParamRange&) { known = known || name == key; });
      if (!known) throw ConfigError(fmt::format("unknown range '{}'", name));
    }
    for_each_range(d, [&](const char* key, ParamRange& r) { r = parse_range(ranges, key, r); });
  }
  return d;
}

ParamDistribution load_distribution(const std::filesystem::path& path) {
  return parse_distribution(read_file(path));
}

json to_json(const ParamDistribution& d) {
  json j;
  j["seed"] = d.seed;
  j["base"] = to_json(d.base);
  j["kinds"] = json::array();
  for (auto k : d.kinds) j["kinds"].push_back(to_string(k));
  json ranges;
  for_each_range(d, [&](const char* key, const ParamRange& r) { ranges[key] = range_json(r); });
  j["ranges"] = ranges;
  return j;
}

SweepSpec parse_sweep(const std::string& text) {
  const YAML::Node node = parse_yaml(text);
  SweepSpec spec;
  if (node.IsNull()) return spec;
  if (!node.IsMap()) throw ConfigError("sweep must be a mapping");
  SimulationConfig base;
  if (const YAML::Node b = node["base"]) read_config(b, base, false);
  spec.repeats = get<int>(node, "repeats", spec.repeats);
  if (const YAML::Node cases = node["cases"]) {
    if (!cases.IsSequence()) throw ConfigError("cases must be a list");
    for (const auto& item : cases) {
      SweepCase sc;
      sc.config = base;
      if (item["steps"]) sc.config.duration = get<double>(item, "steps", 0.0) / base.sample_rate;
      sc.config.duration = get_double(item, "duration", sc.config.duration);
      sc.config.transverse_intervals = get<int>(item, "transverse_intervals", base.transverse_intervals);
      sc.config.longitudinal_intervals = get<int>(item, "longitudinal_intervals", base.longitudinal_intervals);
      sc.batch = get<int>(item, "batch", 1);
      sc.workers = get<int>(item, "workers", 1);
      sc.label = get<std::string>(item, "label", fmt::format("case{}", spec.cases.size()));
      spec.cases.push_back(std::move(sc));
    }
  }
  return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path) { return parse_sweep(read_file(path)); }

}  // namespace nlstring
