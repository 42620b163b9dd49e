#include <catch_amalgamated.hpp>

#include <filesystem>

#include "nlstring/config_io.hpp"

using namespace nlstring;

namespace {

const char* kConfig = R"(
string:
  f0: 220
  kappa: 2.5
  alpha: 1.5
  sigma0: 0.8
  sigma1: 2e-4
sample_rate: 44100
duration: 0.5
readout: {position: 0.27, mix: [1.0, 0.5]}
boundary: simply-supported
solver: {newton_tol: 1e-9, newton_max_iter: 30, linear_solver: direct-sparse}
seed: 17
excitations:
  - {type: pluck, amplitude: 0.004, position: 0.2, width: 0.1}
  - type: bow
    start: 0.1
    end: 0.3
    force: [[0, 10], [0.2, 20]]
    velocity: 0.3
  - {type: hammer, start: 0.35, position: 0.15, velocity: 1.5}
)";

}  // namespace

TEST_CASE("config parsing") {
  const SimulationConfig c = parse_config(kConfig);
  CHECK(c.string.gamma == 440.0);
  CHECK(c.string.kappa == 2.5);
  CHECK(c.string.sigma0_t == 0.8);
  CHECK(c.string.sigma0_l == 0.8);
  CHECK(c.string.sigma1_l == 2e-4);
  CHECK(c.sample_rate == 44100.0);
  CHECK(c.readout_mix[1] == 0.5);
  CHECK(c.boundary == BoundaryCondition::simply_supported);
  CHECK(c.solver.linear_solver == LinearSolverKind::direct_sparse);
  CHECK(c.seed == 17);
  REQUIRE(c.excitations.size() == 3);
  const auto& bow = std::get<BowSpec>(c.excitations[1]);
  CHECK(bow.force.at(0.1) == 15.0);
  CHECK(bow.velocity.at(5.0) == 0.3);
  CHECK(std::get<HammerSpec>(c.excitations[2]).velocity == 1.5);
  CHECK(validate(c).ok());
}

TEST_CASE("longitudinal loss may differ") {
  const auto c = parse_config("string: {f0: 100, sigma0: 1, sigma0_l: 3}\nsample_rate: 48000\nduration: 1\n");
  CHECK(c.string.sigma0_t == 1.0);
  CHECK(c.string.sigma0_l == 3.0);
}

TEST_CASE("required keys and bad values") {
  CHECK_THROWS_AS(parse_config("sample_rate: 48000\nduration: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("string: {f0: 300}\nduration: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("string: {f0: 300}\nsample_rate: 48000\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("string: {f0: 300, gamma: 600}\nsample_rate: 1\nduration: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("string: {f0: abc}\nsample_rate: 48000\nduration: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("string: {f0: 300}\nsample_rate: 48000\nduration: 1\nexcitations: [{type: pluk}]\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("string: [\n"), ConfigError);
}

TEST_CASE("JSON documents are accepted and the JSON dump round trips") {
  const SimulationConfig c = parse_config(kConfig);
  const SimulationConfig back = parse_config(to_json(c).dump());
  CHECK(back == c);
  CHECK(canonical_json(back) == canonical_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 64);
}

TEST_CASE("hash changes with any parameter") {
  SimulationConfig a = parse_config(kConfig);
  SimulationConfig b = a;
  b.string.kappa += 1e-12;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("save and load") {
  const auto path = std::filesystem::temp_directory_path() / "nlstring_test_config.json";
  const SimulationConfig c = parse_config(kConfig);
  save_config(c, path);
  CHECK(load_config(path) == c);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("distribution parsing") {
  const auto d = parse_distribution(R"(
seed: 42
base: {sample_rate: 32000, duration: 0.25}
kinds: [pluck, hammer]
ranges:
  kappa: {min: 0.5, max: 2, law: uniform}
  f0: {min: 200, max: 210}
)");
  CHECK(d.seed == 42);
  CHECK(d.base.sample_rate == 32000.0);
  CHECK(d.kinds == std::vector{ExcitationKind::pluck, ExcitationKind::hammer});
  CHECK(d.kappa.law == SamplingLaw::uniform);
  CHECK(d.f0.max == 210.0);
  CHECK(d.f0.law == SamplingLaw::log_uniform);
  CHECK(parse_distribution(to_json(d).dump()) == d);
  CHECK_THROWS_AS(parse_distribution("ranges: {kapa: {min: 1, max: 2}}"), ConfigError);
}

TEST_CASE("sweep parsing") {
  const auto s = parse_sweep(R"(
base: {string: {f0: 300}, sample_rate: 48000, duration: 1, excitations: [{type: pluck}]}
repeats: 5
cases:
  - {label: short, steps: 4800}
  - {label: wide, steps: 4800, transverse_intervals: 40, batch: 4, workers: 2}
)");
  CHECK(s.repeats == 5);
  REQUIRE(s.cases.size() == 2);
  CHECK(s.cases[0].config.step_count() == 4800);
  CHECK(s.cases[1].config.transverse_intervals == 40);
  CHECK(s.cases[1].batch == 4);
  CHECK(parse_sweep("").cases.empty());
}
