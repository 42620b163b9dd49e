#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "nlstring/analysis.hpp"
#include "nlstring/errors.hpp"
#include "nlstring/grid.hpp"
#include "nlstring/render.hpp"

using namespace nlstring;

namespace {

SimulationConfig pluck(double kappa, double alpha, double duration) {
  SimulationConfig c;
  c.string = from_f0(300.0);
  c.string.kappa = kappa;
  c.string.alpha = alpha;
  c.duration = duration;
  c.excitations.push_back(PluckSpec{});
  return c;
}

}  // namespace

TEST_CASE("zero duration gives an empty stream") {
  const RenderResult r = render(pluck(0.0, 1.0, 0.0));
  CHECK(r.samples.empty());
  CHECK(r.provenance.grid.n_t == 50);
  CHECK(r.provenance.engine_version == std::string(kEngineVersion));
}

TEST_CASE("sample count and initial levels") {
  RenderOptions opts;
  opts.record_fields = true;
  const SimulationConfig c = pluck(2.0, 3.0, 0.01);
  const RenderResult r = render(c, opts);
  REQUIRE(r.samples.size() == 480);
  REQUIRE(r.u_field);
  CHECK(r.u_field->rows() == 480);
  CHECK(r.zeta_field->cols() == r.provenance.grid.longitudinal_unknowns());
  CHECK(r.u_field->row(0) == r.u_field->row(1));
  CHECK(r.u_field->row(0).maxCoeff() == 0.0078);
  CHECK(r.diagnostics.newton_iterations.size() == 480);
  CHECK(r.samples[0] == r.samples[1]);
  CHECK(r.warnings.empty());
}

TEST_CASE("renders are deterministic") {
  SimulationConfig c = pluck(5.0, 2.5, 0.05);
  c.excitations.push_back(BowSpec{});
  const auto a = render(c).samples;
  const auto b = render(c).samples;
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("ideal string sounds at f0") {
  // Centred pluck and readout: only odd modes, with weights falling off in p.
  SimulationConfig c = pluck(0.0, 1.0, 1.0);
  c.excitations = {PluckSpec{0.005, 0.5, 0.4}};
  c.readout_position = 0.5;
  const RenderResult r = render(c);
  const SpectrumReport s = spectrum(r.samples, 48000.0);
  const auto loudest = std::max_element(s.peaks.begin(), s.peaks.end(),
                                        [](const auto& a, const auto& b) { return a.magnitude_db < b.magnitude_db; });
  REQUIRE(loudest != s.peaks.end());
  CHECK(std::abs(loudest->frequency - 300.0) <= s.bin_width());
  const auto d = detune(r, fletcher_modes(300.0, 0.0, 10));
  REQUIRE(d);
  CHECK(std::abs(*d) < 1.0);
}

TEST_CASE("nonlinear stiff pluck stays near the Fletcher pitch") {
  const RenderResult r = render(pluck(5.88, 3.0, 1.0));
  const auto d = detune(r, fletcher_modes(300.0, 5.88, 10));
  REQUIRE(d);
  // 2 Hz modelling bound plus 1 Hz estimator allowance
  CHECK(std::abs(*d) <= 3.0);
}

TEST_CASE("longitudinal readout") {
  SimulationConfig c = pluck(2.0, 3.0, 0.05);
  c.readout_mix = {0.0, 1.0};
  const auto nonlinear = render(c).samples;
  CHECK(std::any_of(nonlinear.begin(), nonlinear.end(), [](double y) { return y != 0.0; }));
  c.string.alpha = 1.0;
  const auto linear = render(c).samples;
  CHECK(std::all_of(linear.begin(), linear.end(), [](double y) { return y == 0.0; }));
}

TEST_CASE("renders reject invalid configs") {
  SimulationConfig c = pluck(0.0, 0.5, 0.1);
  CHECK_THROWS_AS(render(c), std::invalid_argument);
  c = pluck(2.0, 1.0, 0.1);
  c.transverse_intervals = 200;
  CHECK_THROWS_AS(render(c), std::invalid_argument);
}

TEST_CASE("interval overrides coarser than the limit are accepted") {
  SimulationConfig c = pluck(2.0, 3.0, 0.02);
  c.transverse_intervals = 24;
  c.longitudinal_intervals = 12;
  const RenderResult r = render(c);
  CHECK(r.provenance.grid.n_t == 24);
  CHECK(r.provenance.grid.n_l == 12);
}

TEST_CASE("engine state can be replaced") {
  StringEngine e(pluck(1.0, 1.0, 0.1));
  StringState s = StringState::zero(e.grid());
  e.set_state(s);
  e.advance();
  CHECK(e.state().w_curr.cwiseAbs().maxCoeff() == 0.0);
  s.w_prev.resize(3);
  CHECK_THROWS_AS(e.set_state(s), std::invalid_argument);
}

TEST_CASE("simulation errors carry the step") {
  const SimulationError e(SimulationError::Kind::divergence, 123, "too big");
  CHECK(e.step() == 123);
  CHECK(e.kind() == SimulationError::Kind::divergence);
  CHECK(std::string(SimulationError::kind_name(e.kind())) == "divergence");
}

TEST_CASE("frequency-independent loss never raises the windowed RMS") {
  SimulationConfig c = pluck(2.0, 1.0, 0.5);
  c.string.sigma0_t = c.string.sigma0_l = 2.0;
  const RenderResult r = render(c);
  const auto rms = windowed_rms(r.samples, 2400);
  REQUIRE(rms.size() == 10);
  for (std::size_t i = 1; i < rms.size(); ++i) CHECK(rms[i] <= 1.05 * rms[i - 1]);
  CHECK(rms.back() < rms.front());
}
