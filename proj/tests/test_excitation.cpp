#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "nlstring/errors.hpp"
#include "nlstring/excitation.hpp"
#include "nlstring/grid.hpp"
#include "nlstring/render.hpp"
#include "nlstring/rng.hpp"
#include "nlstring/sampling.hpp"

using namespace nlstring;
using Catch::Approx;

namespace {

SimulationConfig base_config(double alpha = 1.0, double duration = 0.05) {
  SimulationConfig c;
  c.string = from_f0(300.0);
  c.string.kappa = 2.0;
  c.string.alpha = alpha;
  c.duration = duration;
  return c;
}

bool bit_identical(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("friction curve values") {
  CHECK(friction_curve(0.0, 100.0, 0.2) == 0.0);
  CHECK(friction_curve(0.7, 0.0, 0.3) == 1.0);
  CHECK(friction_curve(-3.0, 17.0, 1.0) == -1.0);
  CHECK(friction_curve(0.01, 100.0, 0.2) == Approx(0.2 + 0.8 * std::exp(-1.0)));
}

TEST_CASE("friction curve is odd and bounded") {
  CounterRng rng(5, 0);
  for (int i = 0; i < 2000; ++i) {
    const double v = 4.0 * (rng.uniform() - 0.5);
    const double a = 500.0 * rng.uniform();
    const double eps = rng.uniform();
    CHECK(friction_curve(-v, a, eps) == -friction_curve(v, a, eps));
    CHECK(std::abs(friction_curve(v, a, eps)) <= 1.0);
  }
}

TEST_CASE("friction slope matches finite differences") {
  for (double v : {-0.3, -0.01, 0.002, 0.05, 0.4}) {
    const double h = 1e-7;
    const double fd = (friction_curve(v + h, 80.0, 0.25) - friction_curve(v - h, 80.0, 0.25)) / (2.0 * h);
    CHECK(friction_curve_slope(v, 80.0, 0.25) == Approx(fd).epsilon(1e-5).margin(1e-8));
  }
}

TEST_CASE("pluck shape") {
  const Grid g = compute_grid(from_f0(300.0), 48000.0);
  PluckSpec p;
  const Eigen::VectorXd u = pluck_shape(p, g);
  Eigen::Index peak = 0;
  CHECK(u.maxCoeff(&peak) == 0.0078);
  CHECK(std::abs((peak + 1) * g.h_t - 0.14) <= g.h_t / 2.0);
  CHECK(u.minCoeff() >= 0.0);

  PluckSpec doubled = p;
  doubled.amplitude *= 2.0;
  CHECK((pluck_shape(doubled, g) - 2.0 * u).cwiseAbs().maxCoeff() == 0.0);

  PluckSpec whole{0.01, 0.5, 1.0};
  const Eigen::VectorXd w = pluck_shape(whole, g);
  CHECK(w[0] < 0.01 * whole.amplitude);
  CHECK(w[w.size() - 1] < 0.01 * whole.amplitude);

  const auto [w0, w1] = pluck_init(p, g);
  CHECK(w0 == w1);
  CHECK(w0.tail(g.longitudinal_unknowns()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unforced bow returns the free velocity") {
  const SolverSettings s;
  const BowResult r = bow_couple(-0.13, 0.2, 0.0, 50.0, 1.0 / 48000.0, 100.0, 0.2, s, 1);
  CHECK(r.force == 0.0);
  CHECK(r.v_rel == -0.13);
  CHECK(r.iterations == 1);
}

TEST_CASE("bow roots satisfy the residual") {
  const SolverSettings s;
  const double k = 1.0 / 48000.0, gain = 50.0, force = 300.0, a = 100.0, eps = 0.2;
  const double c = k * force * gain / 2.0;
  for (double v_free : {-0.5, -0.2, 0.17, 0.9}) {
    const BowResult r = bow_couple(v_free, 0.2, force, gain, k, a, eps, s, 1);
    INFO("v_free " << v_free);
    if (r.sticking) {
      CHECK(r.v_rel == 0.0);
      CHECK(std::abs(v_free) <= c);
    } else {
      CHECK(std::abs(r.v_rel + c * friction_curve(r.v_rel, a, eps) - v_free) <= 1e-9);
      CHECK(r.v_rel * v_free > 0.0);
    }
    CHECK(r.force == Approx(force * r.force_factor));
  }
}

TEST_CASE("small free velocity sticks") {
  const SolverSettings s;
  const double k = 1.0 / 48000.0;
  const BowResult r = bow_couple(0.05, 0.2, 300.0, 50.0, k, 100.0, 0.2, s, 1);
  CHECK(r.sticking);
  CHECK(r.v_rel == 0.0);
  CHECK(r.force_factor == Approx(0.05 / (k * 300.0 * 50.0 / 2.0)));
}

TEST_CASE("bow drags a resting string along") {
  SimulationConfig c = base_config();
  c.excitations.push_back(BowSpec{});
  StringEngine engine(c);
  const auto report = engine.advance();
  REQUIRE(report.bow_active);
  CHECK(report.bow_v_rel < 0.0);
  CHECK(report.bow_force < 0.0);
  const PointOperator at_bow = engine.operators().read(0.2);
  const auto& w = engine.state().w_curr;
  CHECK(at_bow.dot(std::span<const double>(w.data(), engine.grid().transverse_unknowns())) > 0.0);
}

TEST_CASE("zero-force bow is bit-identical to no bow") {
  for (double alpha : {1.0, 3.0}) {
    SimulationConfig plain = base_config(alpha);
    plain.excitations.push_back(PluckSpec{});
    SimulationConfig bowed = plain;
    BowSpec b;
    b.force = Envelope::constant(0.0);
    bowed.excitations.push_back(b);
    CHECK(bit_identical(render(plain).samples, render(bowed).samples));
  }
}

TEST_CASE("hammer far from the string flies ballistically") {
  SimulationConfig c = base_config();
  HammerSpec h;
  h.displacement = -0.5;
  h.velocity = 2.0;
  c.excitations.push_back(h);
  StringEngine engine(c);
  const double k = engine.grid().k;
  for (int n = 0; n < 100; ++n) {
    const auto r = engine.advance();
    CHECK(r.hammer_force == 0.0);
    const auto& hs = engine.hammer_state();
    CHECK(hs.u_curr - hs.u_prev == Approx(k * 2.0).epsilon(1e-9));
  }
  CHECK(engine.state().w_curr.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear hammer law") {
  HammerSpec h;
  h.exponent = 1.0;
  h.stiffness = 1500.0;
  h.mass_ratio = 0.8;
  HammerState state{1e-4, 2e-4, 0.0, true};
  const double k = 1.0 / 48000.0, gain = 40.0;
  const double eta_prev = 1e-5, eta_free = 3e-5;
  const HammerResult r = hammer_couple(h, state, 2e-5, eta_prev, eta_free, gain, k);
  REQUIRE(r.contact);
  const double eta_next = eta_free - k * k * r.force * (1.0 + h.mass_ratio * gain);
  CHECK(r.force == Approx(h.stiffness * h.stiffness * (eta_next + eta_prev) / 2.0).epsilon(1e-12));
  CHECK(r.next.u_curr == Approx(2.0 * state.u_curr - state.u_prev - k * k * r.force));

  const HammerResult open = hammer_couple(h, state, -1e-6, eta_prev, eta_free, gain, k);
  CHECK(open.force == 0.0);
  CHECK_FALSE(open.contact);
}

TEST_CASE("hammer contact episode pushes and separates") {
  SimulationConfig c = base_config(1.0, 0.1);
  c.string.sigma0_t = c.string.sigma0_l = 1.0;
  c.excitations.push_back(HammerSpec{});
  const RenderResult r = render(c);
  const auto& f = r.diagnostics.hammer_force;
  CHECK(*std::min_element(f.begin(), f.end()) >= 0.0);
  CHECK(*std::max_element(f.begin(), f.end()) > 0.0);
  long last = -1;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0) last = static_cast<long>(i);
  }
  CHECK(last < static_cast<long>(f.size()) - 100);
}

TEST_CASE("hammer force is never negative over random strikes") {
  ParamDistribution d;
  d.seed = 21;
  d.base.duration = 0.02;
  d.kinds = {ExcitationKind::hammer};
  for (std::uint64_t i = 0; i < 20; ++i) {
    const RenderResult r = render(sample_one(d, i));
    const auto& f = r.diagnostics.hammer_force;
    CHECK(*std::min_element(f.begin(), f.end()) >= 0.0);
  }
}

TEST_CASE("excitation schedule") {
  CHECK(excitation_schedule({PluckSpec{}}, 0.0).empty());
  CHECK(excitation_schedule({PluckSpec{}}, 0.5).empty());

  const double T = 0.3;
  BowSpec bow;
  bow.end = T / 3.0;
  HammerSpec hammer;
  hammer.start = T / 2.0;
  const std::vector<ExcitationSpec> ex{bow, hammer};
  for (int n = 0; n < 300; ++n) {
    const double t = n * T / 300.0;
    const ActiveSet s = excitation_schedule(ex, t);
    CHECK(s.size() <= 1);
    CHECK(s.bow.has_value() == (t < T / 3.0));
    CHECK(s.hammer.has_value() == (t >= T / 2.0));
  }
}

TEST_CASE("coupled step is consistent with the returned forcing") {
  SimulationConfig c = base_config(3.0, 0.1);
  c.string.sigma0_t = c.string.sigma0_l = 0.5;
  c.solver.linear_solver = LinearSolverKind::direct_sparse;
  c.excitations.push_back(PluckSpec{});
  c.excitations.push_back(BowSpec{});
  HammerSpec h;
  h.start = 0.002;
  c.excitations.push_back(h);
  StringEngine engine(c);
  auto solver = make_linear_solver(LinearSolverKind::direct_sparse, engine.assembler().unknown_positions());
  int both = 0;
  for (int n = 0; n < 600; ++n) {
    const StringState before = engine.state();
    const auto report = engine.advance();
    const auto& forcing = engine.last_forcing();
    REQUIRE(!forcing.empty());
    const BlockSystem sys = engine.assembler().assemble(before);
    solver->factorize(sys.A);
    const StringState again = advance(before, sys, *solver, forcing);
    CHECK((again.w_curr - engine.state().w_curr).cwiseAbs().maxCoeff() <= 10.0 * c.solver.newton_tol);

    if (report.bow_active && report.hammer_active && report.hammer_force > 0.0) {
      ++both;
      const double k2 = engine.grid().k * engine.grid().k;
      std::vector<double> expected(forcing.size(), 0.0);
      engine.operators().spread(0.2).add_to(expected, -k2 * report.bow_force);
      engine.operators().spread(h.position).add_to(expected, k2 * h.mass_ratio * report.hammer_force);
      for (std::size_t i = 0; i < expected.size(); ++i) CHECK(forcing[i] == Approx(expected[i]).margin(1e-18));
    }
  }
  CHECK(both > 0);
}
