#include "nlstring/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <unistd.h>

#include <fmt/format.h>

#include "nlstring/analysis.hpp"
#include "nlstring/benchmark.hpp"
#include "nlstring/checksum.hpp"
#include "nlstring/dataset.hpp"
#include "nlstring/errors.hpp"
#include "nlstring/grid.hpp"
#include "nlstring/reference_stencil.hpp"
#include "nlstring/render.hpp"
#include "nlstring/rng.hpp"
#include "nlstring/wav.hpp"

namespace nlstring {

namespace {

constexpr double kF0 = 300.0;
constexpr double kDetuneBound = 2.0;
constexpr double kEstimatorAllowance = 1.0;
constexpr double kModeTolerance = 0.01;
constexpr int kModeCount = 10;
constexpr int kModesRequired = 8;
constexpr double kPhantomBand = 0.25 * kF0;
constexpr double kOracleBound = 1e-10;
constexpr double kDecouplingBound = 1e-14;
constexpr double kGrowthBound = 10.0;
constexpr double kSpacingShrink = 0.98;
constexpr double kRmsWindow = 0.05;
constexpr double kRmsSlack = 0.05;
constexpr int kHammerSamples = 100;
constexpr double kScalingLow = 1.7;
constexpr double kScalingHigh = 2.6;
constexpr double kWorkerSpeedup = 1.6;
constexpr unsigned kWorkerCores = 4;

enum class Rel { le, lt, ge, gt };

Check make_check(std::string label, double value, Rel rel, double threshold) {
  Check c;
  c.label = std::move(label);
  c.value = value;
  switch (rel) {
    case Rel::le:
      c.passed = value <= threshold;
      c.bound = fmt::format("<= {:g}", threshold);
      break;
    case Rel::lt:
      c.passed = value < threshold;
      c.bound = fmt::format("< {:g}", threshold);
      break;
    case Rel::ge:
      c.passed = value >= threshold;
      c.bound = fmt::format(">= {:g}", threshold);
      break;
    case Rel::gt:
      c.passed = value > threshold;
      c.bound = fmt::format("> {:g}", threshold);
      break;
  }
  return c;
}

Check range_check(std::string label, double value, double lo, double hi) {
  Check c;
  c.label = std::move(label);
  c.value = value;
  c.passed = value >= lo && value <= hi;
  c.bound = fmt::format("in [{:g}, {:g}]", lo, hi);
  return c;
}

SimulationConfig pluck_config(double kappa, double alpha, double duration) {
  SimulationConfig c;
  c.string = from_f0(kF0);
  c.string.kappa = kappa;
  c.string.alpha = alpha;
  c.duration = duration;
  c.excitations.push_back(PluckSpec{});
  return c;
}

void set_loss(SimulationConfig& c, double sigma0, double sigma1) {
  c.string.sigma0_t = c.string.sigma0_l = sigma0;
  c.string.sigma1_t = c.string.sigma1_l = sigma1;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

template <typename Fn>
CriterionReport timed(int id, std::string title, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionReport r;
  r.id = id;
  r.title = std::move(title);
  fn(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::filesystem::path scratch_dir(const std::filesystem::path& requested) {
  auto dir = requested.empty()
                 ? std::filesystem::temp_directory_path() / fmt::format("nlstring-verify-{}", getpid())
                 : requested;
  std::filesystem::create_directories(dir);
  return dir;
}

nlohmann::json without_timing(nlohmann::json record) {
  record.erase("timing");
  return record;
}

}  // namespace

bool CriterionReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

double CriterionReport::value(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw std::out_of_range(fmt::format("criterion {} has no value '{}'", id, key));
  return it->second;
}

std::vector<DetuneRow> detune_sweep() {
  std::vector<DetuneRow> rows;
  for (double kappa : {0.5, 2.0, 5.88, 9.63}) {
    DetuneRow row;
    row.kappa = kappa;
    row.f_hat = fletcher_modes(kF0, kappa, 1).modes.front();
    const RenderResult r = render(pluck_config(kappa, 3.0, 1.0));
    const auto tail = std::span<const double>(r.samples).subspan(
        static_cast<std::size_t>(std::floor((1.0 - kDetuneWindow) * r.samples.size())));
    const PitchEstimate est = estimate_f0(tail, r.provenance.config.sample_rate);
    row.voiced = est.voiced;
    row.f_est = est.f0;
    rows.push_back(row);
  }
  return rows;
}

CriterionReport check_detune_bound(const std::vector<DetuneRow>& sweep) {
  return timed(1, "detune bound, alpha = 3 lossless plucks", [&](CriterionReport& r) {
    for (const auto& row : sweep) {
      const double d = row.voiced ? std::abs(row.f_est - row.f_hat) : std::numeric_limits<double>::infinity();
      r.checks.push_back(make_check(fmt::format("kappa={:g} |f_est - f_hat| (Hz)", row.kappa), d, Rel::le,
                                    kDetuneBound + kEstimatorAllowance));
      r.values[fmt::format("detune_{:g}", row.kappa)] = row.f_est - row.f_hat;
      r.values[fmt::format("f_est_{:g}", row.kappa)] = row.f_est;
      r.values[fmt::format("f_hat_{:g}", row.kappa)] = row.f_hat;
    }
  });
}

CriterionReport check_detune_monotone(const std::vector<DetuneRow>& sweep) {
  return timed(2, "detune grows with kappa", [&](CriterionReport& r) {
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      r.values[fmt::format("offset_{:g}", sweep[i].kappa)] = std::abs(sweep[i].f_est - kF0);
    }
    for (std::size_t i = 1; i < sweep.size(); ++i) {
      const double step = std::abs(sweep[i].f_est - kF0) - std::abs(sweep[i - 1].f_est - kF0);
      r.checks.push_back(make_check(
          fmt::format("|f_est - f0| step kappa {:g} -> {:g} (Hz)", sweep[i - 1].kappa, sweep[i].kappa), step,
          Rel::ge, 0.0));
    }
  });
}

CriterionReport check_mode_match() {
  return timed(3, "mode match, alpha = 1 stiff pluck", [](CriterionReport& r) {
    const double kappa = 5.88;
    const RenderResult render_result = render(pluck_config(kappa, 1.0, 1.0));
    SpectrumOptions opts;
    opts.min_peak_distance_hz = 0.5 * kF0;
    const SpectrumReport spec = spectrum(render_result.samples, 48000.0, opts);
    const ModeTable modes = fletcher_modes(kF0, kappa, kModeCount);
    const int hits = peaks_on_modes(spec, modes, kModeCount, kModeTolerance);
    r.values["peaks_on_modes"] = hits;
    r.values["modes_with_peak"] = matched_modes(spec, modes, kModeTolerance);
    r.checks.push_back(make_check("first 10 peaks within 1% of a mode", hits, Rel::ge, kModesRequired));
  });
}

CriterionReport check_nonlinear_signature() {
  return timed(4, "phantom partial ordering, kappa = 9.40", [](CriterionReport& r) {
    const double kappa = 9.40;
    const ModeTable modes = fletcher_modes(kF0, kappa, kModeCount);
    std::vector<double> ratios;
    for (double alpha : {1.0, 1.56, 2.12}) {
      const RenderResult res = render(pluck_config(kappa, alpha, 1.0));
      const double ratio = phantom_partial_energy(spectrum(res.samples, 48000.0), modes, kPhantomBand);
      r.values[fmt::format("ratio_{:g}", alpha)] = ratio;
      ratios.push_back(ratio);
    }
    r.checks.push_back(make_check("ratio(1.56) - ratio(1.00) (dB)", ratios[1] - ratios[0], Rel::gt, 0.0));
    r.checks.push_back(make_check("ratio(2.12) - ratio(1.56) (dB)", ratios[2] - ratios[1], Rel::gt, 0.0));
  });
}

CriterionReport check_oracle() {
  return timed(5, "matrix engine vs pointwise stencil", [](CriterionReport& r) {
    SimulationConfig c = pluck_config(5.88, 1.0, 1.0);
    c.excitations.clear();
    c.transverse_intervals = 32;
    StringEngine engine(c);
    const Grid& g = engine.grid();
    const int nt = g.transverse_unknowns();
    const int nl = g.longitudinal_unknowns();

    CounterRng rng(2024, 0);
    StringState s = StringState::zero(g);
    for (Eigen::Index i = 0; i < s.w_prev.size(); ++i) {
      s.w_prev[i] = 1e-3 * (2.0 * rng.uniform() - 1.0);
      s.w_curr[i] = 1e-3 * (2.0 * rng.uniform() - 1.0);
    }
    engine.set_state(s);

    ReferenceStencil ref(c.string, g.k, g.n_t, g.n_l, c.boundary);
    auto slice = [](const Eigen::VectorXd& w, int from, int n) {
      return std::vector<double>(w.data() + from, w.data() + from + n);
    };
    ref.set_transverse(slice(s.w_prev, 0, nt), slice(s.w_curr, 0, nt));
    ref.set_longitudinal(slice(s.w_prev, nt, nl), slice(s.w_curr, nt, nl));

    double worst = 0.0;
    const int steps = 1000;
    for (int n = 0; n < steps; ++n) {
      engine.advance();
      ref.step();
      const auto u = ref.transverse();
      const auto z = ref.longitudinal();
      const auto& w = engine.state().w_curr;
      for (int i = 0; i < nt; ++i) worst = std::max(worst, std::abs(w[i] - u[i]));
      for (int i = 0; i < nl; ++i) worst = std::max(worst, std::abs(w[nt + i] - z[i]));
    }
    r.values["max_abs_diff"] = worst;
    r.values["n_t"] = g.n_t;
    r.values["steps"] = steps;
    r.checks.push_back(make_check("max |w_engine - w_stencil|, n_t = 32, 1000 steps", worst, Rel::lt, kOracleBound));
  });
}

CriterionReport check_decoupling() {
  return timed(6, "alpha = 1 keeps zeta at rest", [](CriterionReport& r) {
    StringEngine engine(pluck_config(5.88, 1.0, 1.0));
    const int nt = engine.grid().transverse_unknowns();
    const int nl = engine.grid().longitudinal_unknowns();
    double worst = 0.0;
    const long steps = 48000;
    for (long n = 0; n < steps; ++n) {
      engine.advance();
      worst = std::max(worst, max_abs(engine.state().w_curr.segment(nt, nl)));
    }
    r.values["max_abs_zeta"] = worst;
    r.checks.push_back(make_check("max |zeta| over 48000 steps", worst, Rel::le, kDecouplingBound));
  });
}

CriterionReport check_stability() {
  return timed(7, "stability at the spacing limit", [](CriterionReport& r) {
    const SimulationConfig c = pluck_config(2.0, 1.0, 1.0);
    StringEngine engine(c);
    const Grid& g = engine.grid();
    const double h_min = min_transverse_spacing(c.string, g.k);
    const double initial = max_abs(engine.state().w_curr.head(g.transverse_unknowns()));
    double peak = initial;
    for (long n = 0; n < 48000; ++n) {
      engine.advance();
      peak = std::max(peak, max_abs(engine.state().w_curr.head(g.transverse_unknowns())));
    }
    r.values["h_over_h_min"] = g.h_t / h_min;
    r.values["growth"] = peak / initial;
    r.checks.push_back(make_check("max|u| / initial peak over 48000 steps", peak / initial, Rel::le, kGrowthBound));

    Grid shrunk = g;
    shrunk.h_t = kSpacingShrink * h_min;
    const ValidationReport grid_report = check_grid(shrunk, c.string);
    r.values["grid_violations"] = static_cast<double>(grid_report.violations.size());
    r.checks.push_back(make_check("check_grid violations at 0.98 h_min", grid_report.violations.size(), Rel::ge, 1));

    SimulationConfig fine = c;
    fine.transverse_intervals = static_cast<int>(std::ceil(1.0 / (kSpacingShrink * h_min)));
    const ValidationReport config_report = validate(fine);
    r.values["config_violations"] = static_cast<double>(config_report.violations.size());
    r.checks.push_back(make_check(fmt::format("validate violations with n_t = {}", fine.transverse_intervals),
                                  config_report.violations.size(), Rel::ge, 1));
  });
}

CriterionReport check_dissipation() {
  return timed(8, "windowed RMS decays under loss", [](CriterionReport& r) {
    struct Case {
      const char* key;
      double alpha;
    };
    for (const Case& cs : {Case{"linear", 1.0}, Case{"nonlinear", 3.0}}) {
      SimulationConfig c = pluck_config(2.0, cs.alpha, 1.0);
      set_loss(c, 1.0, 1e-4);
      const RenderResult res = render(c);
      const auto rms = windowed_rms(res.samples, static_cast<std::size_t>(kRmsWindow * c.sample_rate));
      double worst = 0.0;
      for (std::size_t i = 1; i < rms.size(); ++i) worst = std::max(worst, rms[i] / rms[i - 1]);
      r.values[fmt::format("max_rms_ratio_{}", cs.key)] = worst;
      r.checks.push_back(make_check(fmt::format("{} alpha={:g}: max rms[i+1]/rms[i]", cs.key, cs.alpha), worst,
                                    Rel::le, 1.0 + kRmsSlack));
    }
  });
}

CriterionReport check_excitation() {
  return timed(9, "excitation contracts", [](CriterionReport& r) {
    SimulationConfig plain = pluck_config(2.0, 3.0, 0.1);
    SimulationConfig bowed = plain;
    BowSpec silent;
    silent.force = Envelope::constant(0.0);
    bowed.excitations.push_back(silent);
    const auto a = render(plain).samples;
    const auto b = render(bowed).samples;
    const bool identical = a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](double x, double y) {
                             return std::memcmp(&x, &y, sizeof(double)) == 0;
                           });
    r.values["zero_bow_identical"] = identical ? 1.0 : 0.0;
    r.checks.push_back(make_check("F_B = 0 render bit-identical to no bow (1 = yes)", identical, Rel::ge, 1.0));

    ParamDistribution dist;
    dist.seed = 99;
    dist.base.duration = 0.05;
    dist.kinds = {ExcitationKind::hammer};
    double min_force = std::numeric_limits<double>::infinity();
    int failures = 0;
    int struck = 0;
    for (int i = 0; i < kHammerSamples; ++i) {
      try {
        const RenderResult res = render(sample_one(dist, static_cast<std::uint64_t>(i)));
        const auto& f = res.diagnostics.hammer_force;
        min_force = std::min(min_force, *std::min_element(f.begin(), f.end()));
        if (std::any_of(f.begin(), f.end(), [](double x) { return x > 0.0; })) ++struck;
      } catch (const std::exception&) {
        ++failures;
      }
    }
    r.values["hammer_min_force"] = min_force;
    r.values["hammer_failures"] = failures;
    r.values["hammer_struck"] = struck;
    r.checks.push_back(make_check("min hammer force over 100 random renders", min_force, Rel::ge, 0.0));
    r.checks.push_back(make_check("failed hammer renders", failures, Rel::le, 0.0));

    SimulationConfig c;
    c.string = from_f0(kF0);
    c.string.kappa = 0.313;
    c.string.alpha = 1.56;
    set_loss(c, 0.5, 1e-5);
    c.duration = 1.0;
    BowSpec bow;
    const double release = 2.0 / 3.0;
    const double force = bow.force.at(0.0);
    bow.force = Envelope({{0.0, force}, {release - 1e-9, force}, {release, 0.0}});
    c.excitations.push_back(bow);
    const RenderResult res = render(c);
    const auto start = static_cast<std::size_t>(std::ceil(release * static_cast<double>(res.samples.size())));
    const PitchEstimate est = estimate_f0(std::span<const double>(res.samples).subspan(start), c.sample_rate);
    const double f_hat = fletcher_modes(kF0, c.string.kappa, 1).modes.front();
    const double d = est.voiced ? std::abs(est.f0 - f_hat) : std::numeric_limits<double>::infinity();
    r.values["bow_tail_f_est"] = est.f0;
    r.values["bow_tail_f_hat"] = f_hat;
    r.checks.push_back(make_check("bow tail |f_est - f_hat| (Hz)", d, Rel::le, kDetuneBound));
  });
}

CriterionReport check_scaling() {
  return timed(10, "render time scaling", [](CriterionReport& r) {
    const int repeats = 7;
    SweepCase shorter{"half", pluck_config(2.0, 1.0, 0.5)};
    SweepCase longer{"full", pluck_config(2.0, 1.0, 1.0)};
    const BenchRow a = benchmark_case(shorter, repeats);
    const BenchRow b = benchmark_case(longer, repeats);
    const double ratio = b.median / a.median;
    r.values["median_half_s"] = a.median;
    r.values["median_full_s"] = b.median;
    r.values["time_ratio"] = ratio;
    r.checks.push_back(range_check("median time ratio for doubled N_t", ratio, kScalingLow, kScalingHigh));

    const unsigned cores = std::thread::hardware_concurrency();
    r.values["cores"] = cores;
    SweepCase batch{"batch", pluck_config(2.0, 1.0, 0.25)};
    batch.batch = 8;
    const int base_workers = cores >= kWorkerCores ? 2 : 1;
    batch.workers = base_workers;
    const double t1 = benchmark_case(batch, 3).median;
    batch.workers = 2 * base_workers;
    const double t2 = benchmark_case(batch, 3).median;
    r.values["worker_speedup"] = t1 / t2;
    if (cores >= kWorkerCores) {
      r.checks.push_back(make_check(fmt::format("speedup {} -> {} workers", base_workers, 2 * base_workers), t1 / t2,
                                    Rel::ge, kWorkerSpeedup));
    } else {
      r.notes.push_back(fmt::format(
          "worker speedup check needs >= {} cores, machine has {}; measured {}->{} workers speedup {:.2f} (not gated)",
          kWorkerCores, cores, base_workers, 2 * base_workers, t1 / t2));
    }
  });
}

CriterionReport check_determinism(const std::filesystem::path& scratch) {
  return timed(11, "byte-identical output", [&](CriterionReport& r) {
    const auto dir = scratch_dir(scratch);
    SimulationConfig c = pluck_config(5.88, 3.0, 0.25);
    set_loss(c, 0.5, 1e-4);
    c.excitations.push_back(HammerSpec{.start = 0.05});
    const auto first = export_render(render(c), dir / "run_a.wav");
    const auto second = export_render(render(c), dir / "run_b.wav");
    const bool same_runs = first.sha256 == second.sha256;
    r.values["runs_identical"] = same_runs;
    r.checks.push_back(make_check("two renders, identical audio (1 = yes)", same_runs, Rel::ge, 1.0));

    ParamDistribution dist;
    dist.seed = 42;
    dist.base.duration = 0.1;
    dist.kinds = {ExcitationKind::pluck, ExcitationKind::hammer};
    const std::size_t n = 6;
    std::vector<std::vector<nlohmann::json>> manifests;
    for (int workers : {1, 3}) {
      const auto out = dir / fmt::format("dataset_w{}", workers);
      std::filesystem::remove_all(out);
      generate_dataset(dist, n, {out, workers});
      std::vector<nlohmann::json> records;
      for (auto& rec : read_manifest(out / kManifestName)) records.push_back(without_timing(rec));
      manifests.push_back(std::move(records));
    }
    const bool same_workers = manifests[0] == manifests[1] && manifests[0].size() == n;
    r.values["workers_identical"] = same_workers;
    r.checks.push_back(make_check("dataset with 1 vs 3 workers, identical records (1 = yes)", same_workers, Rel::ge, 1.0));
    if (scratch.empty()) std::filesystem::remove_all(dir);
  });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"detune",      "modes",      "nonlinear", "oracle",
                                              "decoupling",  "stability",  "dissipation",
                                              "excitation",  "scaling",    "determinism", "all"};
  return names;
}

std::vector<CriterionReport> run_suite(const std::string& suite, const std::filesystem::path& scratch) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    throw std::invalid_argument(fmt::format("unknown suite '{}'", suite));
  }
  const bool all = suite == "all";
  std::vector<CriterionReport> out;
  if (all || suite == "detune") {
    const auto sweep = detune_sweep();
    out.push_back(check_detune_bound(sweep));
    out.push_back(check_detune_monotone(sweep));
  }
  if (all || suite == "modes") out.push_back(check_mode_match());
  if (all || suite == "nonlinear") out.push_back(check_nonlinear_signature());
  if (all || suite == "oracle") out.push_back(check_oracle());
  if (all || suite == "decoupling") out.push_back(check_decoupling());
  if (all || suite == "stability") out.push_back(check_stability());
  if (all || suite == "dissipation") out.push_back(check_dissipation());
  if (all || suite == "excitation") out.push_back(check_excitation());
  if (all || suite == "scaling") out.push_back(check_scaling());
  if (all || suite == "determinism") out.push_back(check_determinism(scratch));
  return out;
}

void print_reports(std::ostream& out, const std::vector<CriterionReport>& reports) {
  for (const auto& r : reports) {
    out << fmt::format("[{}] {:<2} {} ({:.1f} s)\n", r.passed() ? "PASS" : "FAIL", r.id, r.title, r.seconds);
    for (const auto& c : r.checks) {
      out << fmt::format("       {:<4} {:<58} {:>14.6g}  {}\n", c.passed ? "ok" : "FAIL", c.label, c.value, c.bound);
    }
    for (const auto& note : r.notes) out << "       note: " << note << '\n';
  }
}

}  // namespace nlstring
