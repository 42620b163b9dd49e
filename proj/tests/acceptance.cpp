// Acceptance gate: reruns every criterion and judges the raw measurements
// against the thresholds pinned below, independently of the library's own
// verdicts.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "nlstring/verification.hpp"

using nlstring::CriterionReport;

namespace {

constexpr double kDetuneMaxHz = 3.0;
constexpr double kMonotoneSlackHz = 0.0;
constexpr int kPeaksOnModesMin = 8;
constexpr double kOracleMax = 1e-10;
constexpr double kDecouplingMax = 1e-14;
constexpr double kGrowthMax = 10.0;
constexpr double kRmsRatioMax = 1.05;
constexpr double kBowTailMaxHz = 2.0;
constexpr double kTimeRatioMin = 1.7;
constexpr double kTimeRatioMax = 2.6;
constexpr double kWorkerSpeedupMin = 1.6;
constexpr double kWorkerGateCores = 4.0;
constexpr double kKappas[] = {0.5, 2.0, 5.88, 9.63};

struct Verdict {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      passed = false;
      detail += " [violated]";
    }
  }
};

std::string key(const char* prefix, double kappa) { return fmt::format("{}_{:g}", prefix, kappa); }

Verdict judge_detune_bound(const CriterionReport& r) {
  Verdict v;
  for (double kappa : kKappas) {
    const double d = r.value(key("detune", kappa));
    v.require(std::abs(d) <= kDetuneMaxHz, fmt::format("kappa {:g}: {:+.3f} Hz", kappa, d));
  }
  return v;
}

Verdict judge_detune_monotone(const CriterionReport& r) {
  Verdict v;
  double previous = -INFINITY;
  for (double kappa : kKappas) {
    const double d = r.value(key("offset", kappa));
    v.require(d >= previous - kMonotoneSlackHz, fmt::format("kappa {:g}: |f_est - f0| {:.3f} Hz", kappa, d));
    previous = d;
  }
  return v;
}

Verdict judge_modes(const CriterionReport& r) {
  Verdict v;
  const double n = r.value("peaks_on_modes");
  v.require(n >= kPeaksOnModesMin, fmt::format("{:g} of the first 10 peaks on modes", n));
  return v;
}

Verdict judge_nonlinear(const CriterionReport& r) {
  Verdict v;
  const double a = r.value("ratio_1");
  const double b = r.value("ratio_1.56");
  const double c = r.value("ratio_2.12");
  v.require(a < b && b < c, fmt::format("phantom energy {:.2f} < {:.2f} < {:.2f} dB", a, b, c));
  return v;
}

Verdict judge_oracle(const CriterionReport& r) {
  Verdict v;
  const double d = r.value("max_abs_diff");
  v.require(d < kOracleMax, fmt::format("max diff {:.3g}", d));
  return v;
}

Verdict judge_decoupling(const CriterionReport& r) {
  Verdict v;
  const double z = r.value("max_abs_zeta");
  v.require(z <= kDecouplingMax, fmt::format("max |zeta| {:.3g}", z));
  return v;
}

Verdict judge_stability(const CriterionReport& r) {
  Verdict v;
  const double g = r.value("growth");
  v.require(g <= kGrowthMax, fmt::format("growth {:.3g}", g));
  v.require(r.value("grid_violations") >= 1, "undersized grid rejected by check_grid");
  v.require(r.value("config_violations") >= 1, "undersized grid rejected by validate");
  return v;
}

Verdict judge_dissipation(const CriterionReport& r) {
  Verdict v;
  const double a = r.value("max_rms_ratio_linear");
  const double b = r.value("max_rms_ratio_nonlinear");
  v.require(a <= kRmsRatioMax, fmt::format("linear rms ratio {:.3f}", a));
  v.require(b <= kRmsRatioMax, fmt::format("nonlinear rms ratio {:.3f}", b));
  return v;
}

Verdict judge_excitation(const CriterionReport& r) {
  Verdict v;
  v.require(r.value("zero_bow_identical") == 1.0, "zero-force bow bit-identical");
  v.require(r.value("hammer_min_force") >= 0.0, fmt::format("hammer min force {:.3g}", r.value("hammer_min_force")));
  v.require(r.value("hammer_failures") == 0.0, fmt::format("{:g} hammer failures", r.value("hammer_failures")));
  const double tail = std::abs(r.value("bow_tail_f_est") - r.value("bow_tail_f_hat"));
  v.require(tail <= kBowTailMaxHz, fmt::format("bow tail {:.3f} Hz from mode", tail));
  return v;
}

Verdict judge_scaling(const CriterionReport& r) {
  Verdict v;
  const double ratio = r.value("time_ratio");
  v.require(ratio >= kTimeRatioMin && ratio <= kTimeRatioMax, fmt::format("time ratio {:.3f}", ratio));
  const double cores = r.value("cores");
  if (cores >= kWorkerGateCores) {
    const double s = r.value("worker_speedup");
    v.require(s >= kWorkerSpeedupMin, fmt::format("worker speedup {:.2f}", s));
  } else {
    v.require(true, fmt::format("worker speedup not gated on {:g} core(s)", cores));
  }
  return v;
}

Verdict judge_determinism(const CriterionReport& r) {
  Verdict v;
  v.require(r.value("runs_identical") == 1.0, "repeated renders identical");
  v.require(r.value("workers_identical") == 1.0, "dataset identical across worker counts");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path scratch =
      argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::temp_directory_path() / "nlstring_acceptance";
  std::filesystem::remove_all(scratch);
  std::filesystem::create_directories(scratch);

  const auto sweep = nlstring::detune_sweep();
  const std::vector<std::pair<std::function<CriterionReport()>, std::function<Verdict(const CriterionReport&)>>> gates{
      {[&] { return nlstring::check_detune_bound(sweep); }, judge_detune_bound},
      {[&] { return nlstring::check_detune_monotone(sweep); }, judge_detune_monotone},
      {nlstring::check_mode_match, judge_modes},
      {nlstring::check_nonlinear_signature, judge_nonlinear},
      {nlstring::check_oracle, judge_oracle},
      {nlstring::check_decoupling, judge_decoupling},
      {nlstring::check_stability, judge_stability},
      {nlstring::check_dissipation, judge_dissipation},
      {nlstring::check_excitation, judge_excitation},
      {nlstring::check_scaling, judge_scaling},
      {[&] { return nlstring::check_determinism(scratch); }, judge_determinism},
  };

  int failures = 0;
  for (const auto& [run, judge] : gates) {
    Verdict verdict;
    CriterionReport report;
    try {
      report = run();
      verdict = judge(report);
      verdict.require(report.passed(), "library checks agree");
    } catch (const std::exception& e) {
      verdict.passed = false;
      verdict.detail = fmt::format("error: {}", e.what());
    }
    if (!verdict.passed) ++failures;
    fmt::print("{} AC{:<2} {}: {}\n", verdict.passed ? "PASS" : "FAIL", report.id, report.title, verdict.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} acceptance criteria passed\n", gates.size() - failures, gates.size());
  return failures == 0 ? 0 : 1;
}
