#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace nlstring {

/// One thresholded comparison of a measured value.
struct Check {
  std::string label;
  double value = 0.0;
  std::string bound;  // human-readable threshold, e.g. "<= 3"
  bool passed = false;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::map<std::string, double> values;  // raw measurements by key
  std::vector<std::string> notes;
  double seconds = 0.0;

  bool passed() const;
  double value(const std::string& key) const;  // throws std::out_of_range
};

/// Pitch measurements of the lossless alpha = 3 pluck sweep shared by the
/// detune criteria.
struct DetuneRow {
  double kappa = 0.0;
  bool voiced = false;
  double f_est = 0.0;
  double f_hat = 0.0;  // Fletcher f_0
};

std::vector<DetuneRow> detune_sweep();

CriterionReport check_detune_bound(const std::vector<DetuneRow>& sweep);      // 1
CriterionReport check_detune_monotone(const std::vector<DetuneRow>& sweep);   // 2
CriterionReport check_mode_match();                                           // 3
CriterionReport check_nonlinear_signature();                                  // 4
CriterionReport check_oracle();                                               // 5
CriterionReport check_decoupling();                                           // 6
CriterionReport check_stability();                                            // 7
CriterionReport check_dissipation();                                          // 8
CriterionReport check_excitation();                                           // 9
CriterionReport check_scaling();                                              // 10
CriterionReport check_determinism(const std::filesystem::path& scratch);      // 11

/// detune, modes, nonlinear, oracle, decoupling, stability, dissipation,
/// excitation, scaling, determinism, and "all".
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite. `scratch` holds the
/// files written by the determinism suite (a temporary directory when empty).
std::vector<CriterionReport> run_suite(const std::string& suite, const std::filesystem::path& scratch = {});

/// Table with one row per check and a verdict line per criterion.
void print_reports(std::ostream& out, const std::vector<CriterionReport>& reports);

}  // namespace nlstring
