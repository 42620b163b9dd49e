#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlstring/config_io.hpp"

namespace nlstring {

struct BenchEnvironment {
  std::string hostname;
  std::string cpu;
  unsigned hardware_threads = 0;
  std::string compiler;
  std::string build_type;
  std::string engine_version;
};

BenchEnvironment bench_environment();

/// Wall-clock seconds for `batch` renders of one case spread over `workers`.
struct BenchRow {
  std::string label;
  long steps = 0;
  int n_t = 0;
  int n_l = 0;
  int batch = 1;
  int workers = 1;
  int repeats = 1;
  double median = 0.0;
  std::optional<double> dispersion;  // median absolute deviation; empty for one repeat
  double min = 0.0;
  double max = 0.0;
};

struct BenchTable {
  BenchEnvironment environment;
  std::vector<BenchRow> rows;
};

/// Times every case `repeats` times (the sweep's own count when repeats <= 0).
BenchTable benchmark(const SweepSpec& sweep, int repeats = 0);
BenchRow benchmark_case(const SweepCase& c, int repeats);

/// Comma-separated table with the environment as leading '#' lines.
void write_csv(std::ostream& out, const BenchTable& table);
nlohmann::json to_json(const BenchTable& table);

}  // namespace nlstring
