#include "nlstring/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <unistd.h>

#include <fmt/format.h>

#include "nlstring/parallel.hpp"
#include "nlstring/render.hpp"

#ifndef NLSTRING_BUILD_TYPE
#define NLSTRING_BUILD_TYPE "unknown"
#endif

namespace nlstring {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(line.find_first_not_of(' ', colon + 1));
    }
  }
  return "unknown";
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? fmt::format("{:.6e}", *v) : std::string();
}

}  // namespace

BenchEnvironment bench_environment() {
  BenchEnvironment env;
  char host[256] = {};
  env.hostname = gethostname(host, sizeof(host) - 1) == 0 ? host : "unknown";
  env.cpu = cpu_model();
  env.hardware_threads = std::thread::hardware_concurrency();
#if defined(__clang__)
  env.compiler = fmt::format("clang {}", __clang_version__);
#elif defined(__GNUC__)
  env.compiler = fmt::format("gcc {}", __VERSION__);
#else
  env.compiler = "unknown";
#endif
  env.build_type = NLSTRING_BUILD_TYPE;
  env.engine_version = kEngineVersion;
  return env;
}

BenchRow benchmark_case(const SweepCase& c, int repeats) {
  const Grid grid = grid_for(c.config);
  BenchRow row;
  row.label = c.label;
  row.steps = c.config.step_count();
  row.n_t = grid.n_t;
  row.n_l = grid.n_l;
  row.batch = std::max(c.batch, 1);
  row.workers = std::max(c.workers, 1);
  row.repeats = std::max(repeats, 1);

  std::vector<double> times;
  for (int r = 0; r < row.repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(static_cast<std::size_t>(row.batch), row.workers, [&](std::size_t) { render(c.config); });
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  row.median = median_of(times);
  row.min = *std::min_element(times.begin(), times.end());
  row.max = *std::max_element(times.begin(), times.end());
  if (row.repeats > 1) {
    std::vector<double> dev;
    for (double t : times) dev.push_back(std::abs(t - row.median));
    row.dispersion = median_of(dev);
  }
  return row;
}

BenchTable benchmark(const SweepSpec& sweep, int repeats) {
  BenchTable table;
  table.environment = bench_environment();
  const int r = repeats > 0 ? repeats : sweep.repeats;
  for (const auto& c : sweep.cases) table.rows.push_back(benchmark_case(c, r));
  return table;
}

void write_csv(std::ostream& out, const BenchTable& table) {
  const auto& env = table.environment;
  out << "# hostname: " << env.hostname << '\n'
      << "# cpu: " << env.cpu << '\n'
      << "# hardware_threads: " << env.hardware_threads << '\n'
      << "# compiler: " << env.compiler << '\n'
      << "# build_type: " << env.build_type << '\n'
      << "# engine_version: " << env.engine_version << '\n';
  out << "label,steps,n_t,n_l,batch,workers,repeats,median_s,mad_s,min_s,max_s\n";
  for (const auto& r : table.rows) {
    out << fmt::format("{},{},{},{},{},{},{},{:.6e},{},{:.6e},{:.6e}\n", r.label, r.steps, r.n_t, r.n_l,
                       r.batch, r.workers, r.repeats, r.median, optional_cell(r.dispersion), r.min, r.max);
  }
}

nlohmann::json to_json(const BenchTable& table) {
  const auto& env = table.environment;
  nlohmann::json j;
  j["environment"] = {{"hostname", env.hostname},
                      {"cpu", env.cpu},
                      {"hardware_threads", env.hardware_threads},
                      {"compiler", env.compiler},
                      {"build_type", env.build_type},
                      {"engine_version", env.engine_version}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : table.rows) {
    j["rows"].push_back({{"label", r.label},
                         {"steps", r.steps},
                         {"n_t", r.n_t},
                         {"n_l", r.n_l},
                         {"batch", r.batch},
                         {"workers", r.workers},
                         {"repeats", r.repeats},
                         {"median_s", r.median},
                         {"mad_s", r.dispersion ? nlohmann::json(*r.dispersion) : nlohmann::json()},
                         {"min_s", r.min},
                         {"max_s", r.max}});
  }
  return j;
}

}  // namespace nlstring
