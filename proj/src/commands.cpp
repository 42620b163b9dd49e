#include "nlstring/commands.hpp"

#include <fstream>

#include <fmt/format.h>

#include "nlstring/analysis.hpp"
#include "nlstring/benchmark.hpp"
#include "nlstring/config_io.hpp"
#include "nlstring/dataset.hpp"
#include "nlstring/errors.hpp"
#include "nlstring/grid.hpp"
#include "nlstring/render.hpp"
#include "nlstring/verification.hpp"

namespace nlstring {

namespace {

void apply(const Overrides& o, SimulationConfig& c) {
  if (o.seed) c.seed = *o.seed;
  if (o.duration) c.duration = *o.duration;
  if (o.sample_rate) c.sample_rate = *o.sample_rate;
}

std::filesystem::path with_suffix(const std::filesystem::path& path, const std::string& suffix) {
  auto p = path;
  p.replace_extension();
  p += suffix;
  return p;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt::format("{:.17g}", m(i, j));
    out << '\n';
  }
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumReport& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << fmt::format("# window: {}, fft_size: {}, samples: {}, sample_rate: {}\n", s.window, s.fft_size,
                     s.sample_count, s.sample_rate);
  out << "frequency_hz,magnitude_db,peak\n";
  std::size_t next_peak = 0;
  for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
    bool peak = next_peak < s.peaks.size() && s.peaks[next_peak].frequency == s.frequencies[i];
    if (peak) ++next_peak;
    out << fmt::format("{:.10g},{:.10g},{}\n", s.frequencies[i], s.magnitude_db[i], peak ? 1 : 0);
  }
}

}  // namespace

int cmd_render(const std::filesystem::path& config_path, const std::filesystem::path& out_path,
               const RenderFlags& flags, std::ostream& out, std::ostream& err) {
  try {
    SimulationConfig config = load_config(config_path);
    apply(flags.overrides, config);
    const ValidationReport report = validate(config);
    if (!report.ok()) {
      err << "invalid config: " << report.summary() << '\n';
      return 2;
    }
    RenderOptions options;
    options.record_fields = flags.dump_fields;
    const RenderResult result = render(config, options);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    const auto exported = export_render(result, out_path, flags.format);
    if (flags.dump_fields) {
      write_matrix_csv(with_suffix(out_path, ".u.csv"), *result.u_field);
      write_matrix_csv(with_suffix(out_path, ".zeta.csv"), *result.zeta_field);
      if (!result.samples.empty()) {
        write_spectrum_csv(with_suffix(out_path, ".spectrum.csv"), spectrum(result.samples, config.sample_rate));
      }
    }
    out << fmt::format("wrote {} ({} samples, sha256 {})\n", exported.audio.string(), result.samples.size(),
                       exported.sha256);
    return 0;
  } catch (const SimulationError& e) {
    err << fmt::format("simulation failed at step {} ({}): {}\n", e.step(), SimulationError::kind_name(e.kind()),
                       e.what());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int cmd_dataset(const std::filesystem::path& dist_path, std::size_t n, const std::filesystem::path& out_dir,
                const DatasetFlags& flags, std::ostream& out, std::ostream& err) {
  try {
    ParamDistribution dist = load_distribution(dist_path);
    if (flags.overrides.seed) dist.seed = *flags.overrides.seed;
    Overrides base_only = flags.overrides;
    base_only.seed.reset();
    apply(base_only, dist.base);
    const DatasetSummary s = generate_dataset(dist, n, {out_dir, flags.workers, flags.format}, &err);
    out << fmt::format("{} rendered, {} skipped; manifest {}\n", s.generated, s.failed, s.manifest.string());
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int cmd_verify(const std::string& suite, const std::filesystem::path& scratch, std::ostream& out,
               std::ostream& err) {
  try {
    const auto reports = run_suite(suite, scratch);
    print_reports(out, reports);
    int failed = 0;
    for (const auto& r : reports) failed += r.passed() ? 0 : 1;
    out << fmt::format("{} of {} criteria passed\n", reports.size() - failed, reports.size());
    return failed ? 1 : 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int cmd_bench(const std::filesystem::path& sweep_path, int repeats, const std::filesystem::path& out_path,
              std::ostream& out, std::ostream& err) {
  try {
    const BenchTable table = benchmark(load_sweep(sweep_path), repeats);
    if (out_path.empty()) {
      write_csv(out, table);
      return 0;
    }
    std::ofstream file(out_path);
    if (!file) throw std::runtime_error(fmt::format("cannot write {}", out_path.string()));
    if (out_path.extension() == ".json") {
      file << to_json(table).dump(2) << '\n';
    } else {
      write_csv(file, table);
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace nlstring
