#include "nlstring/dataset.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "nlstring/checksum.hpp"
#include "nlstring/config_io.hpp"
#include "nlstring/errors.hpp"
#include "nlstring/grid.hpp"
#include "nlstring/parallel.hpp"
#include "nlstring/render.hpp"

namespace nlstring {

namespace {

using nlohmann::json;

/// Appends records in index order, holding back those that finish early.
class ManifestWriter {
 public:
  explicit ManifestWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  }

  void submit(std::size_t index, json record) {
    std::lock_guard lock(mutex_);
    pending_.emplace(index, std::move(record));
    while (!pending_.empty() && pending_.begin()->first == next_) {
      out_ << pending_.begin()->second.dump() << '\n';
      pending_.erase(pending_.begin());
      ++next_;
    }
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::mutex mutex_;
  std::map<std::size_t, json> pending_;
  std::size_t next_ = 0;
};

}  // namespace

DatasetSummary generate_dataset(const ParamDistribution& dist, std::size_t n,
                                const DatasetOptions& options, std::ostream* log) {
  if (const auto report = validate(dist); !report.ok()) throw std::invalid_argument(report.summary());
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec || !std::filesystem::is_directory(options.out_dir)) {
    throw std::runtime_error(fmt::format("cannot create output directory {}", options.out_dir.string()));
  }

  DatasetSummary summary;
  summary.manifest = options.out_dir / kManifestName;
  ManifestWriter writer(summary.manifest);
  std::mutex log_mutex;
  std::size_t failed = 0;

  parallel_for(n, options.workers, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationConfig config = sample_one(dist, i);
    const std::string stem = fmt::format("sample_{:06d}", i);
    json record;
    record["index"] = i;
    record["seed"] = config.seed;
    record["config"] = to_json(config);
    record["config_hash"] = config_hash(config);

    std::optional<std::string> error_kind;
    std::string error_message;
    long error_step = -1;
    try {
      const RenderResult result = render(config);
      const auto exported = export_render(result, options.out_dir / (stem + ".wav"), options.format);
      record["status"] = "ok";
      record["file"] = exported.audio.filename().string();
      record["sidecar"] = exported.sidecar.filename().string();
      record["sha256"] = exported.sha256;
      record["sidecar_sha256"] = sha256_file(exported.sidecar);
      record["raw_scale"] = exported.raw_scale;
      record["diagnostics"] = {{"samples", result.samples.size()},
                               {"n_t", result.provenance.grid.n_t},
                               {"n_l", result.provenance.grid.n_l},
                               {"max_newton_iterations", result.diagnostics.max_iterations},
                               {"max_newton_residual", result.diagnostics.max_residual},
                               {"warnings", result.warnings}};
    } catch (const SimulationError& e) {
      error_kind = SimulationError::kind_name(e.kind());
      error_step = e.step();
      error_message = e.what();
    } catch (const GridError& e) {
      error_kind = "grid";
      error_message = e.what();
    } catch (const std::invalid_argument& e) {
      error_kind = "invalid_config";
      error_message = e.what();
    }
    if (error_kind) {
      record["status"] = "failed";
      record["error"] = {{"kind", *error_kind}, {"message", error_message}};
      if (error_step >= 0) record["error"]["step"] = error_step;
    }
    record["timing"] = {
        {"elapsed_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    writer.submit(i, std::move(record));

    if (error_kind) {
      std::lock_guard lock(log_mutex);
      ++failed;
      if (log) *log << fmt::format("sample {} skipped ({}): {}\n", i, *error_kind, error_message);
    }
  });

  summary.failed = failed;
  summary.generated = n - failed;
  return summary;
}

std::vector<json> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::vector<json> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) records.push_back(json::parse(line));
  }
  return records;
}

std::vector<std::string> verify_manifest(const std::filesystem::path& out_dir) {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  std::size_t expected = 0;
  for (const auto& r : read_manifest(out_dir / kManifestName)) {
    if (r.value("index", std::size_t{0}) != expected) {
      problems.push_back(fmt::format("record {} out of order", expected));
    }
    ++expected;
    if (r.value("status", "") != "ok") continue;
    for (const char* key : {"file", "sidecar"}) {
      const std::string name = r.value(key, "");
      if (!seen.insert(name).second) problems.push_back(fmt::format("{} listed twice", name));
    }
    const auto file = out_dir / r.value("file", "");
    if (!std::filesystem::exists(file)) {
      problems.push_back(fmt::format("{} missing", file.string()));
    } else if (sha256_file(file) != r.value("sha256", "")) {
      problems.push_back(fmt::format("{} checksum mismatch", file.string()));
    }
    const auto sidecar = out_dir / r.value("sidecar", "");
    if (!std::filesystem::exists(sidecar) || sha256_file(sidecar) != r.value("sidecar_sha256", "")) {
      problems.push_back(fmt::format("{} missing or modified", sidecar.string()));
    }
  }
  return problems;
}

}  // namespace nlstring
