#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlstring/sampling.hpp"
#include "nlstring/wav.hpp"

namespace nlstring {

struct DatasetOptions {
  std::filesystem::path out_dir;
  int workers = 1;
  SampleFormat format = SampleFormat::float32;
};

struct DatasetSummary {
  std::filesystem::path manifest;
  std::size_t generated = 0;
  std::size_t failed = 0;
};

inline constexpr const char* kManifestName = "manifest.jsonl";

/// Renders samples 0..n-1 of the distribution into out_dir as
/// sample_NNNNNN.wav plus sidecars and writes manifest.jsonl, one record per
/// line in index order. Failed samples are logged and recorded with their
/// cause instead of aborting the run. Wall-clock data lives under the
/// "timing" key of each record; everything else is independent of scheduling.
/// Throws std::runtime_error when out_dir cannot be created or written.
DatasetSummary generate_dataset(const ParamDistribution& dist, std::size_t n,
                                const DatasetOptions& options, std::ostream* log = nullptr);

/// Records of a manifest file.
std::vector<nlohmann::json> read_manifest(const std::filesystem::path& path);

/// Problems found while checking every record against the files it references.
std::vector<std::string> verify_manifest(const std::filesystem::path& out_dir);

}  // namespace nlstring
