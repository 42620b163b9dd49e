#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "nlstring/wav.hpp"

namespace nlstring {

/// Overrides shared by the subcommands; unset fields keep the file's values.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<double> sample_rate;
};

struct RenderFlags {
  Overrides overrides;
  SampleFormat format = SampleFormat::float32;
  bool dump_fields = false;  // also write <out>.u.csv, <out>.zeta.csv and <out>.spectrum.csv
};

struct DatasetFlags {
  Overrides overrides;
  int workers = 1;
  SampleFormat format = SampleFormat::float32;
};

/// Each returns the process exit status and reports problems on `err`.
int cmd_render(const std::filesystem::path& config_path, const std::filesystem::path& out_path,
               const RenderFlags& flags, std::ostream& out, std::ostream& err);
int cmd_dataset(const std::filesystem::path& dist_path, std::size_t n, const std::filesystem::path& out_dir,
                const DatasetFlags& flags, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& suite, const std::filesystem::path& scratch, std::ostream& out,
               std::ostream& err);
/// Writes CSV, or JSON when out_path ends in .json; an empty path prints CSV to `out`.
int cmd_bench(const std::filesystem::path& sweep_path, int repeats, const std::filesystem::path& out_path,
              std::ostream& out, std::ostream& err);

}  // namespace nlstring
