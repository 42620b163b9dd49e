#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlstring/render.hpp"

namespace nlstring {

enum class SampleFormat { float32, pcm16 };

std::string to_string(SampleFormat format);
SampleFormat parse_sample_format(const std::string& name);

struct WavData {
  double sample_rate = 0.0;
  SampleFormat format = SampleFormat::float32;
  std::vector<double> samples;  // pcm16 is mapped to [-1, 1)
};

/// Mono RIFF/WAVE. float32 uses WAVE_FORMAT_IEEE_FLOAT, pcm16 clips to [-1, 1].
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               double sample_rate, SampleFormat format = SampleFormat::float32);
WavData read_wav(const std::filesystem::path& path);

/// Peak level written to disk, dBFS.
inline constexpr double kExportPeakDb = -1.0;

struct NormalizedAudio {
  std::vector<double> samples;
  double raw_scale = 1.0;  // raw = samples * raw_scale
};

/// Scales to kExportPeakDb; silence keeps raw_scale = 1.
NormalizedAudio normalize_peak(std::span<const double> samples);

struct ExportedAudio {
  std::filesystem::path audio;
  std::filesystem::path sidecar;
  std::string sha256;  // of the audio file
  double raw_scale = 1.0;
};

/// Metadata written next to the audio: config, config hash, raw scale,
/// grid, sample count, warnings and the solver summary.
nlohmann::json render_metadata(const RenderResult& result, double raw_scale, SampleFormat format);

/// Writes `<path>` and `<path without extension>.json`.
ExportedAudio export_render(const RenderResult& result, const std::filesystem::path& path,
                            SampleFormat format = SampleFormat::float32);

}  // namespace nlstring
