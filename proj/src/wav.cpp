#include "nlstring/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "nlstring/checksum.hpp"
#include "nlstring/config_io.hpp"

namespace nlstring {

namespace {

static_assert(std::endian::native == std::endian::little, "wav writer assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t at) {
  if (at + sizeof(T) > in.size()) throw std::runtime_error("truncated wav file");
  T value;
  std::memcpy(&value, in.data() + at, sizeof(T));
  return value;
}

}  // namespace

std::string to_string(SampleFormat format) {
  return format == SampleFormat::float32 ? "float32" : "pcm16";
}

SampleFormat parse_sample_format(const std::string& name) {
  if (name == "float32" || name == "f32") return SampleFormat::float32;
  if (name == "pcm16" || name == "s16" || name == "int16") return SampleFormat::pcm16;
  throw std::invalid_argument(fmt::format("unknown sample format '{}' (float32 | pcm16)", name));
}

void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               double sample_rate, SampleFormat format) {
  const bool is_float = format == SampleFormat::float32;
  const std::uint16_t bytes_per_sample = is_float ? 4 : 2;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * bytes_per_sample);
  const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate));

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put<std::uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, is_float ? kFormatFloat : kFormatPcm);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * bytes_per_sample);
  put<std::uint16_t>(out, bytes_per_sample);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  out += "data";
  put<std::uint32_t>(out, data_bytes);
  for (double s : samples) {
    if (is_float) {
      put<float>(out, static_cast<float>(s));
    } else {
      const double c = std::clamp(s, -1.0, 1.0);
      put<std::int16_t>(out, static_cast<std::int16_t>(std::lround(std::min(c * 32768.0, 32767.0))));
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error(fmt::format("write failed for {}", path.string()));
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  const std::string in((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (in.size() < 12 || in.compare(0, 4, "RIFF") != 0 || in.compare(8, 4, "WAVE") != 0) {
    throw std::runtime_error("not a RIFF/WAVE file");
  }
  WavData wav;
  std::uint16_t tag = 0, channels = 0, bits = 0;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= in.size()) {
    const std::string id = in.substr(at, 4);
    const auto size = take<std::uint32_t>(in, at + 4);
    const std::size_t body = at + 8;
    if (id == "fmt ") {
      tag = take<std::uint16_t>(in, body);
      channels = take<std::uint16_t>(in, body + 2);
      wav.sample_rate = take<std::uint32_t>(in, body + 4);
      bits = take<std::uint16_t>(in, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw std::runtime_error("data chunk before fmt chunk");
      if (channels != 1) throw std::runtime_error("only mono files are supported");
      if (tag == kFormatFloat && bits == 32) {
        wav.format = SampleFormat::float32;
        for (std::size_t i = 0; i + 4 <= size; i += 4) wav.samples.push_back(take<float>(in, body + i));
      } else if (tag == kFormatPcm && bits == 16) {
        wav.format = SampleFormat::pcm16;
        for (std::size_t i = 0; i + 2 <= size; i += 2) {
          wav.samples.push_back(take<std::int16_t>(in, body + i) / 32768.0);
        }
      } else {
        throw std::runtime_error(fmt::format("unsupported encoding (tag {}, {} bits)", tag, bits));
      }
      return wav;
    }
    at = body + size + (size & 1u);
  }
  throw std::runtime_error("no data chunk");
}

NormalizedAudio normalize_peak(std::span<const double> samples) {
  NormalizedAudio out;
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) out.raw_scale = peak / std::pow(10.0, kExportPeakDb / 20.0);
  out.samples.reserve(samples.size());
  for (double s : samples) out.samples.push_back(s / out.raw_scale);
  return out;
}

nlohmann::json render_metadata(const RenderResult& result, double raw_scale, SampleFormat format) {
  const auto& prov = result.provenance;
  const auto& diag = result.diagnostics;
  nlohmann::json j;
  j["config"] = to_json(prov.config);
  j["config_hash"] = config_hash(prov.config);
  j["seed"] = prov.seed;
  j["engine_version"] = prov.engine_version;
  j["raw_scale"] = raw_scale;
  j["peak_dbfs"] = kExportPeakDb;
  j["format"] = to_string(format);
  j["sample_rate"] = prov.config.sample_rate;
  j["samples"] = result.samples.size();
  j["grid"] = {{"n_t", prov.grid.n_t}, {"n_l", prov.grid.n_l}, {"h_t", prov.grid.h_t},
               {"h_l", prov.grid.h_l}, {"k", prov.grid.k}};
  j["diagnostics"] = {{"max_newton_iterations", diag.max_iterations},
                      {"max_newton_residual", diag.max_residual}};
  j["warnings"] = result.warnings;
  return j;
}

ExportedAudio export_render(const RenderResult& result, const std::filesystem::path& path,
                            SampleFormat format) {
  const NormalizedAudio audio = normalize_peak(result.samples);
  ExportedAudio out;
  out.audio = path;
  out.sidecar = std::filesystem::path(path).replace_extension(".json");
  out.raw_scale = audio.raw_scale;
  write_wav(path, audio.samples, result.provenance.config.sample_rate, format);
  std::ofstream meta(out.sidecar);
  if (!meta) throw std::runtime_error(fmt::format("cannot write {}", out.sidecar.string()));
  meta << render_metadata(result, audio.raw_scale, format).dump(2) << '\n';
  out.sha256 = sha256_file(path);
  return out;
}

}  // namespace nlstring
