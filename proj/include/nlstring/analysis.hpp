#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlstring {

struct RenderResult;

/// Modes of a lossless stiff string with clamped ends (Fletcher):
///   f_p = f0 (p + 1) (1 + 2 sqrt(K) / pi + 4 K / pi^2) sqrt(1 + K (p + 1)^2),
/// with K = (pi kappa / gamma)^2 and gamma = 2 f0.
struct ModeTable {
  double f0 = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double K = 0.0;
  std::vector<double> modes;
};

ModeTable fletcher_modes(double f0, double kappa, int count);

struct PitchEstimate {
  bool voiced = false;
  double f0 = 0.0;           // Hz, valid when voiced
  double correlation = 0.0;  // normalised autocorrelation at the period
};

/// Fundamental frequency of a periodic signal.
///
/// The period is located on the normalised autocorrelation (first lag whose
/// peak reaches half of the strongest one, parabolic refinement), then the
/// estimate is refined on the strongest nearby peak of a zero-padded Hann
/// spectrum. A partial at f/2 or f/3 within 20 dB of that peak takes over.
/// Returns voiced = false for silence or when the autocorrelation peak is
/// below 0.3. Throws std::invalid_argument for less than 0.25 s of audio.
PitchEstimate estimate_f0(std::span<const double> samples, double sample_rate,
                          double min_f0 = 50.0, double max_f0 = 2000.0);

/// Fraction of the render used for pitch analysis (the final half).
inline constexpr double kDetuneWindow = 0.5;

/// f0_est - f_0 of the expected mode table over the final half of the render;
/// empty when the tail is unvoiced.
std::optional<double> detune(const RenderResult& render, const ModeTable& expected);
std::optional<double> detune(std::span<const double> samples, double sample_rate,
                             const ModeTable& expected);

struct SpectrumOptions {
  std::size_t fft_size = 0;  // 0: the sample count
  double floor_db = -80.0;   // peak threshold relative to the strongest bin
  double min_peak_distance_hz = 0.0;
  double max_frequency = 0.0;  // 0: Nyquist
};

struct SpectralPeak {
  double frequency = 0.0;
  double magnitude_db = 0.0;
};

struct SpectrumReport {
  std::vector<double> frequencies;
  std::vector<double> magnitude_db;  // 20 log10 |X|, periodic Hann window
  std::vector<SpectralPeak> peaks;   // ascending frequency
  std::string window = "hann";
  std::size_t fft_size = 0;
  std::size_t sample_count = 0;
  double sample_rate = 0.0;
  double floor_db = -80.0;

  double bin_width() const { return sample_rate / static_cast<double>(fft_size); }
};

/// Hann-windowed log-magnitude spectrum with local-maximum peak picking.
/// With min_peak_distance_hz > 0 a peak is kept only if no stronger peak lies
/// within that distance. Throws std::invalid_argument for empty input.
SpectrumReport spectrum(std::span<const double> samples, double sample_rate,
                        const SpectrumOptions& options = {});

/// Energy outside +-band of every mode, relative to the total energy up to
/// the last mode + band, in dB. Throws std::invalid_argument when the bands
/// leave nothing in between.
double phantom_partial_energy(const SpectrumReport& report, const ModeTable& modes, double band);

/// Count of the first modes with a detected peak within `tolerance` relative frequency.
int matched_modes(const SpectrumReport& report, const ModeTable& modes, double tolerance);

/// How many of the first `count` detected peaks lie within `tolerance`
/// relative frequency of some mode of the table.
int peaks_on_modes(const SpectrumReport& report, const ModeTable& modes, int count, double tolerance);

/// RMS of consecutive windows of `window` samples (the last partial window is dropped).
std::vector<double> windowed_rms(std::span<const double> samples, std::size_t window);

}  // namespace nlstring
