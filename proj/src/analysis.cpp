#include "nlstring/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fftw3.h>

#include "nlstring/render.hpp"

namespace nlstring {

namespace {

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> forward_real(std::vector<double> in) {
  const int n = static_cast<int>(in.size());
  std::vector<std::complex<double>> out(in.size() / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> inverse_real(std::vector<std::complex<double>> in, std::size_t n) {
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

constexpr double kPeriodFraction = 0.5;
constexpr double kVoicedCorrelation = 0.3;
constexpr double kSubharmonicDb = 20.0;
constexpr double kClusterSpan = 1.25;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double hann(std::size_t i, std::size_t n) {
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
}

// Vertex offset of the parabola through (-1, a), (0, b), (1, c).
double parabolic_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

std::vector<double> log_magnitude(const std::vector<std::complex<double>>& spec) {
  std::vector<double> out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) out[i] = std::log(std::max(std::abs(spec[i]), 1e-300));
  return out;
}

}  // namespace

ModeTable fletcher_modes(double f0, double kappa, int count) {
  ModeTable t;
  t.f0 = f0;
  t.kappa = kappa;
  t.gamma = 2.0 * f0;
  const double r = std::numbers::pi * kappa / t.gamma;
  t.K = r * r;
  const double pi = std::numbers::pi;
  const double clamp_factor = 1.0 + 2.0 / pi * std::sqrt(t.K) + 4.0 / (pi * pi) * t.K;
  t.modes.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int p = 0; p < count; ++p) {
    const double m = p + 1.0;
    t.modes.push_back(f0 * m * clamp_factor * std::sqrt(1.0 + t.K * m * m));
  }
  return t;
}

PitchEstimate estimate_f0(std::span<const double> samples, double sample_rate, double min_f0,
                          double max_f0) {
  if (static_cast<double>(samples.size()) < 0.25 * sample_rate) {
    throw std::invalid_argument("pitch estimation needs at least 0.25 s of audio");
  }
  PitchEstimate est;
  const std::size_t n = samples.size();
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(samples.begin(), samples.end());
  double energy = 0.0;
  double peak = 0.0;
  for (double& v : x) {
    v -= mean;
    energy += v * v;
    peak = std::max(peak, std::abs(v));
  }
  if (!(energy > 0.0) || peak < 1e-300) return est;

  // Coarse period from the autocorrelation.
  const std::size_t m = next_pow2(2 * n);
  std::vector<double> padded(m, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  auto spec = forward_real(padded);
  for (auto& c : spec) c = std::norm(c);
  const auto acf = inverse_real(spec, m);
  const double r0 = acf[0];
  if (!(r0 > 0.0)) return est;

  const auto lag_min = static_cast<std::size_t>(std::max(1.0, std::floor(sample_rate / max_f0)));
  const auto lag_max = std::min(n - 2, static_cast<std::size_t>(std::ceil(sample_rate / min_f0)));
  std::vector<std::size_t> local;
  double best = -1.0;
  for (std::size_t lag = std::max<std::size_t>(lag_min, 1); lag <= lag_max; ++lag) {
    if (acf[lag] > acf[lag - 1] && acf[lag] >= acf[lag + 1]) {
      local.push_back(lag);
      best = std::max(best, acf[lag] / r0);
    }
  }
  if (local.empty() || best < kVoicedCorrelation) {
    est.correlation = std::max(best, 0.0);
    return est;
  }
  std::size_t lag = local.front();
  for (std::size_t l : local) {
    if (acf[l] / r0 >= kPeriodFraction * best) {
      lag = l;
      break;
    }
  }
  // Ripple from high partials splits the period peak; keep the strongest lag of its cluster.
  const std::size_t first = lag;
  for (std::size_t l : local) {
    if (l > first && static_cast<double>(l) <= kClusterSpan * static_cast<double>(first) && acf[l] > acf[lag]) lag = l;
  }
  const double frac = parabolic_offset(acf[lag - 1], acf[lag], acf[lag + 1]);
  const double coarse = sample_rate / (static_cast<double>(lag) + frac);
  est.correlation = acf[lag] / r0;

  // Refinement on the strongest spectral peak near the coarse estimate.
  const std::size_t fft = next_pow2(8 * n);
  std::vector<double> windowed(fft, 0.0);
  for (std::size_t i = 0; i < n; ++i) windowed[i] = x[i] * hann(i, n);
  const auto logmag = log_magnitude(forward_real(std::move(windowed)));
  const double bin = sample_rate / static_cast<double>(fft);
  auto strongest_near = [&](double f) -> std::size_t {
    const auto lo = static_cast<std::size_t>(std::max(1.0, std::floor(0.9 * f / bin)));
    const auto hi = std::min(logmag.size() - 2, static_cast<std::size_t>(std::ceil(1.1 * f / bin)));
    std::size_t found = 0;
    for (std::size_t b = lo; b <= hi; ++b) {
      if (logmag[b] > logmag[b - 1] && logmag[b] >= logmag[b + 1] &&
          (found == 0 || logmag[b] > logmag[found])) {
        found = b;
      }
    }
    return found;
  };
  std::size_t best_bin = strongest_near(coarse);
  est.voiced = true;
  if (best_bin == 0) {
    est.f0 = coarse;
    return est;
  }
  // Octave check: prefer a sub-multiple when it carries a comparable partial.
  const double db_per_neper = 20.0 / std::log(10.0);
  for (int divisor = 3; divisor >= 2; --divisor) {
    const double f = static_cast<double>(best_bin) * bin / divisor;
    if (f < min_f0) continue;
    const std::size_t sub = strongest_near(f);
    if (sub != 0 && (logmag[best_bin] - logmag[sub]) * db_per_neper <= kSubharmonicDb) {
      best_bin = sub;
      break;
    }
  }
  const double off = parabolic_offset(logmag[best_bin - 1], logmag[best_bin], logmag[best_bin + 1]);
  est.f0 = (static_cast<double>(best_bin) + off) * bin;
  return est;
}

std::optional<double> detune(std::span<const double> samples, double sample_rate,
                             const ModeTable& expected) {
  const auto start = static_cast<std::size_t>(std::floor((1.0 - kDetuneWindow) * static_cast<double>(samples.size())));
  const auto est = estimate_f0(samples.subspan(start), sample_rate);
  if (!est.voiced || expected.modes.empty()) return std::nullopt;
  return est.f0 - expected.modes.front();
}

std::optional<double> detune(const RenderResult& render, const ModeTable& expected) {
  return detune(render.samples, render.provenance.config.sample_rate, expected);
}

SpectrumReport spectrum(std::span<const double> samples, double sample_rate,
                        const SpectrumOptions& options) {
  if (samples.empty()) throw std::invalid_argument("spectrum of an empty signal");
  SpectrumReport rep;
  rep.sample_rate = sample_rate;
  rep.floor_db = options.floor_db;
  const std::size_t fft = options.fft_size == 0 ? samples.size() : options.fft_size;
  const std::size_t n = std::min(samples.size(), fft);
  rep.fft_size = fft;
  rep.sample_count = n;

  std::vector<double> buf(fft, 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[i] = samples[i] * hann(i, n);
  const auto spec = forward_real(std::move(buf));
  const double nyquist = sample_rate / 2.0;
  const double fmax = options.max_frequency > 0.0 ? std::min(options.max_frequency, nyquist) : nyquist;
  const double bin = rep.bin_width();
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * bin;
    if (f > fmax) break;
    rep.frequencies.push_back(f);
    rep.magnitude_db.push_back(20.0 * std::log10(std::max(std::abs(spec[k]), 1e-20)));
  }

  const auto& mag = rep.magnitude_db;
  const double top = *std::max_element(mag.begin(), mag.end());
  std::vector<std::size_t> cand;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    const bool left = k == 0 || mag[k] > mag[k - 1];
    const bool right = k + 1 == mag.size() || mag[k] >= mag[k + 1];
    if (left && right && mag[k] >= top + options.floor_db) cand.push_back(k);
  }
  if (options.min_peak_distance_hz > 0.0) {
    std::vector<std::size_t> order = cand;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
    std::vector<std::size_t> kept;
    for (std::size_t k : order) {
      const bool clear = std::none_of(kept.begin(), kept.end(), [&](std::size_t j) {
        return std::abs(rep.frequencies[j] - rep.frequencies[k]) < options.min_peak_distance_hz;
      });
      if (clear) kept.push_back(k);
    }
    std::sort(kept.begin(), kept.end());
    cand = std::move(kept);
  }
  for (std::size_t k : cand) rep.peaks.push_back({rep.frequencies[k], mag[k]});
  return rep;
}

double phantom_partial_energy(const SpectrumReport& report, const ModeTable& modes, double band) {
  if (modes.modes.empty()) throw std::invalid_argument("mode table is empty");
  const double upper = modes.modes.back() + band;
  double total = 0.0;
  double between = 0.0;
  std::size_t between_bins = 0;
  for (std::size_t k = 0; k < report.frequencies.size(); ++k) {
    const double f = report.frequencies[k];
    if (f > upper) break;
    const double power = std::pow(10.0, report.magnitude_db[k] / 10.0);
    total += power;
    const bool near_mode = std::any_of(modes.modes.begin(), modes.modes.end(),
                                       [&](double fp) { return std::abs(f - fp) <= band; });
    if (!near_mode) {
      between += power;
      ++between_bins;
    }
  }
  if (between_bins == 0) throw std::invalid_argument("band leaves no inter-modal region");
  if (!(total > 0.0)) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(std::max(between, 1e-300) / total);
}

int matched_modes(const SpectrumReport& report, const ModeTable& modes, double tolerance) {
  int count = 0;
  for (double fp : modes.modes) {
    const bool hit = std::any_of(report.peaks.begin(), report.peaks.end(), [&](const SpectralPeak& p) {
      return std::abs(p.frequency - fp) <= tolerance * fp;
    });
    if (hit) ++count;
  }
  return count;
}

int peaks_on_modes(const SpectrumReport& report, const ModeTable& modes, int count, double tolerance) {
  int hits = 0;
  const auto n = std::min<std::size_t>(report.peaks.size(), static_cast<std::size_t>(std::max(count, 0)));
  for (std::size_t i = 0; i < n; ++i) {
    const double f = report.peaks[i].frequency;
    const bool hit = std::any_of(modes.modes.begin(), modes.modes.end(),
                                 [&](double fp) { return std::abs(f - fp) <= tolerance * fp; });
    if (hit) ++hits;
  }
  return hits;
}

std::vector<double> windowed_rms(std::span<const double> samples, std::size_t window) {
  std::vector<double> out;
  if (window == 0) return out;
  for (std::size_t start = 0; start + window <= samples.size(); start += window) {
    double s = 0.0;
    for (std::size_t i = start; i < start + window; ++i) s += samples[i] * samples[i];
    out.push_back(std::sqrt(s / static_cast<double>(window)));
  }
  return out;
}

}  // namespace nlstring
