#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nlstring/analysis.hpp"
#include "nlstring/rng.hpp"

using namespace nlstring;
using Catch::Approx;

namespace {

constexpr double kFs = 48000.0;

std::vector<double> sines(const std::vector<std::pair<double, double>>& partials, double seconds) {
  std::vector<double> x(static_cast<std::size_t>(seconds * kFs), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (const auto& [f, a] : partials) x[n] += a * std::sin(2.0 * std::numbers::pi * f * n / kFs);
  }
  return x;
}

long double fletcher_long(long double f0, long double kappa, int p) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double K = (pi * kappa / (2.0L * f0)) * (pi * kappa / (2.0L * f0));
  return f0 * (p + 1) * (1.0L + 2.0L * std::sqrt(K) / pi + 4.0L * K / (pi * pi)) *
         std::sqrt(1.0L + K * (p + 1) * (p + 1));
}

}  // namespace

TEST_CASE("fletcher modes without stiffness are harmonic") {
  const ModeTable t = fletcher_modes(300.0, 0.0, 12);
  REQUIRE(t.modes.size() == 12);
  for (int p = 0; p < 12; ++p) CHECK(t.modes[p] == 300.0 * (p + 1));
  CHECK(t.K == 0.0);
}

TEST_CASE("fletcher modes match a long double evaluation") {
  const ModeTable t = fletcher_modes(300.0, 5.88, 10);
  CHECK(t.gamma == 600.0);
  CHECK(t.K == std::pow(std::numbers::pi * 5.88 / 600.0, 2));
  CHECK(t.K == Approx(9.478e-4).epsilon(1e-3));
  CHECK(t.modes[0] == Approx(306.1).margin(0.05));
  for (int p = 0; p < 10; ++p) {
    CHECK(t.modes[p] == Approx(static_cast<double>(fletcher_long(300.0L, 5.88L, p))).epsilon(1e-14));
  }
  for (int p = 1; p < 10; ++p) CHECK(t.modes[p] / (p + 1) > t.modes[p - 1] / p);
}

TEST_CASE("pitch of pure sinusoids") {
  const auto x = sines({{300.0, 0.5}}, 1.0);
  const PitchEstimate e = estimate_f0(x, kFs);
  REQUIRE(e.voiced);
  CHECK(std::abs(e.f0 - 300.0) <= 0.5);

  for (double f = 80.0; f <= 2000.0; f *= 1.17) {
    const PitchEstimate est = estimate_f0(sines({{f, 0.3}}, 0.5), kFs);
    INFO("f = " << f);
    REQUIRE(est.voiced);
    CHECK(std::abs(est.f0 - f) <= 0.5);
  }
}

TEST_CASE("pitch of harmonic tones with a weak fundamental") {
  const auto x = sines({{220.0, 0.2}, {440.0, 1.0}, {660.0, 0.7}, {880.0, 0.4}}, 0.5);
  const PitchEstimate e = estimate_f0(x, kFs);
  REQUIRE(e.voiced);
  CHECK(std::abs(e.f0 - 220.0) <= 0.5);
}

TEST_CASE("silence and noise are unvoiced") {
  CHECK_FALSE(estimate_f0(std::vector<double>(24000, 0.0), kFs).voiced);
  CounterRng rng(3, 0);
  std::vector<double> noise(24000);
  for (auto& v : noise) v = rng.uniform() - 0.5;
  CHECK_FALSE(estimate_f0(noise, kFs).voiced);
}

TEST_CASE("pitch needs a quarter second") {
  CHECK_THROWS_AS(estimate_f0(std::vector<double>(11999, 0.1), kFs), std::invalid_argument);
}

TEST_CASE("detune of a synthetic tone") {
  const ModeTable modes = fletcher_modes(300.0, 2.0, 10);
  const auto x = sines({{modes.modes[0] + 1.0, 1.0}}, 1.0);
  const auto d = detune(x, kFs, modes);
  REQUIRE(d);
  CHECK(*d == Approx(1.0).margin(0.5));
  CHECK_FALSE(detune(std::vector<double>(48000, 0.0), kFs, modes));
}

TEST_CASE("spectrum of a bin-centred sine") {
  const SpectrumReport s = spectrum(sines({{300.0, 1.0}}, 1.0), kFs);
  CHECK(s.fft_size == 48000);
  CHECK(s.bin_width() == 1.0);
  CHECK(s.window == "hann");
  REQUIRE(s.peaks.size() == 1);
  CHECK(std::abs(s.peaks[0].frequency - 300.0) <= s.bin_width() / 2.0);
  for (double m : s.magnitude_db) CHECK(std::isfinite(m));
}

TEST_CASE("spectrum of a constant") {
  const SpectrumReport s = spectrum(std::vector<double>(4800, 0.25), kFs);
  REQUIRE(s.peaks.size() == 1);
  CHECK(s.peaks[0].frequency == 0.0);
  CHECK_THROWS_AS(spectrum(std::vector<double>{}, kFs), std::invalid_argument);
}

TEST_CASE("peak spacing and band limits") {
  const auto x = sines({{1000.0, 1.0}, {1040.0, 0.5}, {5000.0, 0.8}}, 1.0);
  SpectrumOptions close;
  CHECK(spectrum(x, kFs, close).peaks.size() == 3);
  SpectrumOptions spaced;
  spaced.min_peak_distance_hz = 100.0;
  const auto s = spectrum(x, kFs, spaced);
  REQUIRE(s.peaks.size() == 2);
  CHECK(s.peaks[0].frequency == Approx(1000.0).margin(1.0));
  SpectrumOptions low;
  low.max_frequency = 2000.0;
  CHECK(spectrum(x, kFs, low).peaks.size() == 2);
  for (const auto& p : spectrum(x, kFs, low).peaks) CHECK(p.frequency <= 2000.0);
}

TEST_CASE("mode-aligned mixture has no phantom energy") {
  const ModeTable modes = fletcher_modes(300.0, 5.88, 10);
  std::vector<std::pair<double, double>> partials;
  for (int p = 0; p < 10; ++p) partials.emplace_back(modes.modes[p], 1.0 / (p + 1));
  const SpectrumReport s = spectrum(sines(partials, 1.0), kFs);
  CHECK(phantom_partial_energy(s, modes, 75.0) <= -60.0);
  CHECK(matched_modes(s, modes, 0.01) == 10);
  CHECK(peaks_on_modes(s, modes, 10, 0.01) == 10);

  auto with_phantom = partials;
  with_phantom.emplace_back(0.5 * (modes.modes[3] + modes.modes[4]), 0.05);
  CHECK(phantom_partial_energy(spectrum(sines(with_phantom, 1.0), kFs), modes, 75.0) > -40.0);

  CHECK_THROWS_AS(phantom_partial_energy(s, modes, 400.0), std::invalid_argument);
}

TEST_CASE("windowed rms") {
  const std::vector<double> ones(1050, 2.0);
  const auto r = windowed_rms(ones, 100);
  REQUIRE(r.size() == 10);
  for (double v : r) CHECK(v == 2.0);
  CHECK(windowed_rms(ones, 0).empty());
}
