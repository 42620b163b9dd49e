#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "nlstring/benchmark.hpp"
#include "nlstring/checksum.hpp"
#include "nlstring/config_io.hpp"
#include "nlstring/dataset.hpp"
#include "nlstring/rng.hpp"
#include "nlstring/wav.hpp"

using namespace nlstring;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("nlstring_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ParamDistribution small_distribution() {
  ParamDistribution d;
  d.seed = 42;
  d.base.duration = 0.05;
  d.kinds = {ExcitationKind::pluck, ExcitationKind::bow, ExcitationKind::hammer};
  return d;
}

}  // namespace

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = fresh_dir("sha");
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(dir / "abc.txt") == sha256_hex("abc"));
}

TEST_CASE("wav round trip") {
  const auto dir = fresh_dir("wav");
  const std::vector<double> x{0.0, 0.5, -0.25, 0.999, -1.0, 1.7};
  write_wav(dir / "f.wav", x, 48000.0, SampleFormat::float32);
  const WavData f = read_wav(dir / "f.wav");
  CHECK(f.sample_rate == 48000.0);
  CHECK(f.format == SampleFormat::float32);
  REQUIRE(f.samples.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(f.samples[i] == static_cast<float>(x[i]));
  CHECK(fs::file_size(dir / "f.wav") == 44 + 4 * x.size());

  write_wav(dir / "s.wav", x, 44100.0, SampleFormat::pcm16);
  const WavData s = read_wav(dir / "s.wav");
  CHECK(s.format == SampleFormat::pcm16);
  CHECK(s.sample_rate == 44100.0);
  CHECK(std::abs(s.samples[1] - 0.5) <= 1.0 / 32768.0);
  CHECK(s.samples[4] == -1.0);
  CHECK(s.samples[5] == 32767.0 / 32768.0);
  CHECK(fs::file_size(dir / "s.wav") == 44 + 2 * x.size());

  std::ofstream(dir / "bad.wav") << "not audio";
  CHECK_THROWS(read_wav(dir / "bad.wav"));
}

TEST_CASE("peak normalisation is invertible") {
  const std::vector<double> x{1e-4, -3e-4, 2e-4};
  const NormalizedAudio n = normalize_peak(x);
  CHECK(std::abs(*std::max_element(n.samples.begin(), n.samples.end(), [](double a, double b) {
          return std::abs(a) < std::abs(b);
        })) == Catch::Approx(std::pow(10.0, -1.0 / 20.0)));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(n.samples[i] * n.raw_scale == Catch::Approx(x[i]));
  CHECK(normalize_peak(std::vector<double>(4, 0.0)).raw_scale == 1.0);
}

TEST_CASE("export writes audio and sidecar") {
  const auto dir = fresh_dir("export");
  SimulationConfig c;
  c.duration = 0.02;
  c.excitations.push_back(PluckSpec{});
  const RenderResult r = render(c);
  const ExportedAudio e = export_render(r, dir / "take.wav");
  CHECK(e.sidecar == dir / "take.json");
  CHECK(e.sha256 == sha256_file(dir / "take.wav"));
  const auto meta = nlohmann::json::parse(slurp(e.sidecar));
  CHECK(meta["config_hash"] == config_hash(c));
  CHECK(meta["raw_scale"].get<double>() == e.raw_scale);
  CHECK(meta["samples"] == 960);
  const WavData w = read_wav(e.audio);
  REQUIRE(w.samples.size() == 960);
  CHECK(w.samples[100] * e.raw_scale == Catch::Approx(r.samples[100]).epsilon(1e-6));
}

TEST_CASE("dataset manifest") {
  const auto dir = fresh_dir("dataset");
  std::ostringstream log;
  const DatasetSummary s = generate_dataset(small_distribution(), 5, {dir, 2}, &log);
  CHECK(s.generated + s.failed == 5);
  const auto records = read_manifest(s.manifest);
  REQUIRE(records.size() == 5);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i]["index"] == i);
    CHECK(records[i]["seed"] == derive_seed(42, i));
    CHECK(records[i].contains("timing"));
    if (records[i]["status"] == "ok") {
      const SimulationConfig c = parse_config(records[i]["config"].dump());
      CHECK(config_hash(c) == records[i]["config_hash"]);
    }
  }
  CHECK(verify_manifest(dir).empty());

  std::ofstream(dir / records[0]["file"].get<std::string>(), std::ios::app) << "x";
  CHECK_FALSE(verify_manifest(dir).empty());
}

TEST_CASE("records reproduce their samples") {
  const auto dir = fresh_dir("reproduce");
  generate_dataset(small_distribution(), 3, {dir, 1});
  for (const auto& rec : read_manifest(dir / kManifestName)) {
    if (rec["status"] != "ok") continue;
    const auto again = export_render(render(parse_config(rec["config"].dump())), dir / "again.wav");
    CHECK(again.sha256 == rec["sha256"]);
  }
}

TEST_CASE("worker count does not change the dataset") {
  const auto a = fresh_dir("workers_a");
  const auto b = fresh_dir("workers_b");
  generate_dataset(small_distribution(), 6, {a, 1});
  generate_dataset(small_distribution(), 6, {b, 4});
  auto ra = read_manifest(a / kManifestName);
  auto rb = read_manifest(b / kManifestName);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ra[i].erase("timing");
    rb[i].erase("timing");
    CHECK(ra[i] == rb[i]);
  }
}

TEST_CASE("empty dataset and failures") {
  const auto dir = fresh_dir("empty");
  const DatasetSummary s = generate_dataset(small_distribution(), 0, {dir, 3});
  CHECK(s.generated == 0);
  CHECK(fs::exists(s.manifest));
  CHECK(fs::file_size(s.manifest) == 0);

  ParamDistribution stalled = small_distribution();
  stalled.kinds = {ExcitationKind::bow};
  stalled.base.solver.newton_max_iter = 1;
  stalled.base.solver.newton_tol = 1e-300;
  std::ostringstream log;
  const auto bad = fresh_dir("failing");
  const DatasetSummary f = generate_dataset(stalled, 2, {bad, 1}, &log);
  CHECK(f.failed == 2);
  CHECK(f.generated == 0);
  const auto records = read_manifest(f.manifest);
  REQUIRE(records.size() == 2);
  CHECK(records[0]["status"] == "failed");
  CHECK(records[0]["error"]["kind"] == "newton non-convergence");
  CHECK(records[0]["error"]["step"].get<long>() >= 1);
  CHECK_FALSE(records[0].contains("file"));
  CHECK(log.str().find("sample 0 skipped") != std::string::npos);
}

TEST_CASE("unwritable output directory") {
  const auto dir = fresh_dir("blocked");
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS_AS(generate_dataset(small_distribution(), 1, {dir / "file" / "sub", 1}), std::runtime_error);
}

TEST_CASE("benchmark table") {
  SweepSpec sweep;
  SimulationConfig c;
  c.excitations.push_back(PluckSpec{});
  sweep.cases.push_back({"a", c});
  sweep.cases.back().config.duration = 0.01;
  sweep.cases.push_back({"b", c});
  sweep.cases.back().config.duration = 0.02;

  const BenchTable one = benchmark(sweep, 1);
  REQUIRE(one.rows.size() == 2);
  CHECK_FALSE(one.rows[0].dispersion);
  CHECK(one.rows[0].median > 0.0);
  CHECK(one.rows[1].steps == 960);

  const BenchTable three = benchmark(sweep, 3);
  CHECK(three.rows[0].dispersion);
  CHECK(three.rows[0].min <= three.rows[0].median);
  CHECK(three.rows[0].median <= three.rows[0].max);

  std::ostringstream csv;
  write_csv(csv, benchmark(SweepSpec{}, 1));
  const std::string text = csv.str();
  CHECK(text.find("# hardware_threads:") != std::string::npos);
  CHECK(text.substr(text.rfind("label,")) == "label,steps,n_t,n_l,batch,workers,repeats,median_s,mad_s,min_s,max_s\n");
  CHECK(to_json(one)["rows"].size() == 2);
  CHECK(to_json(one)["rows"][0]["mad_s"].is_null());
}
