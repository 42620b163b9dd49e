#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlstring/commands.hpp"
#include "nlstring/verification.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear stiff string synthesizer"};
  app.require_subcommand(1);

  std::string config, out, format = "float32", suite = "all";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration, sample_rate;
  std::size_t n = 0;
  int workers = 1, repeats = 0;
  bool dump_fields = false;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed override");
    cmd->add_option("--duration", duration, "Duration override, s")->check(CLI::NonNegativeNumber);
    cmd->add_option("--sample-rate", sample_rate, "Sample rate override, Hz")->check(CLI::PositiveNumber);
  };
  const auto formats = CLI::IsMember({"float32", "pcm16"});

  auto* render = app.add_subcommand("render", "Render one config to a wav file and metadata sidecar");
  render->add_option("--config,config", config, "Config file (YAML or JSON)")->required();
  render->add_option("--out,-o", out, "Output wav path")->required();
  render->add_option("--format", format, "Sample format")->check(formats);
  render->add_flag("--dump-fields", dump_fields, "Also write u, zeta and spectrum CSVs");
  add_overrides(render);

  auto* dataset = app.add_subcommand("dataset", "Render n samples of a parameter distribution");
  dataset->add_option("--config,config", config, "Distribution file")->required();
  dataset->add_option("-n,--count", n, "Number of samples")->required();
  dataset->add_option("--out,-o", out, "Output directory")->required();
  dataset->add_option("--workers,-j", workers, "Parallel engine instances")->check(CLI::PositiveNumber);
  dataset->add_option("--format", format, "Sample format")->check(formats);
  add_overrides(dataset);

  auto* verify = app.add_subcommand("verify", "Run acceptance suites and print a pass/fail table");
  verify->add_option("suite,--suite", suite, "Suite name")->check(CLI::IsMember(nlstring::suite_names()));
  verify->add_option("--out,-o", out, "Directory for files written by the suites");

  auto* bench = app.add_subcommand("bench", "Time a sweep of render configurations");
  bench->add_option("--config,config", config, "Sweep file")->required();
  bench->add_option("--repeats,-r", repeats, "Repetitions per case (default: the sweep's)");
  bench->add_option("--out,-o", out, "Output table (.csv or .json); stdout when omitted");

  CLI11_PARSE(app, argc, argv);

  const nlstring::Overrides overrides{seed, duration, sample_rate};
  if (*render) {
    nlstring::RenderFlags flags{overrides, nlstring::parse_sample_format(format), dump_fields};
    return nlstring::cmd_render(config, out, flags, std::cout, std::cerr);
  }
  if (*dataset) {
    nlstring::DatasetFlags flags{overrides, workers, nlstring::parse_sample_format(format)};
    return nlstring::cmd_dataset(config, n, out, flags, std::cout, std::cerr);
  }
  if (*verify) return nlstring::cmd_verify(suite, out, std::cout, std::cerr);
  return nlstring::cmd_bench(config, repeats, out, std::cout, std::cerr);
}
