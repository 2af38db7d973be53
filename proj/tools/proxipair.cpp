// proxipair <run|gap|solve|stability|oracle> <config> [--output-dir PATH] [--seed N] [--quiet]
//
// Exit status: 0 when every check passes, 1 when a check fails or a run errors,
// 2 for usage and config errors.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "proxipair/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace proxipair;
  CLI::App app{"Coupled best proximity points: gap, solve, stability and oracle runs"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  for (const char* name : {"run", "gap", "solve", "stability", "oracle"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " stage");
    if (std::string(name) == "run") sub->description("run every stage");
    sub->add_option("config", config_path, "problem config file")->required();
    sub->add_option("--output-dir", output_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--quiet", quiet, "no progress output on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const Stage stage = *parse_stage(app.get_subcommands().front()->get_name());

  std::optional<ProblemConfig> loaded;
  try {
    loaded.emplace(load_config(config_path));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  ProblemConfig& cfg = *loaded;
  if (seed) cfg.seed = *seed;

  PipelineOptions opt;
  opt.quiet = quiet;
  opt.output_dir = resolve_output_dir(
      cfg, config_path, output_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(output_dir));
  try {
    const PipelineResult r = run_pipeline(cfg, stage, opt, std::cout);
    for (const auto& c : r.checks)
      if (c.gating && !c.passed)
        std::cerr << "FAIL [" << c.group << "] " << c.name << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    if (!quiet) std::cout << (r.passed() ? "PASS" : "FAIL") << " (outputs in " << r.output_dir.string() << ")\n";
    return r.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
