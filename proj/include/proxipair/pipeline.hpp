#pragma once

// Config-driven experiment runner behind the proxipair CLI.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "proxipair/config.hpp"

namespace proxipair {

enum class Stage { Run, Gap, Solve, Stability, Oracle };

std::optional<Stage> parse_stage(std::string_view name);
const char* to_string(Stage s) noexcept;

/// One pass/fail line of the report. Non-gating checks are informational.
struct Check {
  std::string group;  // "gap", "contraction", "nonexpansive", "strict convex", "oracle"
  std::string role;   // "hypothesis" or "conclusion"
  std::string name;
  bool passed = false;
  std::string detail;
  bool gating = true;
};

struct PipelineOptions {
  std::filesystem::path output_dir;
  bool quiet = false;
};

struct PipelineResult {
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // written, relative to output_dir

  bool passed() const;
  int exit_code() const { return passed() ? 0 : 1; }
};

inline constexpr const char* kOutputRootEnv = "PROXIPAIR_OUTPUT_ROOT";

/// --output-dir, else the config's output_dir (relative to $PROXIPAIR_OUTPUT_ROOT when
/// set), else $PROXIPAIR_OUTPUT_ROOT/<config stem>, else ./proxipair-out/<config stem>.
std::filesystem::path resolve_output_dir(const ProblemConfig& cfg,
                                         const std::filesystem::path& config_path,
                                         const std::optional<std::filesystem::path>& override_dir);

/// Runs one stage (Run = all of them) and writes its artifacts into options.output_dir.
/// Progress goes to `out` unless options.quiet.
PipelineResult run_pipeline(const ProblemConfig& cfg, Stage stage, const PipelineOptions& options,
                            std::ostream& out);

/// %.17g, the format used for every number in the CSV files.
std::string csv_number(double v);

}  // namespace proxipair
