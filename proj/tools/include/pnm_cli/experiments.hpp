#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pnm_cli/config.hpp"

namespace pnm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
  std::string config_path;
  std::string subcommand;  // experiment name or "run"
  std::vector<std::string> overrides;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string out_dir;  // overrides output.path
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string csv_path;
  std::string json_path;
};

const std::vector<std::string>& experiment_names();

// Loads, resolves and runs one experiment. Throws pnm::Error on failure.
RunOutcome run(const RunOptions& opt);
// Same, on an already loaded configuration.
RunOutcome run(Config cfg, const RunOptions& opt);

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Fast invariant suite behind the validate experiment.
std::vector<CheckResult> validation_suite(Config& cfg);

int exit_code_for_kind(const std::string& kind);
// {"error": {"kind": ..., "message": ..., "exit_code": ...}}
std::string error_json(const std::string& kind, const std::string& message, int exit_code);

}  // namespace pnm::cli
