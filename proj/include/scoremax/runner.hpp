#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scoremax/model.hpp"

namespace scoremax {

enum class RunMode { SolveDynamic, SolveStatic, BestResponse, Analytic, Verify, Sweep };

const char* to_string(RunMode mode);

struct SweepAxis {
  std::string name;  // environment field (lambda.g1 etc.) or r1
  std::vector<double> values;
};

struct RunConfig {
  std::optional<EnvironmentSpec> environment;
  RunMode mode = RunMode::SolveDynamic;
  std::optional<std::filesystem::path> contract_path;
  std::optional<std::filesystem::path> fixtures;
  std::vector<SweepAxis> sweep;
  std::filesystem::path out;
  unsigned long long seed = 0;
  double tol = 1e-9;
};

inline constexpr std::size_t kMaxSweepAxes = 3;
inline constexpr std::size_t kMaxSweepCells = 10000;

// Accepts the environment either inline at top level, as an "environment"
// object, or as an "environment" path relative to `base`. Malformed JSON
// raises ParseError with line and column; unknown keys raise ParseError
// naming the key; missing or mistyped fields raise ValidationError naming the
// field. With `partial`, mode and out may be omitted so a caller can supply
// them afterwards; check_config then enforces them.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base = {},
                       bool partial = false);
RunConfig load_config(const std::filesystem::path& path, bool partial = false);

// Mode-required fields present; throws ValidationError naming the field.
void check_config(const RunConfig& config);

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 solver or input error, 2 verify failure
  std::vector<std::filesystem::path> written;
  std::string message;
};

// Writes <out>.report.json plus the mode's CSV artifacts. Library errors are
// embedded in the report and mapped to exit code 1; an unwritable output
// prefix propagates as IoError.
RunResult run(const RunConfig& config);

// One CSV row per cell, sorted by cell index. `threads` = 0 means one per
// hardware thread.
std::string sweep_csv(const EnvironmentSpec& base, const std::vector<SweepAxis>& axes,
                      unsigned threads = 0);

// SCOREMAX_THREADS when set to a positive integer, else 0.
unsigned threads_from_environment();

}  // namespace scoremax
