#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scoremax/model.hpp"

namespace scoremax {

// Environment families the theorem checks know how to judge.
enum class FixtureKind { Stationary, PerfectLearning, SingleSignal, DynamicGap };

struct Fixture {
  std::string name;
  FixtureKind kind;
  EnvironmentSpec env;
};

struct VerifyCheck {
  std::string name;
  std::string digest;    // environment digest, empty for environment-free checks
  std::string expected;  // relation being asserted
  nlohmann::ordered_json observed;
  bool passed = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

std::vector<Fixture> builtin_fixtures();
// Reads every *.json file in `dir` (sorted by name); each holds
// {"name", "kind", "environment"}.
std::vector<Fixture> load_fixtures(const std::filesystem::path& dir);

// 16 hex digits of FNV-1a over the canonical environment JSON.
std::string environment_digest(const EnvironmentSpec& env);

// Theorem suite. Environment checks run on `fixtures` (built-ins when empty);
// analytic, oracle and comparative-statics checks always run. `seed` drives
// the randomized oracle instances.
VerifyReport run_verify(const std::vector<Fixture>& fixtures, unsigned long long seed = 0);

nlohmann::ordered_json verify_to_json(const VerifyReport& report);

}  // namespace scoremax
