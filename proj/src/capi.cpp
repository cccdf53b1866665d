#include "scoremax/scoremax.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <variant>

#include "scoremax/agent.hpp"
#include "scoremax/error.hpp"
#include "scoremax/io.hpp"
#include "scoremax/optimizer.hpp"
#include "scoremax/runner.hpp"

struct scoremax_env {
  scoremax::BeliefSystem beliefs;
};

struct scoremax_contract {
  std::variant<scoremax::MenuContract, scoremax::StaticScoringRule> value;
};

struct scoremax_config {
  scoremax::RunConfig config;
};

namespace {

thread_local std::string last_error;

scoremax_status from_code(scoremax::ErrorCode code) {
  // ErrorCode and scoremax_status share their order, offset by SCOREMAX_OK.
  return static_cast<scoremax_status>(static_cast<int>(code) + 1);
}

template <class F>
scoremax_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return SCOREMAX_OK;
  } catch (const scoremax::Error& e) {
    last_error = e.what();
    return from_code(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SCOREMAX_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SCOREMAX_INTERNAL_ERROR;
  }
}

scoremax_status null_arg(const char* what) {
  last_error = std::string("NullArgument: ") + what;
  return SCOREMAX_NULL_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

static_assert(static_cast<int>(scoremax::ErrorCode::IoError) + 1 == SCOREMAX_IO_ERROR);

extern "C" {

const char* scoremax_version(void) { return "1.0.0"; }

const char* scoremax_status_name(scoremax_status status) {
  if (status == SCOREMAX_OK) return "Ok";
  if (status == SCOREMAX_NULL_ARGUMENT) return "NullArgument";
  if (status == SCOREMAX_INTERNAL_ERROR) return "InternalError";
  if (status > SCOREMAX_OK && status <= SCOREMAX_IO_ERROR)
    return scoremax::to_string(static_cast<scoremax::ErrorCode>(status - 1));
  return "Unknown";
}

const char* scoremax_last_error(void) { return last_error.c_str(); }

void scoremax_string_free(char* s) { std::free(s); }

scoremax_status scoremax_env_create(double delta, int periods, double prior, double cost,
                                    double g1, double g0, double b1, double b0,
                                    scoremax_env** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    scoremax::EnvironmentSpec env{delta, periods, prior, cost, {g1, g0, b1, b0}};
    *out = new scoremax_env{scoremax::BeliefSystem(env)};
  });
}

scoremax_status scoremax_env_from_json(const char* json, scoremax_env** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    scoremax::io::Json j;
    try {
      j = scoremax::io::Json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      scoremax::fail(scoremax::ErrorCode::ParseError, e.what());
    }
    *out = new scoremax_env{scoremax::BeliefSystem(scoremax::io::environment_from_json(j))};
  });
}

void scoremax_env_free(scoremax_env* env) { delete env; }

scoremax_status scoremax_env_periods(const scoremax_env* env, int* out) {
  if (!env) return null_arg("env");
  if (!out) return null_arg("out");
  return guard([&] { *out = env->beliefs.periods(); });
}

scoremax_status scoremax_env_no_info(const scoremax_env* env, int k, double* out) {
  if (!env) return null_arg("env");
  if (!out) return null_arg("out");
  return guard([&] { *out = env->beliefs.no_info(k); });
}

scoremax_status scoremax_env_max_horizon(const scoremax_env* env, int* out) {
  if (!env) return null_arg("env");
  if (!out) return null_arg("out");
  return guard([&] { *out = scoremax::max_horizon(env->beliefs); });
}

scoremax_status scoremax_solve(const scoremax_env* env, scoremax_mode mode, double tol,
                               int* tau_star, scoremax_contract** contract) {
  if (!env) return null_arg("env");
  if (!tau_star) return null_arg("tau_star");
  if (contract) *contract = nullptr;
  return guard([&] {
    if (mode != SCOREMAX_MODE_DYNAMIC && mode != SCOREMAX_MODE_STATIC)
      scoremax::fail(scoremax::ErrorCode::InvalidArgument, "unknown solve mode");
    if (!(tol > 0.0)) scoremax::fail(scoremax::ErrorCode::InvalidArgument, "tol must be positive");
    scoremax::SolveOptions opts;
    opts.tol = tol;
    auto rep = mode == SCOREMAX_MODE_DYNAMIC ? scoremax::solve_dynamic(env->beliefs, opts)
                                             : scoremax::solve_static(env->beliefs, opts);
    *tau_star = rep.tau_star;
    if (contract) {
      if (rep.contract)
        *contract = new scoremax_contract{std::move(*rep.contract)};
      else
        *contract = new scoremax_contract{std::move(*rep.rule)};
    }
  });
}

scoremax_status scoremax_contract_from_csv(const char* csv, scoremax_contract** out) {
  if (!csv) return null_arg("csv");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    std::string text(csv);
    const auto first = text.find_first_not_of(" \r\n");
    if (first != std::string::npos && text.compare(first, 7, "option,") == 0)
      *out = new scoremax_contract{scoremax::io::rule_from_csv(text)};
    else
      *out = new scoremax_contract{scoremax::io::contract_from_csv(text)};
  });
}

scoremax_status scoremax_contract_to_csv(const scoremax_contract* contract, char** out) {
  if (!contract) return null_arg("contract");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    std::string text = std::visit(
        [](const auto& c) {
          if constexpr (std::is_same_v<std::decay_t<decltype(c)>, scoremax::MenuContract>)
            return scoremax::io::contract_to_csv(c);
          else
            return scoremax::io::rule_to_csv(c);
        },
        contract->value);
    *out = dup_string(text);
  });
}

void scoremax_contract_free(scoremax_contract* contract) { delete contract; }

scoremax_status scoremax_best_response(const scoremax_env* env,
                                       const scoremax_contract* contract, int* tau_star,
                                       double* value) {
  if (!env) return null_arg("env");
  if (!contract) return null_arg("contract");
  if (!tau_star) return null_arg("tau_star");
  return guard([&] {
    auto br = std::visit([&](const auto& c) { return scoremax::best_response(env->beliefs, c); },
                         contract->value);
    *tau_star = br.tau_star;
    if (value) *value = br.value.front();
  });
}

scoremax_status scoremax_config_load(const char* path, int partial, scoremax_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    *out = new scoremax_config{scoremax::load_config(path, partial != 0)};
  });
}

scoremax_status scoremax_config_parse(const char* json, const char* base_dir, int partial,
                                      scoremax_config** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    *out = new scoremax_config{
        scoremax::parse_config(json, base_dir ? base_dir : "", partial != 0)};
  });
}

scoremax_status scoremax_config_create(scoremax_config** out) {
  if (!out) return null_arg("out");
  return guard([&] { *out = new scoremax_config{}; });
}

void scoremax_config_free(scoremax_config* config) { delete config; }

scoremax_status scoremax_config_set_mode(scoremax_config* config, const char* mode) {
  if (!config) return null_arg("config");
  if (!mode) return null_arg("mode");
  return guard([&] {
    for (auto m : {scoremax::RunMode::SolveDynamic, scoremax::RunMode::SolveStatic,
                   scoremax::RunMode::BestResponse, scoremax::RunMode::Analytic,
                   scoremax::RunMode::Verify, scoremax::RunMode::Sweep}) {
      if (std::strcmp(mode, scoremax::to_string(m)) == 0) {
        config->config.mode = m;
        return;
      }
    }
    scoremax::fail(scoremax::ErrorCode::ValidationError,
                   std::string("mode: unknown mode '") + mode + "'");
  });
}

scoremax_status scoremax_config_set_out(scoremax_config* config, const char* prefix) {
  if (!config) return null_arg("config");
  if (!prefix) return null_arg("prefix");
  return guard([&] { config->config.out = prefix; });
}

scoremax_status scoremax_config_set_contract(scoremax_config* config, const char* path) {
  if (!config) return null_arg("config");
  if (!path) return null_arg("path");
  return guard([&] { config->config.contract_path = std::filesystem::path(path); });
}

scoremax_status scoremax_config_set_fixtures(scoremax_config* config, const char* dir) {
  if (!config) return null_arg("config");
  if (!dir) return null_arg("dir");
  return guard([&] { config->config.fixtures = std::filesystem::path(dir); });
}

scoremax_status scoremax_config_set_tol(scoremax_config* config, double tol) {
  if (!config) return null_arg("config");
  return guard([&] {
    if (!(tol > 0.0)) scoremax::fail(scoremax::ErrorCode::ValidationError, "tol must be positive");
    config->config.tol = tol;
  });
}

scoremax_status scoremax_run(const scoremax_config* config, int* exit_code) {
  if (!config) return null_arg("config");
  if (!exit_code) return null_arg("exit_code");
  std::string message;
  auto status = guard([&] {
    auto result = scoremax::run(config->config);
    *exit_code = result.exit_code;
    message = result.message;
  });
  // Keep the embedded error visible to callers that print last_error.
  if (status == SCOREMAX_OK && !message.empty()) last_error = message;
  return status;
}

}  // extern "C"
