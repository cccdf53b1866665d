#include "scoremax/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "scoremax/agent.hpp"
#include "scoremax/error.hpp"
#include "scoremax/io.hpp"
#include "scoremax/optimizer.hpp"
#include "scoremax/verify.hpp"

namespace scoremax {

using io::Json;

namespace {

constexpr const char* kEnvKeys[] = {"delta", "periods", "prior", "cost", "lambda"};
constexpr const char* kSweepNames[] = {"delta",     "periods",   "prior",     "cost",
                                       "lambda.g1", "lambda.g0", "lambda.b1", "lambda.b0",
                                       "r1"};

bool is_env_key(const std::string& k) {
  for (const char* e : kEnvKeys)
    if (k == e) return true;
  return false;
}

RunMode parse_mode(const std::string& s) {
  for (RunMode m : {RunMode::SolveDynamic, RunMode::SolveStatic, RunMode::BestResponse,
                    RunMode::Analytic, RunMode::Verify, RunMode::Sweep})
    if (s == to_string(m)) return m;
  fail(ErrorCode::ValidationError, "mode: unknown mode '" + s + "'");
}

const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::ValidationError, std::string(key) + " is missing");
  return *it;
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) fail(ErrorCode::ValidationError, std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

std::vector<SweepAxis> parse_sweep(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::ValidationError, "sweep must be an object");
  std::vector<SweepAxis> axes;
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* n : kSweepNames) known = known || it.key() == n;
    if (!known) fail(ErrorCode::ParseError, "unknown key sweep." + it.key());
    const std::string field = "sweep." + it.key();
    if (!it->is_array()) fail(ErrorCode::ValidationError, field + " must be a list");
    if (it->empty()) fail(ErrorCode::ValidationError, field + " must be nonempty");
    SweepAxis axis{it.key(), {}};
    for (const auto& v : *it) {
      if (!v.is_number()) fail(ErrorCode::ValidationError, field + " must hold numbers");
      axis.values.push_back(v.get<double>());
    }
    axes.push_back(std::move(axis));
  }
  return axes;
}

void apply_axis(EnvironmentSpec& env, const std::string& name, double v) {
  if (name == "delta") env.delta = v;
  else if (name == "periods") {
    if (v != std::floor(v) || v < 1 || v > 1e6)
      fail(ErrorCode::ValidationError, "sweep.periods values must be positive integers");
    env.periods = static_cast<int>(v);
  } else if (name == "prior") env.prior = v;
  else if (name == "cost") env.cost = v;
  else if (name == "lambda.g1") env.lambda.g1 = v;
  else if (name == "lambda.g0") env.lambda.g0 = v;
  else if (name == "lambda.b1") env.lambda.b1 = v;
  else if (name == "lambda.b0") env.lambda.b0 = v;
}

Json error_json(const Error& e) {
  return {{"code", to_string(e.code())}, {"message", e.detail()}};
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
  return std::filesystem::path(prefix.string() + suffix);
}

bool is_rule_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) return line.rfind("option,", 0) == 0;
  }
  return false;
}

struct Artifacts {
  Json body = Json::object();
  std::vector<std::pair<const char*, std::string>> files;
  int exit_code = 0;
};

Json certification(const BeliefSystem& b, const SolveReport& rep, const BestResponse& br) {
  const std::size_t violations = rep.contract ? check_ic(*rep.contract, b).size() : 0;
  double worst = 0.0;
  for (const auto& e : rep.scan)
    if (e.feasible) worst = std::max(worst, e.max_residual);
  return {{"best_response_tau", br.tau_star},
          {"ic_violations", violations},
          {"max_residual", worst},
          {"passed", br.tau_star >= rep.tau_star && violations == 0 && worst <= 1e-8}};
}

Artifacts run_solve(const RunConfig& cfg, bool dynamic) {
  BeliefSystem b(*cfg.environment);
  SolveOptions opts;
  opts.tol = cfg.tol;
  SolveReport rep = dynamic ? solve_dynamic(b, opts) : solve_static(b, opts);
  BestResponse br = rep.contract ? best_response(b, *rep.contract) : best_response(b, *rep.rule);
  Artifacts a;
  a.body = io::report_to_json(rep);
  a.body["certification"] = certification(b, rep, br);
  a.files.emplace_back(".contract.csv", rep.contract ? io::contract_to_csv(*rep.contract)
                                                     : io::rule_to_csv(*rep.rule));
  a.files.emplace_back(".beliefs.csv", io::beliefs_to_csv(b));
  a.files.emplace_back(".value.csv", io::best_response_to_csv(br));
  return a;
}

Artifacts run_best_response(const RunConfig& cfg) {
  BeliefSystem b(*cfg.environment);
  const std::string text = io::read_file(*cfg.contract_path);
  Artifacts a;
  BestResponse br;
  if (is_rule_csv(text)) {
    br = best_response(b, io::rule_from_csv(text));
    a.body["contract_kind"] = "static";
  } else {
    MenuContract c = io::contract_from_csv(text);
    br = best_response(b, c);
    a.body["contract_kind"] = "menu";
    a.body["ic_violations"] = check_ic(c, b).size();
  }
  a.body["tau_star"] = br.tau_star;
  a.body["value"] = br.value.front();
  a.body["stopping_belief"] = b.no_info(br.tau_star);
  a.files.emplace_back(".beliefs.csv", io::beliefs_to_csv(b));
  a.files.emplace_back(".value.csv", io::best_response_to_csv(br));
  return a;
}

Artifacts run_analytic(const RunConfig& cfg) {
  const EnvironmentSpec& env = *cfg.environment;
  if (!(env.lambda.g1 > 0.0 && env.lambda.g0 == 0.0 && env.lambda.b1 == 0.0 &&
        env.lambda.b0 == 0.0))
    fail(ErrorCode::InvalidArgument, "analytic mode needs perfect good-news learning "
                                     "(only lambda.g1 positive)");
  PerfectLearningSolution sol =
      optimal_r1_analytic(env.cost, env.lambda.g1, env.prior, env.horizon());
  Artifacts a;
  a.body["effort"] = sol.effort;
  a.body["mu_star"] = sol.mu_star;
  a.body["mu_star_star"] = sol.mu_star_star;
  a.body["r_min"] = sol.r_min;
  a.body["r_T"] = sol.r_T;
  a.body["r1_opt"] = sol.r1_opt;
  std::ostringstream csv;
  csv << "mu,value\n";
  if (sol.effort) {
    a.body["stopping_belief"] = sol.stopping_belief(sol.r1_opt);
    auto upper = sol.mu_upper(sol.r1_opt);
    a.body["mu_upper"] = upper ? Json(*upper) : Json(nullptr);
    // Discrete cross-check: best response to the V-shaped rule with r0 = 1.
    BeliefSystem b(env);
    const int tau = best_response(b, VShapedParams{1.0, sol.r1_opt}.rule()).tau_star;
    a.body["discrete"] = {{"tau_star", tau}, {"stopping_belief", b.no_info(tau)}};
    for (int i = 1; i < 100; ++i) {
      const double mu = i / 100.0;
      if (mu < sol.stopping_belief(sol.r1_opt)) continue;
      csv << io::format_double(mu) << ',' << io::format_double(sol.value(mu, sol.r1_opt))
          << '\n';
    }
  }
  a.files.emplace_back(".value.csv", csv.str());
  return a;
}

Artifacts run_verify_mode(const RunConfig& cfg) {
  std::vector<Fixture> fixtures =
      cfg.fixtures ? load_fixtures(*cfg.fixtures) : builtin_fixtures();
  VerifyReport rep = run_verify(fixtures, cfg.seed);
  Artifacts a;
  a.body = verify_to_json(rep);
  a.exit_code = rep.passed() ? 0 : 2;
  return a;
}

Artifacts run_sweep_mode(const RunConfig& cfg) {
  Artifacts a;
  std::size_t cells = 1;
  Json axes = Json::object();
  for (const auto& ax : cfg.sweep) {
    cells *= ax.values.size();
    axes[ax.name] = ax.values;
  }
  std::string csv = sweep_csv(*cfg.environment, cfg.sweep, threads_from_environment());
  a.body["axes"] = std::move(axes);
  a.body["cells"] = cells;
  a.files.emplace_back(".sweep.csv", std::move(csv));
  return a;
}

}  // namespace

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::SolveDynamic: return "solve-dynamic";
    case RunMode::SolveStatic: return "solve-static";
    case RunMode::BestResponse: return "best-response";
    case RunMode::Analytic: return "analytic";
    case RunMode::Verify: return "verify";
    case RunMode::Sweep: return "sweep";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base,
                       bool partial) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::string msg = e.what();
    const auto pos = msg.find("] ");
    fail(ErrorCode::ParseError, pos == std::string::npos ? msg : msg.substr(pos + 2));
  }
  if (!j.is_object()) fail(ErrorCode::ValidationError, "config must be a JSON object");

  static const char* kKeys[] = {"environment", "mode", "contract", "fixtures",
                                "sweep",       "out",  "seed",     "tol"};
  Json inline_env = Json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (is_env_key(it.key())) {
      inline_env[it.key()] = *it;
      continue;
    }
    bool known = false;
    for (const char* k : kKeys) known = known || it.key() == k;
    if (!known) fail(ErrorCode::ParseError, "unknown key " + it.key());
  }

  RunConfig cfg;
  if (!partial || j.contains("mode")) cfg.mode = parse_mode(string_field(j, "mode"));
  if (!partial || j.contains("out")) cfg.out = string_field(j, "out");

  auto env = j.find("environment");
  if (env != j.end() && !inline_env.empty())
    fail(ErrorCode::ValidationError,
         "environment given both inline and under 'environment'");
  if (env != j.end()) {
    if (env->is_string()) {
      const auto path = resolve(base, env->get<std::string>());
      Json file;
      try {
        file = Json::parse(io::read_file(path));
      } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::ParseError, path.string() + ": " + e.what());
      }
      cfg.environment = io::environment_from_json(file, "environment");
    } else {
      cfg.environment = io::environment_from_json(*env, "environment");
    }
  } else if (!inline_env.empty() || (cfg.mode != RunMode::Verify && !partial)) {
    cfg.environment = io::environment_from_json(inline_env);
  }

  if (auto it = j.find("contract"); it != j.end()) {
    if (!it->is_string()) fail(ErrorCode::ValidationError, "contract must be a path string");
    cfg.contract_path = resolve(base, it->get<std::string>());
  }
  if (auto it = j.find("fixtures"); it != j.end()) {
    if (!it->is_string()) fail(ErrorCode::ValidationError, "fixtures must be a path string");
    cfg.fixtures = resolve(base, it->get<std::string>());
  }
  if (auto it = j.find("sweep"); it != j.end()) cfg.sweep = parse_sweep(*it);
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) fail(ErrorCode::ValidationError, "seed must be a nonnegative integer");
    cfg.seed = it->get<unsigned long long>();
  }
  if (auto it = j.find("tol"); it != j.end()) {
    if (!it->is_number() || !(it->get<double>() > 0.0))
      fail(ErrorCode::ValidationError, "tol must be a positive number");
    cfg.tol = it->get<double>();
  }

  if (!partial) check_config(cfg);
  return cfg;
}

void check_config(const RunConfig& cfg) {
  if (cfg.out.empty()) fail(ErrorCode::ValidationError, "out must be nonempty");
  if (cfg.mode != RunMode::Verify && !cfg.environment)
    fail(ErrorCode::ValidationError, "environment is required for mode " +
                                         std::string(to_string(cfg.mode)));
  if (cfg.mode == RunMode::BestResponse && !cfg.contract_path)
    fail(ErrorCode::ValidationError, "contract is required for mode best-response");
  if (cfg.mode == RunMode::Sweep && cfg.sweep.empty())
    fail(ErrorCode::ValidationError, "sweep is required for mode sweep");
}

RunConfig load_config(const std::filesystem::path& path, bool partial) {
  return parse_config(io::read_file(path), path.parent_path(), partial);
}

unsigned threads_from_environment() {
  const char* v = std::getenv("SCOREMAX_THREADS");
  if (!v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n <= 0) return 0;
  return static_cast<unsigned>(n);
}

std::string sweep_csv(const EnvironmentSpec& base, const std::vector<SweepAxis>& axes,
                      unsigned threads) {
  if (axes.empty()) fail(ErrorCode::ValidationError, "sweep needs at least one axis");
  if (axes.size() > kMaxSweepAxes)
    fail(ErrorCode::GridTooLarge, "sweep over " + std::to_string(axes.size()) +
                                      " parameters (limit 3)");
  std::size_t cells = 1;
  for (const auto& ax : axes) {
    if (ax.values.empty())
      fail(ErrorCode::ValidationError, "sweep." + ax.name + " must be nonempty");
    cells *= ax.values.size();
    if (cells > kMaxSweepCells)
      fail(ErrorCode::GridTooLarge, "sweep exceeds 10000 cells");
  }

  std::vector<std::string> rows(cells);
  auto compute = [&](std::size_t cell) {
    std::ostringstream row;
    row << cell;
    EnvironmentSpec env = base;
    std::optional<double> r1;
    std::size_t rest = cell;
    std::vector<double> values(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      values[a] = axes[a].values[rest % axes[a].values.size()];
      rest /= axes[a].values.size();
    }
    for (double v : values) row << ',' << io::format_double(v);
    try {
      for (std::size_t a = 0; a < axes.size(); ++a) {
        if (axes[a].name == "r1")
          r1 = values[a];
        else
          apply_axis(env, axes[a].name, values[a]);
      }
      BeliefSystem b(env);
      const int td = solve_dynamic(b).tau_star;
      const int ts = solve_static(b).tau_star;
      VShapedSearch v;
      if (r1) {
        v.params = VShapedParams{1.0, *r1};
        v.tau = best_response(b, v.params.rule()).tau_star;
      } else {
        v = solve_vshaped_grid(b);
      }
      row << ",ok," << td << ',' << ts << ',' << v.tau << ',' << io::format_double(v.params.r1)
          << ',' << io::format_double(b.no_info(td)) << ','
          << io::format_double(b.no_info(ts)) << ',' << io::format_double(b.no_info(v.tau));
    } catch (const Error& e) {
      row << ',' << to_string(e.code()) << ",,,,,,,";
    }
    rows[cell] = row.str();
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cells));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < cells;) compute(c);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();

  std::ostringstream out;
  out << "cell";
  for (const auto& ax : axes) out << ',' << ax.name;
  out << ",status,tau_dynamic,tau_static,tau_vshaped,vshaped_r1,mu_dynamic,mu_static,"
         "mu_vshaped\n";
  for (const auto& r : rows) out << r << '\n';
  return out.str();
}

RunResult run(const RunConfig& cfg) {
  check_config(cfg);
  Json report;
  report["mode"] = to_string(cfg.mode);
  if (cfg.environment) report["environment"] = io::environment_to_json(*cfg.environment);

  Artifacts a;
  RunResult result;
  try {
    switch (cfg.mode) {
      case RunMode::SolveDynamic: a = run_solve(cfg, true); break;
      case RunMode::SolveStatic: a = run_solve(cfg, false); break;
      case RunMode::BestResponse: a = run_best_response(cfg); break;
      case RunMode::Analytic: a = run_analytic(cfg); break;
      case RunMode::Verify: a = run_verify_mode(cfg); break;
      case RunMode::Sweep: a = run_sweep_mode(cfg); break;
    }
    report["status"] = a.exit_code == 0 ? "ok" : "verify-failed";
    for (auto it = a.body.begin(); it != a.body.end(); ++it) report[it.key()] = it.value();
    result.exit_code = a.exit_code;
  } catch (const Error& e) {
    report["status"] = "error";
    report["error"] = error_json(e);
    a.files.clear();
    result.exit_code = 1;
    result.message = e.what();
  }

  const auto report_path = with_suffix(cfg.out, ".report.json");
  io::write_file(report_path, report.dump(2) + "\n");
  result.written.push_back(report_path);
  for (const auto& [suffix, content] : a.files) {
    const auto p = with_suffix(cfg.out, suffix);
    io::write_file(p, content);
    result.written.push_back(p);
  }
  return result;
}

}  // namespace scoremax
