#include "scoremax/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

#include "scoremax/agent.hpp"
#include "scoremax/contracts.hpp"
#include "scoremax/error.hpp"
#include "scoremax/io.hpp"
#include "scoremax/optimizer.hpp"

namespace scoremax {

using io::Json;

namespace {

const char* kind_name(FixtureKind k) {
  switch (k) {
    case FixtureKind::Stationary: return "stationary";
    case FixtureKind::PerfectLearning: return "perfect-learning";
    case FixtureKind::SingleSignal: return "single-signal";
    case FixtureKind::DynamicGap: return "dynamic-gap";
  }
  return "unknown";
}

FixtureKind parse_kind(const std::string& s, const std::string& where) {
  for (FixtureKind k : {FixtureKind::Stationary, FixtureKind::PerfectLearning,
                        FixtureKind::SingleSignal, FixtureKind::DynamicGap})
    if (s == kind_name(k)) return k;
  fail(ErrorCode::ValidationError, where + ": kind '" + s + "' is not recognized");
}

VerifyCheck make(std::string name, std::string digest, std::string expected, Json observed,
                 bool passed) {
  return {std::move(name), std::move(digest), std::move(expected), std::move(observed), passed};
}

bool in_box(const StaticScoringRule& rule) {
  return std::all_of(rule.options.begin(), rule.options.end(), [](const RewardPair& r) {
    return r.r0 >= 0.0 && r.r0 <= 1.0 && r.r1 >= 0.0 && r.r1 <= 1.0;
  });
}

double worst_residual(const SolveReport& rep) {
  double w = 0.0;
  for (const auto& e : rep.scan)
    if (e.feasible) w = std::max(w, e.max_residual);
  return w;
}

void fixture_checks(const Fixture& f, std::vector<VerifyCheck>& out) {
  const std::string digest = environment_digest(f.env);
  const std::string tag = ":" + f.name;
  BeliefSystem b(f.env);
  SolveReport dyn, st;
  try {
    dyn = solve_dynamic(b);
    st = solve_static(b);
  } catch (const Error& e) {
    out.push_back(make("solve" + tag, digest, "dynamic and static scans complete",
                       {{"error", e.what()}}, false));
    return;
  }
  const int td = dyn.tau_star;
  const int ts = st.tau_star;
  const int br_dyn = best_response(b, *dyn.contract).tau_star;
  const int br_st = best_response(b, *st.rule).tau_star;
  const std::size_t ic = check_ic(*dyn.contract, b).size();
  const double residual = std::max(worst_residual(dyn), worst_residual(st));

  out.push_back(make("lp-certification" + tag, digest,
                     "residual <= 1e-8, best response >= certified tau, contract IC",
                     {{"max_residual", residual},
                      {"tau_dynamic", td},
                      {"best_response_dynamic", br_dyn},
                      {"tau_static", ts},
                      {"best_response_static", br_st},
                      {"ic_violations", ic}},
                     residual <= 1e-8 && br_dyn >= td && br_st >= ts && ic == 0));
  out.push_back(make("dominance" + tag, digest, "tau_dynamic >= tau_static",
                     {{"tau_dynamic", td}, {"tau_static", ts}}, td >= ts));

  try {
    MenuContract canon = canonicalize(*dyn.contract, b);
    const int tc = best_response(b, canon).tau_star;
    const std::size_t cic = check_ic(canon, b).size();
    out.push_back(make("canonical-structure" + tag, digest,
                       "canonical contract IC and best response >= tau_dynamic",
                       {{"tau_dynamic", td}, {"tau_canonical", tc}, {"ic_violations", cic}},
                       tc >= td && cic == 0));
  } catch (const Error& e) {
    out.push_back(make("canonical-structure" + tag, digest,
                       "canonical contract IC and best response >= tau_dynamic",
                       {{"error", e.what()}}, false));
  }

  switch (f.kind) {
    case FixtureKind::Stationary: {
      const int tk = best_response(b, v_shaped_from_kink(f.env.prior).rule()).tau_star;
      out.push_back(make("stationary-kink" + tag, digest, "tau_dynamic == tau(kink at prior)",
                         {{"tau_dynamic", td}, {"tau_kink", tk}}, td == tk));
      break;
    }
    case FixtureKind::PerfectLearning: {
      const VShapedSearch v = solve_vshaped_grid(b);
      out.push_back(make("perfect-learning-vgrid" + tag, digest, "tau_dynamic == tau_vshaped",
                         {{"tau_dynamic", td}, {"tau_vshaped", v.tau}, {"r1", v.params.r1}},
                         td == v.tau));
      MenuContract norm = perfect_learning_normalize(*dyn.contract, b);
      const int tn = best_response(b, norm).tau_star;
      const std::size_t nic = check_ic(norm, b).size();
      out.push_back(make("perfect-learning-structure" + tag, digest,
                         "r^B = r^N = (1,0) form keeps IC and tau_dynamic",
                         {{"tau_dynamic", td}, {"tau_normalized", tn}, {"ic_violations", nic}},
                         tn >= td && nic == 0));
      break;
    }
    case FixtureKind::SingleSignal: {
      StaticScoringRule rule = staticize_single_signal(b, *dyn.contract);
      const int tr = best_response(b, rule).tau_star;
      out.push_back(make("single-signal-static" + tag, digest,
                         "tau_dynamic == tau_static == tau(staticized), options in [0,1]^2",
                         {{"tau_dynamic", td},
                          {"tau_static", ts},
                          {"tau_staticized", tr},
                          {"options", rule.options.size()}},
                         td == ts && tr == td && in_box(rule)));
      break;
    }
    case FixtureKind::DynamicGap:
      out.push_back(make("dynamic-gap" + tag, digest, "tau_dynamic > tau_static",
                         {{"tau_dynamic", td}, {"tau_static", ts}}, td > ts));
      break;
  }
}

VerifyCheck stopping_belief_check() {
  const EnvironmentSpec env{0.01, 120, 0.35, 0.2, {1.0, 0.0, 0.0, 0.0}};
  BeliefSystem b(env);
  const int tau = best_response(b, VShapedParams{1.0, 1.0}.rule()).tau_star;
  int first = 0;
  while (first <= env.periods && b.no_info(first) >= 0.2) ++first;
  const double mu = b.no_info(tau);
  return make("perfect-learning-stopping-belief", environment_digest(env),
              "tau == first k with mu^N_k < c/lambda and |mu^N_tau - 0.2| <= 0.01",
              {{"tau_star", tau}, {"first_below", first}, {"stopping_belief", mu}},
              tau == first && std::abs(mu - 0.2) <= 0.01);
}

VerifyCheck value_function_check() {
  const double c = 0.2, lambda = 1.0, r1 = 1.0, h = 1e-6;
  auto V = [&](double mu) { return value_function_cont(mu, r1, c, lambda); };
  const double slope = (V(0.2 + h) - V(0.2 - h)) / (2 * h);
  double worst = 0.0;
  Json hjb = Json::object();
  for (double mu : {0.3, 0.5, 0.7}) {
    const double d = (V(mu + h) - V(mu - h)) / (2 * h);
    const double r = std::abs(d * lambda * mu * (1 - mu) + c - lambda * mu * (r1 - V(mu)));
    hjb[io::format_double(mu)] = r;
    worst = std::max(worst, r);
  }
  return make("value-function", "", "|V'(0.2) + 1| <= 1e-4 and HJB residual < 1e-6",
              {{"slope_at_stop", slope}, {"hjb_residual", hjb}},
              std::abs(slope + 1.0) <= 1e-4 && worst < 1e-6);
}

VerifyCheck myopic_check() {
  const EnvironmentSpec env{1.0, 80, 0.3, 0.05, {0.24, 0.04, 0.05, 0.245}};
  BeliefSystem b(env);
  const int mh = max_horizon(b);
  auto run = [&](MyopicOrientation o) {
    return best_response(b, myopic_incentive_contract(b, env.periods, o)).tau_star;
  };
  const int swapped = run(MyopicOrientation::Swapped);
  const int verbatim = run(MyopicOrientation::Verbatim);
  const double gap = b.no_info(swapped) - b.no_info(mh);
  return make("myopic-approximation", environment_digest(env),
              "mu^N(myopic tau) - mu^N(max_horizon) <= 0.05",
              {{"orientation", "swapped"},
               {"tau_myopic", swapped},
               {"max_horizon", mh},
               {"belief_gap", gap},
               {"tau_verbatim", verbatim}},
              gap <= 0.05);
}

// A contract drawn from nested option pools: options offered at period k come
// from pool P_k with P_k shrinking in k, and each is the best in its pool at
// its own belief, so no bearer prefers a later option.
MenuContract nested_pool_contract(const BeliefSystem& b, int tau, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RewardPair> pool(static_cast<std::size_t>(tau) + 3);
  for (auto& r : pool) r = RewardPair{u(rng), u(rng)};
  std::vector<std::size_t> size(static_cast<std::size_t>(tau) + 1);
  std::size_t n = pool.size();
  for (int k = 0; k <= tau; ++k) {
    size[k] = n;
    if (n > 1 && u(rng) < 0.5) --n;
  }
  auto pick = [&](int k, double mu) {
    std::span<const RewardPair> opts(pool.data(), size[k]);
    return indirect_utility(opts, mu).option;
  };
  MenuContract c;
  c.tau = tau;
  for (int k = 1; k <= tau; ++k) {
    for (Signal s : kSignals) {
      if (auto mu = b.posterior(s, k)) {
        (s == Signal::Good ? c.good : c.bad).push_back(pick(k, *mu));
      }
    }
  }
  std::vector<RewardPair> aux;
  for (int k = 0; k < tau; ++k) aux.push_back(pick(k, b.no_info(k)));
  if (tau > 0) c.aux = aux;
  c.terminal = pick(tau, b.no_info(tau));
  return c;
}

EnvironmentSpec random_environment(std::mt19937_64& rng, int periods) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EnvironmentSpec env;
  env.delta = 1.0;
  env.periods = periods;
  env.prior = 0.05 + 0.9 * u(rng);
  env.cost = 0.05 * u(rng);
  double g1 = 0.3 * u(rng), g0 = g1 * u(rng);
  double b0 = 0.3 * u(rng), b1 = b0 * u(rng);
  if (g1 + b1 < g0 + b0) {
    // Restore downward drift by raising the good-news rate in state 1.
    g1 = g0 + b0 - b1 + 0.01 * u(rng);
  }
  env.lambda = {g1, g0, b1, b0};
  return env;
}

VerifyCheck oracle_check(unsigned long long seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  constexpr int kInstances = 12;
  double worst_gap = 0.0, worst_front = -1.0;
  int ic_failures = 0;
  for (int i = 0; i < kInstances; ++i) {
    const int K = 3 + static_cast<int>(rng() % 6);
    BeliefSystem b(random_environment(rng, K));
    MenuContract c = nested_pool_contract(b, K, rng);
    if (!check_ic(c, b).empty()) ++ic_failures;
    OptionSchedule menu(c, K);
    const OracleResult o = brute_force_oracle(b, menu);
    const BestResponse br = best_response(b, menu);
    worst_gap = std::max(worst_gap, std::abs(o.best_value - br.value.front()));
    std::vector<double> prefix(K + 1);
    for (int n = 0; n <= K; ++n) prefix[n] = effort_set_value(b, menu, (1u << n) - 1u);
    for (std::uint32_t mask = 0; mask < (1u << K); ++mask) {
      const int n = std::popcount(mask);
      worst_front = std::max(worst_front, effort_set_value(b, menu, mask) - prefix[n]);
    }
  }
  return make("oracle-equivalence", "",
              "oracle value == DP value within 1e-9; every effort set <= its prefix + 1e-9",
              {{"instances", kInstances},
               {"seed", seed},
               {"max_value_gap", worst_gap},
               {"max_front_loading_excess", worst_front},
               {"ic_failures", ic_failures}},
              worst_gap <= 1e-9 && worst_front <= 1e-9 && ic_failures == 0);
}

VerifyCheck comparative_statics_check() {
  double worst_linear = 0.0;
  int monotone_failures = 0;
  int fixed_point_failures = 0;
  for (int a = 0; a < 10; ++a) {
    const double f0b = 0.05 + 0.09 * a;
    const double f1g = 0.95 - 0.09 * a;
    // Inc(D) / D is the same constant for every D.
    const double slope = static_incentive_increase(0.1, 0.1, f0b, f1g).at_prior / 0.1;
    for (int i = 0; i < 10; ++i) {
      const double D = 0.02 + 0.047 * i;
      const auto inc = static_incentive_increase(D, D, f0b, f1g);
      worst_linear = std::max(worst_linear, std::abs(inc.at_prior - slope * D));
      if (std::abs(inc.fixed_rule - inc.at_prior) > 1e-12) ++fixed_point_failures;
      double prev = 0.0;
      for (int j = 0; j < 10; ++j) {
        const double Dp = 0.05 + 0.1 * j;
        const double v = static_incentive_increase(D, Dp, f0b, f1g).fixed_rule;
        if (j > 0 && !(v < prev)) ++monotone_failures;
        prev = v;
      }
    }
  }
  return make("comparative-statics", "",
              "Inc(D) linear in D; Inc(D';D) strictly decreasing in D'; Inc(D;D) == Inc(D)",
              {{"max_linearity_error", worst_linear},
               {"monotone_failures", monotone_failures},
               {"fixed_point_failures", fixed_point_failures}},
              worst_linear <= 1e-12 && monotone_failures == 0 && fixed_point_failures == 0);
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

std::vector<Fixture> builtin_fixtures() {
  return {
      {"stationary-symmetric", FixtureKind::Stationary, {0.1, 20, 0.5, 0.5, {2, 0, 0, 2}}},
      {"stationary-noisy", FixtureKind::Stationary, {0.1, 30, 0.3, 0.3, {1.5, 0.5, 0.5, 1.5}}},
      {"perfect-good-news", FixtureKind::PerfectLearning, {0.05, 40, 0.35, 0.2, {1, 0, 0, 0}}},
      {"single-noisy-good", FixtureKind::SingleSignal, {0.05, 40, 0.35, 0.2, {1.5, 0.5, 0, 0}}},
      {"slow-drift-0.02", FixtureKind::DynamicGap,
       {1.0, 20, 0.3, 0.05, {0.24, 0.04, 0.065, 0.245}}},
  };
}

std::vector<Fixture> load_fixtures(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    fail(ErrorCode::IoError, "fixtures directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Fixture> out;
  for (const auto& p : files) {
    Json j;
    try {
      j = Json::parse(io::read_file(p));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::ParseError, p.string() + ": " + e.what());
    }
    const std::string where = p.filename().string();
    if (!j.is_object()) fail(ErrorCode::ValidationError, where + ": must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it.key() != "name" && it.key() != "kind" && it.key() != "environment")
        fail(ErrorCode::ParseError, where + ": unknown key " + it.key());
    for (const char* k : {"name", "kind"})
      if (!j.contains(k) || !j[k].is_string())
        fail(ErrorCode::ValidationError, where + ": " + k + " must be a string");
    if (!j.contains("environment"))
      fail(ErrorCode::ValidationError, where + ": environment is missing");
    out.push_back({j["name"].get<std::string>(),
                   parse_kind(j["kind"].get<std::string>(), where),
                   io::environment_from_json(j["environment"], "environment")});
  }
  if (out.empty()) fail(ErrorCode::ValidationError, "no fixtures in " + dir.string());
  return out;
}

std::string environment_digest(const EnvironmentSpec& env) {
  const std::string text = io::environment_to_json(env).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = hex[h & 0xf];
  return out;
}

VerifyReport run_verify(const std::vector<Fixture>& fixtures, unsigned long long seed) {
  VerifyReport rep;
  rep.checks.push_back(stopping_belief_check());
  rep.checks.push_back(value_function_check());
  for (const auto& f : fixtures.empty() ? builtin_fixtures() : fixtures)
    fixture_checks(f, rep.checks);
  rep.checks.push_back(myopic_check());
  rep.checks.push_back(oracle_check(seed));
  rep.checks.push_back(comparative_statics_check());
  return rep;
}

Json verify_to_json(const VerifyReport& report) {
  Json checks = Json::array();
  int failed = 0;
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"environment", c.digest},
                      {"expected", c.expected},
                      {"observed", c.observed},
                      {"passed", c.passed}});
    if (!c.passed) ++failed;
  }
  return {{"passed", failed == 0},
          {"total", report.checks.size()},
          {"failed", failed},
          {"checks", std::move(checks)}};
}

}  // namespace scoremax
