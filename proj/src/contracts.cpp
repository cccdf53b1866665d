#include "scoremax/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scoremax/error.hpp"

namespace scoremax {
namespace {

constexpr double kClampTol = 1e-9;
constexpr double kDedupTol = 1e-12;
constexpr double kTieTol = 1e-12;

double clamp_component(double v, const char* name) {
  if (!std::isfinite(v) || v < -kClampTol || v > 1.0 + kClampTol) {
    std::ostringstream os;
    os << "reward component " << name << " = " << v << " outside [0,1]";
    fail(ErrorCode::DomainViolation, os.str());
  }
  return std::clamp(v, 0.0, 1.0);
}

void check_pair(const RewardPair& r) {
  clamp_component(r.r0, "r0");
  clamp_component(r.r1, "r1");
}

// Point on the path (1,1) -> (1,0) -> (0,0) whose utility at mu equals value.
RewardPair path_point(double mu, double value) {
  if (value >= 1.0 - mu) {
    const double r1 = mu > 0.0 ? (value - (1.0 - mu)) / mu : 0.0;
    return {1.0, std::clamp(r1, 0.0, 1.0)};
  }
  const double r0 = mu < 1.0 ? value / (1.0 - mu) : 0.0;
  return {std::clamp(r0, 0.0, 1.0), 0.0};
}

bool better(const RewardPair& candidate, double cv, const RewardPair& best, double bv) {
  if (cv > bv + kTieTol) return true;
  if (cv < bv - kTieTol) return false;
  return candidate.r1 < best.r1;
}

}  // namespace

RewardPair make_reward(double r0, double r1) {
  return {clamp_component(r0, "r0"), clamp_component(r1, "r1")};
}

bool dominated_by(const RewardPair& lower, const RewardPair& upper, double tol) {
  return lower.r0 <= upper.r0 + tol && lower.r1 <= upper.r1 + tol;
}

const char* option_tag(OptionKind kind) {
  switch (kind) {
    case OptionKind::Good: return "G";
    case OptionKind::Bad: return "B";
    case OptionKind::Aux: return "AUX";
    case OptionKind::Terminal: return "N";
  }
  return "?";
}

void MenuContract::validate() const {
  if (tau < 0) fail(ErrorCode::DimensionMismatch, "negative contract horizon");
  const auto n = static_cast<std::size_t>(tau);
  if (!good.empty() && good.size() != n) {
    fail(ErrorCode::DimensionMismatch, "good-news options must number tau");
  }
  if (!bad.empty() && bad.size() != n) {
    fail(ErrorCode::DimensionMismatch, "bad-news options must number tau");
  }
  if (aux && aux->size() != n) {
    fail(ErrorCode::DimensionMismatch, "auxiliary no-signal options must number tau");
  }
  for (const auto& r : good) check_pair(r);
  for (const auto& r : bad) check_pair(r);
  if (aux) {
    for (const auto& r : *aux) check_pair(r);
  }
  check_pair(terminal);
}

std::vector<MenuOption> MenuContract::options() const { return available_at(0); }

std::vector<MenuOption> MenuContract::available_at(int period) const {
  std::vector<MenuOption> out;
  const int first = std::max(period, 1);
  for (int k = first; k <= tau; ++k) {
    if (!good.empty()) out.push_back({OptionKind::Good, k, good[k - 1]});
    if (!bad.empty()) out.push_back({OptionKind::Bad, k, bad[k - 1]});
  }
  if (aux) {
    for (int k = std::max(period, 0); k < tau; ++k) {
      out.push_back({OptionKind::Aux, k, (*aux)[k]});
    }
  }
  out.push_back({OptionKind::Terminal, tau, terminal});
  return out;
}

StaticScoringRule StaticScoringRule::from_options(std::span<const RewardPair> options,
                                                  std::string provenance) {
  StaticScoringRule rule;
  rule.provenance = std::move(provenance);
  for (const auto& r : options) {
    check_pair(r);
    const bool seen = std::any_of(rule.options.begin(), rule.options.end(), [&](const RewardPair& q) {
      return std::abs(q.r0 - r.r0) <= kDedupTol && std::abs(q.r1 - r.r1) <= kDedupTol;
    });
    if (!seen) rule.options.push_back(make_reward(r.r0, r.r1));
  }
  return rule;
}

StaticScoringRule VShapedParams::rule() const {
  const RewardPair opts[] = {{r0, 0.0}, {0.0, r1}};
  std::ostringstream os;
  os.precision(17);
  os << "v-shaped kink=" << kink();
  return StaticScoringRule::from_options(opts, os.str());
}

VShapedParams v_shaped_from_kink(double kink) {
  if (!std::isfinite(kink) || kink <= 0.0 || kink >= 1.0) {
    fail(ErrorCode::InvalidKink, "kink must lie strictly inside (0,1)");
  }
  if (kink >= 0.5) return {1.0, (1.0 - kink) / kink};
  return {kink / (1.0 - kink), 1.0};
}

Choice indirect_utility(std::span<const RewardPair> options, double mu) {
  if (options.empty()) fail(ErrorCode::EmptyMenu, "indirect utility of an empty menu");
  Choice best{utility(mu, options[0]), options[0]};
  for (std::size_t i = 1; i < options.size(); ++i) {
    const double v = utility(mu, options[i]);
    if (better(options[i], v, best.option, best.value)) best = {v, options[i]};
  }
  return best;
}

Choice indirect_utility(const StaticScoringRule& rule, double mu) {
  return indirect_utility(rule.options, mu);
}

Choice indirect_utility(const MenuContract& contract, int period, double mu) {
  std::vector<RewardPair> pairs;
  for (const auto& o : contract.available_at(period)) pairs.push_back(o.reward);
  return indirect_utility(pairs, mu);
}

MenuContract myopic_incentive_contract(const BeliefSystem& beliefs, int tau,
                                       MyopicOrientation orientation) {
  const EnvironmentSpec& env = beliefs.environment();
  if (env.prior >= 0.5) {
    fail(ErrorCode::DomainViolation, "myopic-incentive contract needs prior < 1/2");
  }
  if (tau < 0 || tau > env.periods) {
    fail(ErrorCode::IndexOutOfRange, "myopic contract horizon " + std::to_string(tau));
  }
  const RewardPair flat = orientation == MyopicOrientation::Verbatim ? RewardPair{1.0, 0.0}
                                                                    : RewardPair{0.0, 1.0};
  MenuContract c;
  c.tau = tau;
  c.terminal = flat;
  for (int k = 1; k <= tau; ++k) {
    if (beliefs.signal_defined(Signal::Good)) c.good.push_back(flat);
    if (beliefs.signal_defined(Signal::Bad)) {
      const double mu = beliefs.no_info(k);
      c.bad.push_back(make_reward(mu / (1.0 - mu), 0.0));
    }
  }
  return c;
}

std::vector<IcViolation> check_ic(const MenuContract& contract, const BeliefSystem& beliefs) {
  contract.validate();
  if (contract.tau > beliefs.periods()) {
    fail(ErrorCode::DimensionMismatch, "contract horizon exceeds environment periods");
  }
  std::vector<IcViolation> out;
  auto check_bearer = [&](OptionKind kind, int period, double mu, const RewardPair& own) {
    const double base = utility(mu, own);
    for (const auto& o : contract.available_at(period)) {
      if (o.kind == kind && o.period == period) continue;
      const double slack = base - utility(mu, o.reward);
      if (slack < -kIcTolerance) out.push_back({kind, period, o, slack});
    }
  };
  for (Signal s : kSignals) {
    const auto& opts = contract.signal_options(s);
    if (opts.empty() || !beliefs.signal_defined(s)) continue;
    const OptionKind kind = s == Signal::Good ? OptionKind::Good : OptionKind::Bad;
    for (int k = 1; k <= contract.tau; ++k) {
      check_bearer(kind, k, *beliefs.posterior(s, k), opts[k - 1]);
    }
  }
  if (contract.aux) {
    for (int k = 0; k < contract.tau; ++k) {
      check_bearer(OptionKind::Aux, k, beliefs.no_info(k), (*contract.aux)[k]);
    }
  }
  check_bearer(OptionKind::Terminal, contract.tau, beliefs.no_info(contract.tau),
               contract.terminal);
  return out;
}

RewardPair maximize_under_caps(double mu, std::span<const std::pair<double, double>> caps) {
  // Lines a*r0 + b*r1 = v: the caps plus the four box edges.
  struct Line {
    double a, b, v;
  };
  std::vector<Line> lines;
  for (const auto& [m, v] : caps) lines.push_back({1.0 - m, m, v});
  lines.push_back({1.0, 0.0, 0.0});
  lines.push_back({1.0, 0.0, 1.0});
  lines.push_back({0.0, 1.0, 0.0});
  lines.push_back({0.0, 1.0, 1.0});

  auto feasible = [&](const RewardPair& r) {
    if (r.r0 < -1e-12 || r.r0 > 1.0 + 1e-12 || r.r1 < -1e-12 || r.r1 > 1.0 + 1e-12) return false;
    for (const auto& [m, v] : caps) {
      if (utility(m, r) > v + 1e-12) return false;
    }
    return true;
  };

  bool found = false;
  RewardPair best{};
  double best_value = 0.0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double det = lines[i].a * lines[j].b - lines[j].a * lines[i].b;
      if (std::abs(det) < 1e-14) continue;
      RewardPair r{(lines[i].v * lines[j].b - lines[j].v * lines[i].b) / det,
                   (lines[i].a * lines[j].v - lines[j].a * lines[i].v) / det};
      if (!feasible(r)) continue;
      r = {std::clamp(r.r0, 0.0, 1.0), std::clamp(r.r1, 0.0, 1.0)};
      const double value = utility(mu, r);
      const bool take = !found || value > best_value + kTieTol ||
                        (value >= best_value - kTieTol &&
                         (r.r1 > best.r1 + kTieTol ||
                          (std::abs(r.r1 - best.r1) <= kTieTol && r.r0 > best.r0)));
      if (take) {
        found = true;
        best = r;
        best_value = value;
      }
    }
  }
  if (!found) {
    fail(ErrorCode::InfeasibleCanonicalization, "good-news reward constraints admit no point");
  }
  return best;
}

MenuContract canonicalize(const MenuContract& contract, const BeliefSystem& beliefs) {
  contract.validate();
  const int tau = contract.tau;
  if (tau > beliefs.periods()) {
    fail(ErrorCode::DimensionMismatch, "contract horizon exceeds environment periods");
  }

  // No-signal stopping utility at every node; the rewrite preserves it.
  std::vector<double> stop(static_cast<std::size_t>(tau) + 1);
  for (int k = 0; k <= tau; ++k) {
    stop[k] = indirect_utility(contract, k, beliefs.no_info(k)).value;
  }
  std::vector<RewardPair> floor_option(static_cast<std::size_t>(tau) + 1);
  for (int k = 0; k <= tau; ++k) floor_option[k] = path_point(beliefs.no_info(k), stop[k]);

  MenuContract out;
  out.tau = tau;
  out.terminal = floor_option[tau];
  out.aux = std::vector<RewardPair>(floor_option.begin(), floor_option.begin() + tau);
  if (beliefs.signal_defined(Signal::Bad)) {
    out.bad.assign(floor_option.begin() + 1, floor_option.end());
  }
  if (beliefs.signal_defined(Signal::Good)) {
    std::vector<std::pair<double, double>> caps;
    caps.emplace_back(beliefs.no_info(0), stop[0]);
    for (int k = 1; k <= tau; ++k) {
      caps.emplace_back(beliefs.no_info(k), stop[k]);
      out.good.push_back(maximize_under_caps(*beliefs.posterior(Signal::Good, k), caps));
    }
  }

  const auto violations = check_ic(out, beliefs);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "canonical form breaks incentive compatibility for " << option_tag(violations[0].bearer)
       << " at period " << violations[0].period << " (slack " << violations[0].slack << ")";
    fail(ErrorCode::InfeasibleCanonicalization, os.str());
  }
  return out;
}

MenuContract perfect_learning_normalize(const MenuContract& contract,
                                        const BeliefSystem& beliefs) {
  contract.validate();
  if (!is_perfect_learning(beliefs.environment())) {
    fail(ErrorCode::DomainViolation, "perfect-learning normal form needs fully revealing signals");
  }
  MenuContract out;
  out.tau = contract.tau;
  out.good = contract.good;
  if (beliefs.signal_defined(Signal::Bad)) {
    out.bad.assign(static_cast<std::size_t>(contract.tau), RewardPair{1.0, 0.0});
  }
  out.terminal = {1.0, 0.0};
  return out;
}

}  // namespace scoremax
