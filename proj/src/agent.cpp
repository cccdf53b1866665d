#include "scoremax/agent.hpp"

#include <algorithm>
#include <bit>

#include "scoremax/error.hpp"

namespace scoremax {

OptionSchedule::OptionSchedule(const MenuContract& contract, int periods) {
  contract.validate();
  if (contract.tau > periods) {
    fail(ErrorCode::DimensionMismatch, "contract horizon exceeds environment periods");
  }
  by_period_.resize(static_cast<std::size_t>(periods) + 1);
  for (int q = 0; q <= periods; ++q) {
    for (const auto& o : contract.available_at(q)) by_period_[q].push_back(o.reward);
  }
}

OptionSchedule::OptionSchedule(const StaticScoringRule& rule, int periods)
    : by_period_(static_cast<std::size_t>(periods) + 1, rule.options) {
  if (rule.options.empty()) fail(ErrorCode::EmptyMenu, "static scoring rule without options");
}

Choice OptionSchedule::best(int period, double mu) const {
  if (period < 0 || period > periods()) {
    fail(ErrorCode::IndexOutOfRange, "menu period " + std::to_string(period));
  }
  return indirect_utility(by_period_[static_cast<std::size_t>(period)], mu);
}

StoppingEvaluation evaluate_stopping(const BeliefSystem& beliefs, const OptionSchedule& menu,
                                     int start, int tau) {
  const int K = beliefs.periods();
  if (start < 1 || start > K || tau < start || tau > K) {
    fail(ErrorCode::IndexOutOfRange, "stopping evaluation window [" + std::to_string(start) +
                                         ", " + std::to_string(tau) + "]");
  }
  const ArrivalLaw law(beliefs, start);
  StoppingEvaluation ev;
  ev.tau = tau;
  for (int j = start; j <= tau; ++j) {
    for (Signal s : kSignals) {
      if (!beliefs.signal_defined(s)) continue;
      ev.gross_reward += law.pmf(s, j) * menu.best(j, *beliefs.posterior(s, j)).value;
    }
  }
  ev.gross_reward += law.survival(tau) * menu.best(tau, beliefs.no_info(tau)).value;
  ev.cost = expected_effort_cost(beliefs.environment(), law, tau);
  ev.net = ev.gross_reward - ev.cost;
  return ev;
}

StoppingEvaluation evaluate_stopping(const BeliefSystem& beliefs, const MenuContract& contract,
                                     int start, int tau) {
  return evaluate_stopping(beliefs, OptionSchedule(contract, beliefs.periods()), start, tau);
}

StoppingEvaluation evaluate_stopping(const BeliefSystem& beliefs, const StaticScoringRule& rule,
                                     int start, int tau) {
  return evaluate_stopping(beliefs, OptionSchedule(rule, beliefs.periods()), start, tau);
}

BestResponse best_response(const BeliefSystem& beliefs, const OptionSchedule& menu) {
  const int K = beliefs.periods();
  if (menu.periods() != K) fail(ErrorCode::DimensionMismatch, "menu horizon mismatch");
  const double step_cost = beliefs.environment().period_cost();

  BestResponse br;
  br.value.assign(static_cast<std::size_t>(K) + 1, 0.0);
  br.stop_value.assign(static_cast<std::size_t>(K) + 1, 0.0);
  br.work.assign(static_cast<std::size_t>(K) + 1, false);
  for (int k = 0; k <= K; ++k) br.stop_value[k] = menu.best(k, beliefs.no_info(k)).value;

  br.value[K] = br.stop_value[K];
  for (int k = K - 1; k >= 0; --k) {
    double cont = -step_cost + beliefs.null_prob(k + 1) * br.value[k + 1];
    for (Signal s : kSignals) {
      if (!beliefs.signal_defined(s)) continue;
      cont += beliefs.arrival_prob(s, k + 1) *
              menu.best(k + 1, *beliefs.posterior(s, k + 1)).value;
    }
    br.work[k] = cont >= br.stop_value[k] - kIndifferenceTol;
    br.value[k] = br.work[k] ? std::max(cont, br.stop_value[k]) : br.stop_value[k];
  }
  br.tau_star = 0;
  while (br.tau_star < K && br.work[br.tau_star]) ++br.tau_star;
  return br;
}

BestResponse best_response(const BeliefSystem& beliefs, const MenuContract& contract) {
  return best_response(beliefs, OptionSchedule(contract, beliefs.periods()));
}

BestResponse best_response(const BeliefSystem& beliefs, const StaticScoringRule& rule) {
  return best_response(beliefs, OptionSchedule(rule, beliefs.periods()));
}

double effort_set_value(const BeliefSystem& beliefs, const OptionSchedule& menu,
                        std::uint32_t effort_mask) {
  const EnvironmentSpec& env = beliefs.environment();
  const int K = beliefs.periods();
  const double d = env.delta;
  const double stay1 = 1.0 - env.lambda.total1() * d;
  const double stay0 = 1.0 - env.lambda.total0() * d;

  // p1, p0: probability of no arrival so far conditional on the state.
  double p1 = 1.0;
  double p0 = 1.0;
  double value = 0.0;
  int worked = 0;
  int last = 0;
  for (int j = 1; j <= K; ++j) {
    if (!(effort_mask & (1u << (j - 1)))) continue;
    ++worked;
    last = j;
    const double searching = env.prior * p1 + (1.0 - env.prior) * p0;
    value -= env.period_cost() * searching;
    for (Signal s : kSignals) {
      if (!beliefs.signal_defined(s)) continue;
      const double prob = (env.prior * p1 * rate(env, s, 1) +
                           (1.0 - env.prior) * p0 * rate(env, s, 0)) * d;
      value += prob * menu.best(j, *beliefs.posterior(s, worked)).value;
    }
    p1 *= stay1;
    p0 *= stay0;
  }
  const double none = env.prior * p1 + (1.0 - env.prior) * p0;
  value += none * menu.best(last, beliefs.no_info(worked)).value;
  return value;
}

OracleResult brute_force_oracle(const BeliefSystem& beliefs, const OptionSchedule& menu) {
  const int K = beliefs.periods();
  if (K > kOracleMaxPeriods) {
    fail(ErrorCode::HorizonTooLarge, "brute-force oracle supports at most " +
                                         std::to_string(kOracleMaxPeriods) + " periods");
  }
  const std::uint32_t count = 1u << K;
  std::vector<double> values(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    values[mask] = effort_set_value(beliefs, menu, mask);
  }
  OracleResult best;
  best.best_value = *std::max_element(values.begin(), values.end());
  int most = -1;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    if (values[mask] < best.best_value - kIndifferenceTol) continue;
    if (std::popcount(mask) > most) {
      most = std::popcount(mask);
      best.best_mask = mask;
    }
  }
  for (int j = 1; j <= K; ++j) {
    if (best.best_mask & (1u << (j - 1))) best.best_periods.push_back(j);
  }
  return best;
}

OracleResult brute_force_oracle(const BeliefSystem& beliefs, const MenuContract& contract) {
  return brute_force_oracle(beliefs, OptionSchedule(contract, beliefs.periods()));
}

OracleResult brute_force_oracle(const BeliefSystem& beliefs, const StaticScoringRule& rule) {
  return brute_force_oracle(beliefs, OptionSchedule(rule, beliefs.periods()));
}

}  // namespace scoremax
