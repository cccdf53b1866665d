#pragma once

#include <cstdint>
#include <vector>

#include "scoremax/contracts.hpp"
#include "scoremax/model.hpp"

namespace scoremax {

// Agent indifference between continuing and stopping is resolved toward
// effort whenever the two values are within this distance.
inline constexpr double kIndifferenceTol = 1e-9;

// Options reachable by a decision taken at each period 0..K.
class OptionSchedule {
 public:
  OptionSchedule(const MenuContract& contract, int periods);
  OptionSchedule(const StaticScoringRule& rule, int periods);

  int periods() const { return static_cast<int>(by_period_.size()) - 1; }
  Choice best(int period, double mu) const;

 private:
  std::vector<std::vector<RewardPair>> by_period_;
};

struct StoppingEvaluation {
  int tau = 0;
  double gross_reward = 0.0;
  double cost = 0.0;
  double net = 0.0;
};

// Payoff of working from `start` through `tau` (inclusive) unless a signal
// arrives first, conditional on no arrival before `start`.
StoppingEvaluation evaluate_stopping(const BeliefSystem& beliefs, const OptionSchedule& menu,
                                     int start, int tau);
StoppingEvaluation evaluate_stopping(const BeliefSystem& beliefs, const MenuContract& contract,
                                     int start, int tau);
StoppingEvaluation evaluate_stopping(const BeliefSystem& beliefs, const StaticScoringRule& rule,
                                     int start, int tau);

struct BestResponse {
  int tau_star = 0;
  std::vector<double> value;       // k = 0..K
  std::vector<double> stop_value;  // k = 0..K
  std::vector<bool> work;          // k = 0..K; work[K] is always false
};

BestResponse best_response(const BeliefSystem& beliefs, const OptionSchedule& menu);
BestResponse best_response(const BeliefSystem& beliefs, const MenuContract& contract);
BestResponse best_response(const BeliefSystem& beliefs, const StaticScoringRule& rule);

inline constexpr int kOracleMaxPeriods = 14;

// Net value of exerting effort exactly in the periods flagged in `effort_mask`
// (bit j-1 set = work in period j), stopping at the first signal.
double effort_set_value(const BeliefSystem& beliefs, const OptionSchedule& menu,
                        std::uint32_t effort_mask);

struct OracleResult {
  double best_value = 0.0;
  std::uint32_t best_mask = 0;
  std::vector<int> best_periods;
};

// Exhaustive search over all 2^K effort sets. The witness is the set with the
// most worked periods among those within kIndifferenceTol of the best value.
OracleResult brute_force_oracle(const BeliefSystem& beliefs, const OptionSchedule& menu);
OracleResult brute_force_oracle(const BeliefSystem& beliefs, const MenuContract& contract);
OracleResult brute_force_oracle(const BeliefSystem& beliefs, const StaticScoringRule& rule);

}  // namespace scoremax
