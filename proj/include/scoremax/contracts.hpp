#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scoremax/model.hpp"

namespace scoremax {

// Reward paid in state 0 and in state 1, in that order.
struct RewardPair {
  double r0 = 0.0;
  double r1 = 0.0;

  friend bool operator==(const RewardPair&, const RewardPair&) = default;
};

// Rejects components outside [0,1]; components within 1e-9 of the box are
// clamped onto it (solver output carries residuals of that order).
RewardPair make_reward(double r0, double r1);

inline double utility(double mu, const RewardPair& r) {
  return (1.0 - mu) * r.r0 + mu * r.r1;
}

bool dominated_by(const RewardPair& lower, const RewardPair& upper, double tol = 0.0);

enum class OptionKind { Good, Bad, Aux, Terminal };

// CSV tag: G, B, AUX, N.
const char* option_tag(OptionKind kind);

struct MenuOption {
  OptionKind kind;
  int period;
  RewardPair reward;
};

// Menu form of a dynamic contract. An option offered at period p can be picked
// by a decision made at any period q <= p; the terminal option is available
// at every period. good/bad are either empty (signal not rewarded) or hold
// tau entries with r^s_k at index k-1. aux, when present, holds r^N_k for
// k = 0..tau-1.
struct MenuContract {
  int tau = 0;
  std::vector<RewardPair> good;
  std::vector<RewardPair> bad;
  RewardPair terminal;
  std::optional<std::vector<RewardPair>> aux;

  void validate() const;
  std::vector<MenuOption> options() const;
  std::vector<MenuOption> available_at(int period) const;
  const std::vector<RewardPair>& signal_options(Signal s) const {
    return s == Signal::Good ? good : bad;
  }
};

// A single menu offered at all times.
struct StaticScoringRule {
  std::vector<RewardPair> options;
  std::string provenance;

  // Deduplicates at 1e-12 componentwise and keeps first-seen order.
  static StaticScoringRule from_options(std::span<const RewardPair> options,
                                        std::string provenance = {});
};

struct VShapedParams {
  double r0 = 1.0;
  double r1 = 1.0;

  double kink() const { return r0 / (r0 + r1); }
  StaticScoringRule rule() const;
};

VShapedParams v_shaped_from_kink(double kink);

struct Choice {
  double value = 0.0;
  RewardPair option;
};

// Max over options of u(mu, r); ties go to the option with the smaller r1.
Choice indirect_utility(std::span<const RewardPair> options, double mu);
Choice indirect_utility(const StaticScoringRule& rule, double mu);
Choice indirect_utility(const MenuContract& contract, int period, double mu);

enum class MyopicOrientation {
  // r^N = r^G = (1,0) exactly as the defining tuple is written.
  Verbatim,
  // r^N = r^G = (0,1): the good-news option pays in state 1.
  Swapped,
};

MenuContract myopic_incentive_contract(const BeliefSystem& beliefs, int tau,
                                       MyopicOrientation orientation =
                                           MyopicOrientation::Verbatim);

inline constexpr double kIcTolerance = 1e-9;

struct IcViolation {
  OptionKind bearer;
  int period;
  MenuOption offending;
  double slack;  // negative: u(bearer option) - u(offending option)
};

std::vector<IcViolation> check_ic(const MenuContract& contract, const BeliefSystem& beliefs);

// Rewrites an IC contract into the decreasing-bad-news / maximal-good-news
// form: r^B_k is the cheapest-in-state-1 option that keeps the no-signal
// utility at period k, r^G_k maximizes u(mu^G_k, .) subject to not tempting
// any earlier no-signal belief, and the terminal option equals r^B_tau.
MenuContract canonicalize(const MenuContract& contract, const BeliefSystem& beliefs);

// Perfect-learning normal form: every bad-news option and the terminal
// option become (1,0); good-news options are kept.
MenuContract perfect_learning_normalize(const MenuContract& contract,
                                        const BeliefSystem& beliefs);

// Maximizes u(mu, r) over r in [0,1]^2 subject to u(caps[i].first, r) <=
// caps[i].second. Exposed for tests.
RewardPair maximize_under_caps(double mu, std::span<const std::pair<double, double>> caps);

}  // namespace scoremax
