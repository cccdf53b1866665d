#pragma once

#include <array>
#include <optional>
#include <vector>

namespace scoremax {

// Poisson arrival rates per unit time, indexed by signal and state.
struct Rates {
  double g1 = 0.0;
  double g0 = 0.0;
  double b1 = 0.0;
  double b0 = 0.0;

  double total1() const { return g1 + b1; }
  double total0() const { return g0 + b0; }
};

// Primitives of the learning problem. Rates are per unit time; the per-period
// arrival probability of signal s in state theta is rate * delta, and the
// per-period effort cost is cost * delta.
struct EnvironmentSpec {
  double delta = 0.0;
  int periods = 0;
  double prior = 0.0;
  double cost = 0.0;
  Rates lambda;

  double period_cost() const { return cost * delta; }
  double horizon() const { return delta * periods; }
};

enum class Signal { Good = 0, Bad = 1 };
inline constexpr std::array<Signal, 2> kSignals{Signal::Good, Signal::Bad};

char signal_tag(Signal s);

// Rate of signal s in state 1 / state 0.
double rate(const EnvironmentSpec& env, Signal s, int state);

// Re-checks every invariant of the spec and returns it unchanged; throws
// Error with the matching code otherwise.
EnvironmentSpec validate_environment(const EnvironmentSpec& raw);

bool is_stationary(const EnvironmentSpec& env);
bool is_perfect_learning(const EnvironmentSpec& env);
bool is_single_signal(const EnvironmentSpec& env);

// No-information beliefs mu^N_k for k = 0..K and signal posteriors mu^s_k for
// k = 1..K, produced by the forward Bayes recursion. Immutable.
class BeliefSystem {
 public:
  explicit BeliefSystem(const EnvironmentSpec& env);

  const EnvironmentSpec& environment() const { return env_; }
  int periods() const { return env_.periods; }

  double no_info(int k) const;
  const std::vector<double>& no_info_path() const { return mu_n_; }

  // Posterior after signal s arrives in period k (1-based). Empty when the
  // signal cannot arrive in either state.
  std::optional<double> posterior(Signal s, int k) const;
  bool signal_defined(Signal s) const;

  // Probability that s arrives in period k given no arrival before k.
  double arrival_prob(Signal s, int k) const;
  double null_prob(int k) const;

 private:
  EnvironmentSpec env_;
  std::vector<double> mu_n_;
  std::array<std::vector<double>, 2> mu_s_;
  std::array<bool, 2> defined_{};
};

// Signal timing law conditional on no arrival before period `start`.
class ArrivalLaw {
 public:
  ArrivalLaw(const BeliefSystem& beliefs, int start);

  int start() const { return start_; }
  int last() const { return last_; }

  // f^s_start(j) for start <= j <= K.
  double pmf(Signal s, int j) const;
  // S_start(j) for start - 1 <= j <= K; S_start(start - 1) = 1.
  double survival(int j) const;

 private:
  int start_;
  int last_;
  std::array<std::vector<double>, 2> pmf_;
  std::vector<double> survival_;
};

ArrivalLaw arrival_law(const BeliefSystem& beliefs, int start);

// c * delta times the expected number of worked periods when working from
// law.start() through tau unless a signal arrives first.
double expected_effort_cost(const EnvironmentSpec& env, const ArrivalLaw& law,
                            int tau);

// Largest k <= K with mu^N_{k-1} >= min{1/2, c / (lambda_g1 - lambda_g0)};
// K when good news carries no information.
int max_horizon(const BeliefSystem& beliefs);
double effort_threshold_belief(const EnvironmentSpec& env);

}  // namespace scoremax
