#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "scoremax/contracts.hpp"
#include "scoremax/model.hpp"

namespace testsupport {

using scoremax::EnvironmentSpec;

// Bad news alone cannot satisfy the drift convention unless uninformative, so
// single-signal families are good-news only.
enum class Family { General, Stationary, PerfectGood, SingleGood };

// Valid environments drawn per family. Rates are per-period probabilities
// divided by delta so every family respects the probability bound.
inline EnvironmentSpec random_env(std::mt19937_64& rng, Family fam, int periods,
                                  double max_cost = 0.1) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EnvironmentSpec env;
  env.delta = std::vector<double>{0.05, 0.1, 0.5, 1.0}[rng() % 4];
  env.periods = periods;
  env.prior = 0.05 + 0.9 * u(rng);
  env.cost = max_cost * u(rng);
  const double cap = 0.45 / env.delta;  // keeps each state's total below 0.9 per period
  switch (fam) {
    case Family::General: {
      double g1 = cap * u(rng), g0 = g1 * u(rng);
      double b0 = cap * u(rng), b1 = b0 * u(rng);
      if (g1 + b1 < g0 + b0) g1 = g0 + b0 - b1 + 0.02 * u(rng) / env.delta;
      env.lambda = {g1, g0, b1, b0};
      break;
    }
    case Family::Stationary: {
      const double g1 = cap * u(rng), b0 = cap * u(rng);
      const double g0 = g1 * u(rng);
      const double b1 = g0 + b0 - g1;
      if (b1 < 0.0 || b1 > b0) return random_env(rng, fam, periods, max_cost);
      env.lambda = {g1, g0, b1, b0};
      break;
    }
    case Family::PerfectGood:
      env.lambda = {0.1 + cap * u(rng), 0.0, 0.0, 0.0};
      break;
    case Family::SingleGood: {
      const double g1 = 0.1 + cap * u(rng);
      env.lambda = {g1, g1 * 0.9 * u(rng), 0.0, 0.0};
      break;
    }
  }
  return scoremax::validate_environment(env);
}

// IC-valid menu contract: period-k options come from a pool that shrinks
// with k, each chosen as the pool's best at its bearer's belief.
inline scoremax::MenuContract nested_pool_contract(const scoremax::BeliefSystem& b, int tau,
                                                   std::mt19937_64& rng, bool with_aux = true) {
  using scoremax::RewardPair;
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
    const RewardPair* best = &pool[0];
    for (std::size_t i = 1; i < size[k]; ++i)
      if (scoremax::utility(mu, pool[i]) > scoremax::utility(mu, *best)) best = &pool[i];
    return *best;
  };
  scoremax::MenuContract c;
  c.tau = tau;
  for (int k = 1; k <= tau; ++k) {
    if (auto mu = b.posterior(scoremax::Signal::Good, k)) c.good.push_back(pick(k, *mu));
    if (auto mu = b.posterior(scoremax::Signal::Bad, k)) c.bad.push_back(pick(k, *mu));
  }
  if (with_aux && tau > 0) {
    std::vector<RewardPair> aux;
    for (int k = 0; k < tau; ++k) aux.push_back(pick(k, b.no_info(k)));
    c.aux = aux;
  }
  c.terminal = pick(tau, b.no_info(tau));
  return c;
}

// mu^N_k straight from the joint survival probabilities of k null periods.
inline double closed_form_no_info(const EnvironmentSpec& env, int k) {
  const double s1 = std::pow(1.0 - env.lambda.total1() * env.delta, k);
  const double s0 = std::pow(1.0 - env.lambda.total0() * env.delta, k);
  return env.prior * s1 / (env.prior * s1 + (1.0 - env.prior) * s0);
}

}  // namespace testsupport
