#include "scoremax/model.hpp"

#include <cmath>
#include <sstream>

#include "scoremax/error.hpp"

namespace scoremax {
namespace {

constexpr double kProbabilityTol = 1e-12;
constexpr double kMartingaleTol = 1e-10;
// Rate sums written as decimals rarely cancel exactly.
constexpr double kRateTol = 1e-12;

std::size_t idx(Signal s) { return static_cast<std::size_t>(s); }

double bayes(double mu, double like1, double like0) {
  const double num = mu * like1;
  const double den = num + (1.0 - mu) * like0;
  if (den <= 0.0) return mu;  // zero-probability event; belief unchanged
  return num / den;
}

void check_rate(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream os;
    os << "lambda." << name << " = " << value << " must be finite and nonnegative";
    fail(ErrorCode::InvalidRate, os.str());
  }
}

}  // namespace

char signal_tag(Signal s) { return s == Signal::Good ? 'G' : 'B'; }

double rate(const EnvironmentSpec& env, Signal s, int state) {
  if (s == Signal::Good) return state == 1 ? env.lambda.g1 : env.lambda.g0;
  return state == 1 ? env.lambda.b1 : env.lambda.b0;
}

EnvironmentSpec validate_environment(const EnvironmentSpec& raw) {
  if (!std::isfinite(raw.delta) || raw.delta <= 0.0) {
    fail(ErrorCode::InvalidArgument, "delta must be positive and finite");
  }
  if (raw.periods < 1) {
    fail(ErrorCode::InvalidArgument, "periods must be a positive integer");
  }
  if (!std::isfinite(raw.prior) || raw.prior <= 0.0 || raw.prior >= 1.0) {
    fail(ErrorCode::InvalidPrior, "prior must lie strictly inside (0,1)");
  }
  if (!std::isfinite(raw.cost) || raw.cost < 0.0) {
    fail(ErrorCode::InvalidCost, "cost must be finite and nonnegative");
  }
  const Rates& l = raw.lambda;
  check_rate(l.g1, "g1");
  check_rate(l.g0, "g0");
  check_rate(l.b1, "b1");
  check_rate(l.b0, "b0");
  if (l.total1() * raw.delta > 1.0 + kProbabilityTol ||
      l.total0() * raw.delta > 1.0 + kProbabilityTol) {
    std::ostringstream os;
    os << "per-period arrival probabilities (" << l.total1() * raw.delta << ", "
       << l.total0() * raw.delta << ") exceed 1";
    fail(ErrorCode::InvalidRate, os.str());
  }
  if (l.g1 < l.g0) fail(ErrorCode::LabelViolation, "lambda.g1 < lambda.g0");
  if (l.b1 > l.b0) fail(ErrorCode::LabelViolation, "lambda.b1 > lambda.b0");
  if (l.total1() < l.total0() - kRateTol) {
    fail(ErrorCode::DriftViolation,
         "lambda.g1 + lambda.b1 < lambda.g0 + lambda.b0 (belief must drift toward state 0)");
  }
  return raw;
}

bool is_stationary(const EnvironmentSpec& env) {
  return std::abs(env.lambda.total1() - env.lambda.total0()) <= kRateTol;
}

bool is_perfect_learning(const EnvironmentSpec& env) {
  const Rates& l = env.lambda;
  const bool g_ok = (l.g1 == 0.0 && l.g0 == 0.0) || l.g0 == 0.0;
  const bool b_ok = (l.b1 == 0.0 && l.b0 == 0.0) || l.b1 == 0.0;
  const bool any = l.g1 + l.g0 + l.b1 + l.b0 > 0.0;
  return g_ok && b_ok && any;
}

bool is_single_signal(const EnvironmentSpec& env) {
  const bool g = env.lambda.g1 + env.lambda.g0 > 0.0;
  const bool b = env.lambda.b1 + env.lambda.b0 > 0.0;
  return g != b;
}

BeliefSystem::BeliefSystem(const EnvironmentSpec& env)
    : env_(validate_environment(env)) {
  const int K = env_.periods;
  const double d = env_.delta;
  const double stay1 = 1.0 - env_.lambda.total1() * d;
  const double stay0 = 1.0 - env_.lambda.total0() * d;

  for (Signal s : kSignals) {
    defined_[idx(s)] = rate(env_, s, 1) + rate(env_, s, 0) > 0.0;
    mu_s_[idx(s)].assign(static_cast<std::size_t>(K), 0.0);
  }
  mu_n_.assign(static_cast<std::size_t>(K) + 1, 0.0);
  mu_n_[0] = env_.prior;
  for (int k = 1; k <= K; ++k) {
    const double prev = mu_n_[k - 1];
    for (Signal s : kSignals) {
      if (!defined_[idx(s)]) continue;
      mu_s_[idx(s)][k - 1] = bayes(prev, rate(env_, s, 1), rate(env_, s, 0));
    }
    mu_n_[k] = bayes(prev, stay1, stay0);
  }

  for (int k = 1; k <= K; ++k) {
    double mean = null_prob(k) * mu_n_[k];
    for (Signal s : kSignals) {
      if (defined_[idx(s)]) mean += arrival_prob(s, k) * mu_s_[idx(s)][k - 1];
    }
    if (std::abs(mean - mu_n_[k - 1]) > kMartingaleTol) {
      std::ostringstream os;
      os << "martingale identity fails at period " << k << " (" << mean << " vs "
         << mu_n_[k - 1] << ")";
      fail(ErrorCode::NumericalBreakdown, os.str());
    }
  }
}

double BeliefSystem::no_info(int k) const {
  if (k < 0 || k > env_.periods) {
    fail(ErrorCode::IndexOutOfRange, "no-information belief index " + std::to_string(k));
  }
  return mu_n_[static_cast<std::size_t>(k)];
}

std::optional<double> BeliefSystem::posterior(Signal s, int k) const {
  if (k < 1 || k > env_.periods) {
    fail(ErrorCode::IndexOutOfRange, "posterior period " + std::to_string(k));
  }
  if (!defined_[idx(s)]) return std::nullopt;
  return mu_s_[idx(s)][static_cast<std::size_t>(k - 1)];
}

bool BeliefSystem::signal_defined(Signal s) const { return defined_[idx(s)]; }

double BeliefSystem::arrival_prob(Signal s, int k) const {
  const double mu = no_info(k - 1);
  return (mu * rate(env_, s, 1) + (1.0 - mu) * rate(env_, s, 0)) * env_.delta;
}

double BeliefSystem::null_prob(int k) const {
  const double mu = no_info(k - 1);
  return mu * (1.0 - env_.lambda.total1() * env_.delta) +
         (1.0 - mu) * (1.0 - env_.lambda.total0() * env_.delta);
}

ArrivalLaw::ArrivalLaw(const BeliefSystem& beliefs, int start)
    : start_(start), last_(beliefs.periods()) {
  if (start < 1 || start > last_) {
    fail(ErrorCode::IndexOutOfRange, "arrival law start " + std::to_string(start));
  }
  const EnvironmentSpec& env = beliefs.environment();
  const double mu = beliefs.no_info(start - 1);
  const double d = env.delta;
  const double stay1 = 1.0 - env.lambda.total1() * d;
  const double stay0 = 1.0 - env.lambda.total0() * d;
  const std::size_t n = static_cast<std::size_t>(last_ - start + 1);

  for (Signal s : kSignals) pmf_[idx(s)].assign(n, 0.0);
  survival_.assign(n + 1, 0.0);
  survival_[0] = 1.0;

  // p1, p0: probability of no arrival in periods start..j-1, per state.
  double p1 = 1.0;
  double p0 = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (Signal s : kSignals) {
      pmf_[idx(s)][i] = mu * p1 * rate(env, s, 1) * d + (1.0 - mu) * p0 * rate(env, s, 0) * d;
    }
    p1 *= stay1;
    p0 *= stay0;
    survival_[i + 1] = mu * p1 + (1.0 - mu) * p0;
  }

  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mass += pmf_[0][i] + pmf_[1][i];
    if (std::abs(mass + survival_[i + 1] - 1.0) > kProbabilityTol) {
      fail(ErrorCode::NumericalBreakdown, "arrival law mass identity violated");
    }
  }
}

double ArrivalLaw::pmf(Signal s, int j) const {
  if (j < start_ || j > last_) {
    fail(ErrorCode::IndexOutOfRange, "arrival pmf period " + std::to_string(j));
  }
  return pmf_[idx(s)][static_cast<std::size_t>(j - start_)];
}

double ArrivalLaw::survival(int j) const {
  if (j < start_ - 1 || j > last_) {
    fail(ErrorCode::IndexOutOfRange, "survival period " + std::to_string(j));
  }
  return survival_[static_cast<std::size_t>(j - start_ + 1)];
}

ArrivalLaw arrival_law(const BeliefSystem& beliefs, int start) {
  return ArrivalLaw(beliefs, start);
}

double expected_effort_cost(const EnvironmentSpec& env, const ArrivalLaw& law, int tau) {
  if (tau < law.start() || tau > law.last()) {
    fail(ErrorCode::IndexOutOfRange, "effort cost horizon " + std::to_string(tau));
  }
  double periods = 0.0;
  for (int j = law.start(); j <= tau; ++j) periods += law.survival(j - 1);
  return env.period_cost() * periods;
}

double effort_threshold_belief(const EnvironmentSpec& env) {
  const double gap = env.lambda.g1 - env.lambda.g0;
  if (gap <= 0.0) return 0.0;
  return std::min(0.5, env.cost / gap);
}

int max_horizon(const BeliefSystem& beliefs) {
  const EnvironmentSpec& env = beliefs.environment();
  if (env.lambda.g1 <= env.lambda.g0) return env.periods;
  const double threshold = effort_threshold_belief(env);
  int k = 0;
  while (k < env.periods && beliefs.no_info(k) >= threshold) ++k;
  return k;
}

}  // namespace scoremax
