#include <cmath>
#include <limits>

#include "scoremax/error.hpp"
#include "scoremax/optimizer.hpp"

namespace scoremax {

namespace {

constexpr double kBisectionTol = 1e-8;
constexpr int kBisectionIterations = 200;

void check_regime(double r1, double c, double lambda) {
  if (!(lambda > 0.0) || !(c > 0.0) || !std::isfinite(r1) || !(r1 * lambda > c)) {
    fail(ErrorCode::DomainViolation, "value function needs lambda > 0, c > 0 and r1 * lambda > c");
  }
}

// V on [mu_stop, 1], with the continuous extension at mu = 1.
double value_closed(double mu, double r1, double c, double lambda, double k) {
  const double tail = mu >= 1.0 ? 0.0 : c * (1.0 - mu) * std::log((1.0 - mu) / mu);
  return k * (1.0 - mu) + (r1 * lambda - c + tail) / lambda;
}

// Largest x in [lo, hi] with pred(x) true, given pred(lo) and !pred(hi).
template <class Pred>
double bisect_last_true(double lo, double hi, Pred pred) {
  for (int i = 0; i < kBisectionIterations; ++i) {
    if (hi - lo <= kBisectionTol) return lo;
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  fail(ErrorCode::ConvergenceFailure, "bisection did not reach tolerance");
}

}  // namespace

double value_function_constant(double r1, double c, double lambda) {
  check_regime(r1, c, lambda);
  const double stop = c / (lambda * r1);
  const double rest = (r1 * lambda - c + c * (1.0 - stop) * std::log((1.0 - stop) / stop)) / lambda;
  return ((1.0 - stop) - rest) / (1.0 - stop);
}

double value_function_cont(double mu, double r1, double c, double lambda) {
  if (!(mu > 0.0 && mu < 1.0)) fail(ErrorCode::DomainViolation, "belief must lie in (0,1)");
  return value_closed(mu, r1, c, lambda, value_function_constant(r1, c, lambda));
}

double PerfectLearningSolution::stopping_belief(double r1) const {
  if (c <= 0.0) return 0.0;
  if (r1 <= 0.0) return 1.0;
  return std::min(1.0, c / (lambda * r1));
}

std::optional<double> PerfectLearningSolution::mu_upper(double r1) const {
  if (c <= 0.0) return 1.0;
  if (!(r1 * lambda > c)) return std::nullopt;
  const double lo = stopping_belief(r1);
  const double k = value_function_constant(r1, c, lambda);
  auto gap = [&](double mu) { return value_closed(mu, r1, c, lambda, k) - r1 * mu; };
  const double g_lo = 1.0 - lo * (1.0 + r1);
  if (g_lo < 0.0) return std::nullopt;
  if (g_lo == 0.0) return lo;
  return bisect_last_true(lo, 1.0, [&](double mu) { return gap(mu) >= 0.0; });
}

PerfectLearningSolution optimal_r1_analytic(double c, double lambda, double prior,
                                            double horizon) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::InvalidRate, "lambda must be positive");
  if (!(c >= 0.0) || !std::isfinite(c)) fail(ErrorCode::InvalidCost, "cost must be nonnegative");
  if (!(prior > 0.0 && prior < 1.0)) fail(ErrorCode::InvalidPrior, "prior must lie in (0,1)");
  if (!(horizon > 0.0)) fail(ErrorCode::InvalidArgument, "horizon must be positive");

  PerfectLearningSolution sol;
  sol.c = c;
  sol.lambda = lambda;
  sol.prior = prior;
  sol.horizon = horizon;
  if (c == 0.0) {
    sol.effort = true;
    sol.mu_star = sol.mu_star_star = 1.0;
    sol.r_min = 0.0;
    sol.r_T = sol.r1_opt = 1.0;
    return sol;
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto has_region = [&](double r1) { return sol.mu_upper(r1).has_value(); };
  if (!has_region(1.0)) {
    sol.mu_star = sol.mu_star_star = sol.r_min = nan;
    sol.r1_opt = 0.0;
    return sol;
  }
  sol.mu_star = *sol.mu_upper(1.0);
  // mu_upper falls in r1, so its supremum sits at the smallest r1 that
  // still has a work region.
  sol.r_min = 1.0 - bisect_last_true(0.0, 1.0 - c / lambda,
                                     [&](double gap) { return has_region(1.0 - gap); });
  sol.mu_star_star = *sol.mu_upper(sol.r_min);

  const double decay = std::isfinite(horizon) ? std::exp(-lambda * horizon) : 0.0;
  const double mu_end = prior * decay / (prior * decay + 1.0 - prior);
  sol.r_T = sol.stopping_belief(1.0) > mu_end ? 1.0 : c / (lambda * mu_end);

  sol.effort = prior >= c / lambda && prior <= sol.mu_star_star;
  if (!sol.effort) {
    sol.r1_opt = 0.0;
    return sol;
  }
  // The horizon cap can sit below every r1 with a work region; the search
  // then starts from r_min.
  const double cap = std::max(sol.r_T, sol.r_min);
  auto starts = [&](double r1) {
    const auto up = sol.mu_upper(r1);
    return up && *up >= prior;
  };
  sol.r1_opt = starts(cap) ? cap : bisect_last_true(sol.r_min, cap, starts);
  return sol;
}

}  // namespace scoremax
