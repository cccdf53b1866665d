#include "scoremax/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "scoremax/agent.hpp"
#include "scoremax/error.hpp"

namespace scoremax {

namespace {

// u(mu, r) * weight for the option stored at (var, var + 1).
void add_utility(std::vector<lp::Term>& terms, int var, double mu, double weight) {
  terms.push_back({var, weight * (1.0 - mu)});
  terms.push_back({var + 1, weight * mu});
}

int add_option(lp::LinearProgram& program, const std::string& name) {
  const int v = program.add_variable(0.0, 1.0, name + ".r0");
  program.add_variable(0.0, 1.0, name + ".r1");
  return v;
}

RewardPair read_option(std::span<const double> point, int var) {
  return make_reward(point[var], point[var + 1]);
}

lp::Constraint ic_row(int own, int other, double mu) {
  lp::Constraint c;
  add_utility(c.terms, own, mu, 1.0);
  add_utility(c.terms, other, mu, -1.0);
  return c;
}

void check_tau(const BeliefSystem& beliefs, int tau) {
  if (tau < 1 || tau > beliefs.periods()) {
    fail(ErrorCode::IndexOutOfRange, "LP horizon " + std::to_string(tau));
  }
}

}  // namespace

DynamicLp build_dynamic_lp(const BeliefSystem& beliefs, int tau, const LpBuildOptions& opts) {
  check_tau(beliefs, tau);
  DynamicLp out;
  auto& program = out.program;
  auto& layout = out.layout;
  layout.tau = tau;
  const bool has_good = beliefs.signal_defined(Signal::Good);
  const bool has_bad = beliefs.signal_defined(Signal::Bad);
  for (int k = 1; k <= tau; ++k) {
    layout.good.push_back(has_good ? add_option(program, "G" + std::to_string(k)) : -1);
    layout.bad.push_back(has_bad ? add_option(program, "B" + std::to_string(k)) : -1);
  }
  for (int k = 0; k <= tau; ++k) layout.no_info.push_back(add_option(program, "N" + std::to_string(k)));

  auto signal_var = [&](Signal s, int k) {
    return s == Signal::Good ? layout.good[k - 1] : layout.bad[k - 1];
  };

  // Effort: working k..tau beats stopping after k-1 periods.
  const EnvironmentSpec& env = beliefs.environment();
  for (int k = 1; k <= tau; ++k) {
    const ArrivalLaw law(beliefs, k);
    lp::Constraint row;
    for (int j = k; j <= tau; ++j) {
      for (Signal s : kSignals) {
        if (!beliefs.signal_defined(s)) continue;
        add_utility(row.terms, signal_var(s, j), *beliefs.posterior(s, j), law.pmf(s, j));
      }
    }
    add_utility(row.terms, layout.no_info[tau], beliefs.no_info(tau), law.survival(tau));
    add_utility(row.terms, layout.no_info[k - 1], beliefs.no_info(k - 1), -1.0);
    row.rhs = opts.include_cost ? expected_effort_cost(env, law, tau) : 0.0;
    program.add_constraint(std::move(row));
    out.seed.push_back(1);
    out.groups.push_back(-1);
    ++out.effort_rows;
  }

  // IC: every belief bearer against every option still available to it.
  struct Slot {
    int var;
    int period;
    double mu;
  };
  std::vector<Slot> slots;
  for (int k = 1; k <= tau; ++k) {
    for (Signal s : kSignals) {
      if (beliefs.signal_defined(s)) slots.push_back({signal_var(s, k), k, *beliefs.posterior(s, k)});
    }
  }
  for (int k = 0; k <= tau; ++k) slots.push_back({layout.no_info[k], k, beliefs.no_info(k)});
  const int terminal = layout.no_info[tau];
  for (const auto& own : slots) {
    for (const auto& other : slots) {
      if (other.var == own.var || other.period < own.period) continue;
      program.add_constraint(ic_row(own.var, other.var, own.mu));
      out.seed.push_back(other.period <= own.period + 1 || other.var == terminal);
      out.groups.push_back(own.var);
      ++out.ic_rows;
    }
  }
  return out;
}

MenuContract extract_contract(const DynamicLp& lp, std::span<const double> point) {
  const auto& layout = lp.layout;
  MenuContract c;
  c.tau = layout.tau;
  for (int k = 0; k < layout.tau; ++k) {
    if (layout.good[k] >= 0) c.good.push_back(read_option(point, layout.good[k]));
    if (layout.bad[k] >= 0) c.bad.push_back(read_option(point, layout.bad[k]));
  }
  std::vector<RewardPair> aux;
  for (int k = 0; k < layout.tau; ++k) aux.push_back(read_option(point, layout.no_info[k]));
  c.aux = std::move(aux);
  c.terminal = read_option(point, layout.no_info[layout.tau]);
  return c;
}

StaticLp build_static_lp(const BeliefSystem& beliefs, int tau, const LpBuildOptions& opts) {
  check_tau(beliefs, tau);
  StaticLp out;
  std::vector<double> reach;
  for (int k = 0; k <= tau; ++k) reach.push_back(beliefs.no_info(k));
  for (int k = 1; k <= tau; ++k) {
    for (Signal s : kSignals) {
      if (beliefs.signal_defined(s)) reach.push_back(*beliefs.posterior(s, k));
    }
  }
  std::sort(reach.begin(), reach.end());
  for (double mu : reach) {
    if (out.beliefs.empty() || mu - out.beliefs.back() > 1e-12) out.beliefs.push_back(mu);
  }
  const int n = static_cast<int>(out.beliefs.size());
  auto& program = out.program;
  for (int i = 0; i < n; ++i) add_option(program, "P" + std::to_string(i));
  auto var_of = [&](double mu) {
    auto it = std::lower_bound(out.beliefs.begin(), out.beliefs.end(), mu - 1e-12);
    return 2 * static_cast<int>(it - out.beliefs.begin());
  };

  // Effort rows, one per (k, option the agent could take when stopping).
  // The row for the option designated to mu^N_{k-1} is seeded; the rest
  // follow from properness and are generated only if violated.
  const EnvironmentSpec& env = beliefs.environment();
  for (int k = 1; k <= tau; ++k) {
    const ArrivalLaw law(beliefs, k);
    std::vector<lp::Term> gross;
    for (int j = k; j <= tau; ++j) {
      for (Signal s : kSignals) {
        if (!beliefs.signal_defined(s)) continue;
        const double mu = *beliefs.posterior(s, j);
        add_utility(gross, var_of(mu), mu, law.pmf(s, j));
      }
    }
    add_utility(gross, var_of(beliefs.no_info(tau)), beliefs.no_info(tau), law.survival(tau));
    const double rhs = opts.include_cost ? expected_effort_cost(env, law, tau) : 0.0;
    const double stop_mu = beliefs.no_info(k - 1);
    const int own = var_of(stop_mu);
    for (int i = 0; i < n; ++i) {
      lp::Constraint row;
      row.terms = gross;
      add_utility(row.terms, 2 * i, stop_mu, -1.0);
      row.rhs = rhs;
      program.add_constraint(std::move(row));
      out.seed.push_back(2 * i == own);
      out.groups.push_back(program.num_vars + k);
      ++out.effort_rows;
    }
  }

  // Properness between every ordered pair; adjacent pairs seed the solve.
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      program.add_constraint(ic_row(2 * a, 2 * b, out.beliefs[a]));
      out.seed.push_back(std::abs(a - b) == 1);
      out.groups.push_back(2 * a);
      ++out.ic_rows;
    }
  }
  return out;
}

StaticScoringRule extract_rule(const StaticLp& lp, std::span<const double> point) {
  std::vector<RewardPair> options;
  for (std::size_t i = 0; i < lp.beliefs.size(); ++i) {
    options.push_back(read_option(point, 2 * static_cast<int>(i)));
  }
  return StaticScoringRule::from_options(options, "LP");
}

namespace {

template <class Lp, class Extract>
SolveReport scan(const BeliefSystem& beliefs, const SolveOptions& opts, const char* mode,
                 Lp (*build)(const BeliefSystem&, int, const LpBuildOptions&), Extract extract) {
  SolveReport report;
  report.mode = mode;
  ScanEntry trivial;
  trivial.feasible = true;
  report.scan.push_back(trivial);
  extract(report, nullptr, std::span<const double>{});
  const int last = opts.prune ? std::min(beliefs.periods(), max_horizon(beliefs)) : beliefs.periods();
  lp::SolveOptions lp_opts;
  lp_opts.tol = opts.tol;
  lp_opts.exact = opts.exact;
  for (int tau = 1; tau <= last; ++tau) {
    const Lp built = build(beliefs, tau, opts.build);
    ScanEntry entry;
    entry.tau = tau;
    entry.variables = built.program.num_vars;
    entry.rows = static_cast<int>(built.program.constraints.size());
    lp::LazyStats stats;
    lp::Outcome outcome;
    try {
      outcome = lp::solve_lazy(built.program, built.seed, lp_opts, &stats, built.groups);
    } catch (const Error& e) {
      fail(e.code(), e.detail() + " (tau=" + std::to_string(tau) + ")");
    }
    entry.feasible = outcome.status != lp::Status::Infeasible;
    entry.active_rows = stats.active_rows;
    entry.rounds = stats.rounds;
    entry.iterations = stats.iterations;
    entry.max_residual = outcome.max_residual;
    entry.arithmetic = outcome.arithmetic;
    report.scan.push_back(entry);
    if (entry.feasible) {
      report.tau_star = tau;
      extract(report, &built, std::span<const double>(outcome.point));
    }
  }
  return report;
}

}  // namespace

SolveReport solve_dynamic(const BeliefSystem& beliefs, const SolveOptions& opts) {
  return scan<DynamicLp>(
      beliefs, opts, "dynamic", &build_dynamic_lp,
      [](SolveReport& r, const DynamicLp* built, std::span<const double> point) {
        if (!built) {
          MenuContract empty;
          r.contract = empty;
          return;
        }
        r.contract = extract_contract(*built, point);
      });
}

SolveReport solve_static(const BeliefSystem& beliefs, const SolveOptions& opts) {
  return scan<StaticLp>(
      beliefs, opts, "static", &build_static_lp,
      [](SolveReport& r, const StaticLp* built, std::span<const double> point) {
        if (!built) {
          const RewardPair nothing[] = {{0.0, 0.0}};
          r.rule = StaticScoringRule::from_options(nothing, "LP");
          return;
        }
        r.rule = extract_rule(*built, point);
      });
}

VShapedSearch solve_vshaped_grid(const BeliefSystem& beliefs, double grid_step) {
  if (!(grid_step > 0.0) || grid_step > 0.1) {
    fail(ErrorCode::InvalidArgument, "grid step must lie in (0, 0.1]");
  }
  VShapedSearch best{{1.0, grid_step}, -1};
  auto consider = [&](const VShapedParams& p) {
    const int tau = best_response(beliefs, p.rule()).tau_star;
    const bool take = tau > best.tau ||
                      (tau == best.tau && (p.r1 > best.params.r1 ||
                                           (p.r1 == best.params.r1 && p.r0 > best.params.r0)));
    if (take) best = {p, tau};
  };
  const long steps = std::lround(std::ceil(1.0 / grid_step - 1e-9));
  for (long i = 1; i <= steps; ++i) {
    consider({1.0, std::min(1.0, static_cast<double>(i) * grid_step)});
  }
  const double fine = grid_step / 100.0;
  const double center = best.params.r1;
  for (long i = -100; i <= 100; ++i) {
    const double r1 = center + static_cast<double>(i) * fine;
    if (r1 > 0.0 && r1 <= 1.0) consider({1.0, r1});
  }
  for (double mu : beliefs.no_info_path()) {
    if (mu > 0.0 && mu < 1.0) consider(v_shaped_from_kink(mu));
  }
  return best;
}

IncentiveIncrease static_incentive_increase(double prior, double other_prior, double f0b,
                                            double f1g) {
  for (double v : {prior, other_prior, f0b, f1g}) {
    if (!std::isfinite(v) || v <= 0.0 || v >= 1.0) {
      fail(ErrorCode::DomainViolation, "comparative-statics arguments must lie in (0,1)");
    }
  }
  if (prior >= 0.5) fail(ErrorCode::DomainViolation, "comparative statics need prior < 1/2");
  const double odds = prior / (1.0 - prior);
  return {prior * (f0b + f1g - 1.0), other_prior * (f1g - 1.0 - f0b * odds) + f0b * odds};
}

}  // namespace scoremax
