#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scoremax/contracts.hpp"
#include "scoremax/lp.hpp"
#include "scoremax/model.hpp"

namespace scoremax {

struct LpBuildOptions {
  // When false the effort rows drop the expected-cost term (literal
  // cost-free variant, kept for comparison).
  bool include_cost = true;
};

// Variable layout of a dynamic-contract LP. Each option occupies two
// consecutive variables (r0, r1); -1 marks an absent option.
struct DynamicLayout {
  int tau = 0;
  std::vector<int> good;  // index k-1
  std::vector<int> bad;   // index k-1
  std::vector<int> no_info;  // index k = 0..tau; tau is the terminal option
};

struct DynamicLp {
  lp::LinearProgram program;
  DynamicLayout layout;
  int effort_rows = 0;
  int ic_rows = 0;
  std::vector<char> seed;  // initial active rows for row generation
  std::vector<int> groups;  // row generation groups (IC rows by bearer)
};

DynamicLp build_dynamic_lp(const BeliefSystem& beliefs, int tau, const LpBuildOptions& opts = {});
MenuContract extract_contract(const DynamicLp& lp, std::span<const double> point);

struct StaticLp {
  lp::LinearProgram program;
  std::vector<double> beliefs;  // sorted distinct reachable beliefs, one option each
  int effort_rows = 0;
  int ic_rows = 0;
  std::vector<char> seed;
  std::vector<int> groups;
};

StaticLp build_static_lp(const BeliefSystem& beliefs, int tau, const LpBuildOptions& opts = {});
StaticScoringRule extract_rule(const StaticLp& lp, std::span<const double> point);

struct ScanEntry {
  int tau = 0;
  bool feasible = false;
  int variables = 0;
  int rows = 0;
  int active_rows = 0;
  int rounds = 0;
  long iterations = 0;
  double max_residual = 0.0;
  std::string arithmetic;  // of the final LP solve
};

struct SolveOptions {
  double tol = 1e-9;
  bool exact = false;
  // Stop the scan at max_horizon; off scans every tau up to K.
  bool prune = true;
  LpBuildOptions build;
};

struct SolveReport {
  std::string mode;  // "dynamic" or "static"
  int tau_star = 0;
  std::optional<MenuContract> contract;
  std::optional<StaticScoringRule> rule;
  std::vector<ScanEntry> scan;
};

// Scans tau = 0..min(K, max_horizon) and keeps the largest feasible tau.
SolveReport solve_dynamic(const BeliefSystem& beliefs, const SolveOptions& opts = {});
SolveReport solve_static(const BeliefSystem& beliefs, const SolveOptions& opts = {});

struct VShapedSearch {
  VShapedParams params;
  int tau = 0;
};

// Best response over V-shaped rules with r0 = 1 and r1 on a grid (plus one
// refinement pass at grid_step / 100 around the incumbent), and over rules
// with a kink at each no-information belief. Ties go to the larger r1.
VShapedSearch solve_vshaped_grid(const BeliefSystem& beliefs, double grid_step = 1e-3);

// Perfect good-news learning in continuous time.
double value_function_constant(double r1, double c, double lambda);
double value_function_cont(double mu, double r1, double c, double lambda);

struct PerfectLearningSolution {
  double c = 0.0;
  double lambda = 0.0;
  double prior = 0.0;
  double horizon = 0.0;

  bool effort = false;  // some r1 <= 1 induces the agent to start working
  double mu_star = 0.0;
  double mu_star_star = 0.0;
  double r_min = 0.0;  // smallest r1 for which a work region exists
  double r_T = 1.0;
  double r1_opt = 0.0;

  double stopping_belief(double r1) const;
  double mu_lower(double r1) const { return stopping_belief(r1); }
  // Upper end of the work region; empty when the region is empty.
  std::optional<double> mu_upper(double r1) const;
  double value(double mu, double r1) const { return value_function_cont(mu, r1, c, lambda); }
};

PerfectLearningSolution optimal_r1_analytic(double c, double lambda, double prior,
                                            double horizon);

// Static scoring rule inducing at least the contract's effort when only one
// signal is informative.
StaticScoringRule staticize_single_signal(const BeliefSystem& beliefs,
                                          const MenuContract& contract);

struct IncentiveIncrease {
  double at_prior = 0.0;    // Inc(D)
  double fixed_rule = 0.0;  // Inc(D'; D)
};

IncentiveIncrease static_incentive_increase(double prior, double other_prior, double f0b,
                                            double f1g);

}  // namespace scoremax
