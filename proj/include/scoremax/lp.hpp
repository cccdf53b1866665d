#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scoremax::lp {

enum class Relation { GreaterEqual, Equal };

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::GreaterEqual;
  double rhs = 0.0;
};

// Dense-friendly LP over boxed variables. Every bound must be finite.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> names;  // optional; used by dump()
  std::vector<Constraint> constraints;
  std::optional<std::vector<Term>> objective;  // maximized when present

  int add_variable(double lo, double hi, std::string name = {});
  void add_constraint(Constraint c) { constraints.push_back(std::move(c)); }
  void validate() const;
};

enum class Status {
  Feasible,    // a point satisfying every row (no objective given)
  Infeasible,  // phase-1 optimum strictly positive
  MaxReached,  // objective maximized over the feasible set
};

const char* to_string(Status s);

struct Outcome {
  Status status = Status::Infeasible;
  std::vector<double> point;
  double max_residual = 0.0;
  double infeasibility = 0.0;  // phase-1 optimum (sum of artificials)
  double objective = 0.0;
  long iterations = 0;
  std::string arithmetic;  // "double", "extended", "quad" or "rational"
};

struct SolveOptions {
  double tol = 1e-9;
  // Exact rational arithmetic; intended for small instances only.
  bool exact = false;
  long max_iterations = 5'000'000;
};

// Two-phase bounded-variable simplex with Bland's entering rule. A returned
// point is re-validated by max_residual(). When a floating-point attempt loses
// accuracy (residual above tol, or a reinverted basis out of bounds) the solve
// is repeated in long double, then quad precision, then exact rationals; only
// a failure of the exact attempt surfaces as NumericalBreakdown.
Outcome solve(const LinearProgram& lp, const SolveOptions& opts = {});

// Largest violation of any row or bound at `point`, computed directly from
// the rows (independent of solver state).
double max_residual(const LinearProgram& lp, std::span<const double> point);
double row_violation(const Constraint& c, std::span<const double> point);

struct LazyStats {
  int rounds = 0;
  int active_rows = 0;
  long iterations = 0;
};

// Row generation: solves over the rows flagged in `initially_active`, adds
// the rows the point violates, and repeats until the point satisfies the
// full program (or the restricted program is already infeasible). Rows that
// share a nonnegative entry of `groups` enter one at a time, most violated
// first; an empty span or a negative entry adds every violated row.
Outcome solve_lazy(const LinearProgram& lp, std::vector<char> initially_active,
                   const SolveOptions& opts = {}, LazyStats* stats = nullptr,
                   std::span<const int> groups = {});

// One line per constraint: `coef*var ... >= rhs` (or `= rhs`).
std::string dump(const LinearProgram& lp);

}  // namespace scoremax::lp
