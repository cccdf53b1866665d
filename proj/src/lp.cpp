#include "scoremax/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "scoremax/error.hpp"

namespace scoremax::lp {

using Rational = boost::multiprecision::cpp_rational;

int LinearProgram::add_variable(double lo, double hi, std::string name) {
  lower.push_back(lo);
  upper.push_back(hi);
  names.push_back(std::move(name));
  return num_vars++;
}

void LinearProgram::validate() const {
  if (num_vars < 0 || lower.size() != static_cast<std::size_t>(num_vars) ||
      upper.size() != static_cast<std::size_t>(num_vars))
    fail(ErrorCode::DimensionMismatch, "bound vectors do not match num_vars");
  for (int j = 0; j < num_vars; ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || lower[j] > upper[j])
      fail(ErrorCode::InvalidArgument, "variable " + std::to_string(j) + " has an invalid box");
  }
  auto check_terms = [&](const std::vector<Term>& terms) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= num_vars)
        fail(ErrorCode::IndexOutOfRange, "term references variable " + std::to_string(t.var));
      if (!std::isfinite(t.coef)) fail(ErrorCode::InvalidArgument, "non-finite coefficient");
    }
  };
  for (const auto& c : constraints) {
    check_terms(c.terms);
    if (!std::isfinite(c.rhs)) fail(ErrorCode::InvalidArgument, "non-finite right-hand side");
  }
  if (objective) check_terms(*objective);
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "Feasible";
    case Status::Infeasible: return "Infeasible";
    case Status::MaxReached: return "MaxReached";
  }
  return "?";
}

double row_violation(const Constraint& c, std::span<const double> point) {
  double lhs = 0.0;
  for (const auto& t : c.terms) lhs += t.coef * point[t.var];
  if (c.relation == Relation::Equal) return std::abs(lhs - c.rhs);
  return std::max(0.0, c.rhs - lhs);
}

double max_residual(const LinearProgram& lp, std::span<const double> point) {
  if (point.size() != static_cast<std::size_t>(lp.num_vars))
    fail(ErrorCode::DimensionMismatch, "point has the wrong length");
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars; ++j) {
    worst = std::max(worst, lp.lower[j] - point[j]);
    worst = std::max(worst, point[j] - lp.upper[j]);
  }
  for (const auto& c : lp.constraints) worst = std::max(worst, row_violation(c, point));
  return worst;
}

namespace {

using Quad = __float128;

template <class S>
double to_double(const S& x) {
  return static_cast<double>(x);
}
double to_double(const Rational& x) { return x.convert_to<double>(); }

template <class S>
S abs_of(const S& x) {
  return x < 0 ? S(-x) : x;
}

template <class S>
struct Tolerances;

template <>
struct Tolerances<double> {
  static double pivot() { return 1e-9; }
  static double reduced() { return 1e-10; }
};

template <>
struct Tolerances<long double> {
  static long double pivot() { return 1e-11L; }
  static long double reduced() { return 1e-11L; }
};

template <>
struct Tolerances<Quad> {
  static Quad pivot() { return Quad(1e-12); }
  static Quad reduced() { return Quad(1e-12); }
};

template <>
struct Tolerances<Rational> {
  static Rational pivot() { return 0; }
  static Rational reduced() { return 0; }
};

constexpr double kDrift = 1e-11;
constexpr long kDegenerateLimit = 2000;
constexpr long kReinvertInterval = 100;
constexpr double kStateTol = 1e-9;

template <class S>
inline constexpr bool kUseHarris = !std::is_same_v<S, Rational>;

template <class S>
class Simplex {
 public:
  Simplex(const LinearProgram& lp, bool scale_rows) : lp_(lp) {
    n_ = lp.num_vars;
    std::vector<std::vector<S>> rows;
    std::vector<S> rhs;
    std::vector<int> kind;  // 0: >= with basic slack, 1: >= with artificial, 2: equality
    for (const auto& c : lp.constraints) {
      std::vector<double> a(n_, 0.0);
      for (const auto& t : c.terms) a[t.var] += t.coef;
      double shift = 0.0;
      for (int j = 0; j < n_; ++j) shift += a[j] * lp.lower[j];
      double scale = 0.0;
      for (double v : a) scale = std::max(scale, std::abs(v));
      if (scale == 0.0) {
        double b = c.rhs - shift;
        bool ok = c.relation == Relation::Equal ? std::abs(b) <= 1e-12 : b <= 1e-12;
        if (!ok) trivially_infeasible_ = true;
        continue;
      }
      std::vector<S> row(n_);
      S b;
      if (scale_rows) {
        S sh = 0;
        for (int j = 0; j < n_; ++j) {
          row[j] = S(a[j]) / S(scale);
          sh += S(a[j]) * S(lp.lower[j]);
        }
        b = (S(c.rhs) - sh) / S(scale);
      } else {
        S sh = 0;
        for (int j = 0; j < n_; ++j) {
          row[j] = S(a[j]);
          sh += row[j] * S(lp.lower[j]);
        }
        b = S(c.rhs) - sh;
      }
      int k;
      if (c.relation == Relation::Equal) {
        k = 2;
        if (b < 0) {
          for (auto& v : row) v = -v;
          b = -b;
        }
      } else if (b <= 0) {
        k = 0;
        for (auto& v : row) v = -v;
        b = -b;
      } else {
        k = 1;
      }
      rows.push_back(std::move(row));
      rhs.push_back(b);
      kind.push_back(k);
    }

    m_ = static_cast<int>(rows.size());
    int slacks = 0, arts = 0;
    for (int k : kind) {
      if (k != 2) ++slacks;
      if (k != 0) ++arts;
    }
    first_art_ = n_ + slacks;
    cols_ = n_ + slacks + arts;
    tab_.assign(static_cast<std::size_t>(m_) * cols_, S(0));
    beta_ = rhs;
    basis_.assign(m_, -1);
    pos_.assign(cols_, -1);
    at_upper_.assign(cols_, 0);
    has_upper_.assign(cols_, 0);
    upper_.assign(cols_, S(0));
    dead_.assign(cols_, 0);
    for (int j = 0; j < n_; ++j) {
      has_upper_[j] = 1;
      upper_[j] = S(lp.upper[j]) - S(lp.lower[j]);
    }
    int slack = n_, art = first_art_;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) at(i, j) = rows[i][j];
      if (kind[i] == 0) {
        at(i, slack) = S(1);
        set_basic(i, slack++);
      } else {
        if (kind[i] == 1) at(i, slack++) = S(-1);
        at(i, art) = S(1);
        set_basic(i, art++);
      }
    }
    for (int j = 0; j < cols_; ++j) live_.push_back(j);
    original_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < cols_; ++j) {
        if (at(i, j) != 0) original_[i].push_back({j, at(i, j)});
      }
    }
    original_rhs_ = beta_;
  }

  bool trivially_infeasible() const { return trivially_infeasible_; }

  // Phase 1; returns the sum of artificial values at the optimum.
  S phase_one(long max_iterations) {
    std::vector<S> cost(cols_, S(0));
    for (int j = first_art_; j < cols_; ++j) cost[j] = S(-1);
    run(cost, max_iterations);
    S total = 0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= first_art_) total += beta_[i];
    for (int j = first_art_; j < cols_; ++j) {
      has_upper_[j] = 1;
      upper_[j] = S(0);
      if (pos_[j] < 0) kill(j);
    }
    return total;
  }

  void phase_two(const std::vector<Term>& objective, long max_iterations) {
    std::vector<S> cost(cols_, S(0));
    for (const auto& t : objective) cost[t.var] += S(t.coef);
    run(cost, max_iterations);
  }

  std::vector<double> point() const {
    std::vector<double> x(n_);
    for (int j = 0; j < n_; ++j) {
      S y = pos_[j] >= 0 ? beta_[pos_[j]] : (at_upper_[j] ? upper_[j] : S(0));
      double v = lp_.lower[j] + to_double(y);
      x[j] = std::clamp(v, lp_.lower[j], lp_.upper[j]);
    }
    return x;
  }

  long iterations() const { return iterations_; }

 private:
  S& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }
  const S& at(int i, int j) const { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }

  void set_basic(int i, int j) {
    basis_[i] = j;
    pos_[j] = i;
  }

  void kill(int j) {
    if (dead_[j]) return;
    dead_[j] = 1;
    live_.erase(std::find(live_.begin(), live_.end(), j));
  }

  void reduced_costs(const std::vector<S>& cost, std::vector<S>& d) const {
    std::fill(d.begin(), d.end(), S(0));
    for (int j : live_) {
      if (pos_[j] >= 0) continue;
      S v = cost[j];
      for (int i = 0; i < m_; ++i) {
        const S& a = at(i, j);
        if (a != 0) v -= cost[basis_[i]] * a;
      }
      d[j] = v;
    }
  }

  // Rebuilds the tableau and basic values from the original rows by
  // Gauss-Jordan elimination on the current basis, discarding the rounding
  // error accumulated by successive pivots.
  void reinvert() {
    std::fill(tab_.begin(), tab_.end(), S(0));
    std::vector<S> rhs = original_rhs_;
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, v] : original_[i]) {
        at(i, j) = v;
        if (pos_[j] < 0 && at_upper_[j]) rhs[i] -= v * upper_[j];
      }
    }
    const std::vector<int> basics = basis_;
    std::vector<char> assigned(m_, 0);
    std::vector<int> nz;
    for (int j : basics) {
      int r = -1;
      S best = 0;
      for (int i = 0; i < m_; ++i) {
        if (!assigned[i] && abs_of(at(i, j)) > best) {
          best = abs_of(at(i, j));
          r = i;
        }
      }
      if (r < 0 || best < S(1e-13)) fail(ErrorCode::NumericalBreakdown, "singular simplex basis");
      assigned[r] = 1;
      const S piv = at(r, j);
      nz.clear();
      for (int c : live_) {
        S& v = at(r, c);
        if (v != 0) {
          v /= piv;
          nz.push_back(c);
        }
      }
      rhs[r] /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        const S f = at(i, j);
        if (f == 0) continue;
        for (int c : nz) at(i, c) -= f * at(r, c);
        at(i, j) = S(0);
        rhs[i] -= f * rhs[r];
      }
      basis_[r] = j;
      pos_[j] = r;
    }
    beta_ = rhs;
  }

  // A freshly reinverted basis whose true basic values leave their bounds
  // means the pivot path lost accuracy; the caller retries with more
  // precision.
  void check_basic_bounds() const {
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      double viol = -to_double(beta_[i]);
      if (has_upper_[b]) viol = std::max(viol, to_double(beta_[i] - upper_[b]));
      if (viol > kStateTol) fail(ErrorCode::NumericalBreakdown, "ill-conditioned simplex basis");
    }
  }

  void run(const std::vector<S>& cost, long max_iterations) {
    std::vector<S> d(cols_, S(0));
    reduced_costs(cost, d);
    long since_reinvert = 0;
    const S eps_d = Tolerances<S>::reduced();
    const S eps_p = Tolerances<S>::pivot();
    // Exact arithmetic never needs the tolerance-based test. In floating
    // point a long run of degenerate steps falls back to Bland's ratio rule,
    // which cannot cycle.
    bool harris = kUseHarris<S>;
    long degenerate_run = 0;
    std::vector<int> nz;
    for (;;) {
      // Largest reduced cost while Harris is on; smallest index (Bland)
      // otherwise.
      int enter = -1;
      S best_d = 0;
      for (int j : live_) {
        if (pos_[j] >= 0) continue;
        if (has_upper_[j] && upper_[j] == 0) continue;
        if ((!at_upper_[j] && d[j] > eps_d) || (at_upper_[j] && d[j] < -eps_d)) {
          if (!harris) {
            enter = j;
            break;
          }
          const S g = abs_of(d[j]);
          if (g > best_d) {
            best_d = g;
            enter = j;
          }
        }
      }
      if (enter < 0) {
        if (!kUseHarris<S>) return;
        if (since_reinvert == 0) {
          check_basic_bounds();
          return;
        }
        reinvert();
        reduced_costs(cost, d);
        since_reinvert = 0;
        continue;
      }
      if (kUseHarris<S> && ++since_reinvert > std::max<long>(kReinvertInterval, 2L * m_)) {
        reinvert();
        reduced_costs(cost, d);
        since_reinvert = 0;
        continue;
      }
      if (++iterations_ > max_iterations)
        fail(ErrorCode::ConvergenceFailure, "simplex iteration limit reached");

      const int dir = at_upper_[enter] ? -1 : 1;
      bool bounded = has_upper_[enter] != 0;
      S theta = bounded ? upper_[enter] : S(0);
      int leave_row = -1;
      // Step along the entering column until row i's basic variable hits a
      // bound; false when the row does not block.
      auto blocking = [&](int i, S& alpha_abs, S& dist) {
        const S alpha = dir > 0 ? at(i, enter) : S(-at(i, enter));
        const int b = basis_[i];
        if (alpha > eps_p) {
          alpha_abs = alpha;
          dist = beta_[i];
        } else if (alpha < -eps_p && has_upper_[b]) {
          alpha_abs = -alpha;
          dist = upper_[b] - beta_[i];
        } else {
          return false;
        }
        if (dist < 0) dist = S(0);
        return true;
      };
      S alpha_abs, dist;
      if (harris) {
        // Harris two-pass test: the loosest step keeping every basic
        // variable within kDrift of its bounds, then the largest pivot among
        // the rows that block within that step.
        bool any = false;
        S cap = 0;
        for (int i = 0; i < m_; ++i) {
          if (!blocking(i, alpha_abs, dist)) continue;
          const S r = (dist + S(kDrift)) / alpha_abs;
          if (!any || r < cap) cap = r;
          any = true;
        }
        if (any && !(bounded && theta <= cap)) {
          S best_abs = 0;
          for (int i = 0; i < m_; ++i) {
            if (!blocking(i, alpha_abs, dist)) continue;
            if (dist / alpha_abs <= cap && alpha_abs > best_abs) {
              best_abs = alpha_abs;
              leave_row = i;
              theta = dist / alpha_abs;
            }
          }
          bounded = true;
        }
      } else {
        int leave_index = enter;
        for (int i = 0; i < m_; ++i) {
          if (!blocking(i, alpha_abs, dist)) continue;
          const S lim = dist / alpha_abs;
          const int b = basis_[i];
          if (!bounded || lim < theta || (lim == theta && b < leave_index)) {
            bounded = true;
            theta = lim;
            leave_row = i;
            leave_index = b;
          }
        }
      }
      if (!bounded) fail(ErrorCode::NumericalBreakdown, "unbounded simplex direction");

      if (theta == 0) {
        if (++degenerate_run > kDegenerateLimit) harris = false;
      } else {
        degenerate_run = 0;
      }
      if (theta != 0) {
        S step = dir > 0 ? theta : S(-theta);
        for (int i = 0; i < m_; ++i) {
          const S& a = at(i, enter);
          if (a != 0) beta_[i] -= step * a;
        }
      }
      if (leave_row < 0) {
        at_upper_[enter] = !at_upper_[enter];
        continue;
      }

      const int r = leave_row;
      const int leaving = basis_[r];
      S alpha_r = dir > 0 ? at(r, enter) : S(-at(r, enter));
      const S entering_value = at_upper_[enter] ? S(upper_[enter] - theta) : theta;
      at_upper_[leaving] = alpha_r > 0 ? 0 : 1;
      at_upper_[enter] = 0;

      const S piv = at(r, enter);
      if (!std::is_same_v<S, Rational> && abs_of(piv) < S(1e-13)) fail(ErrorCode::NumericalBreakdown, "pivot magnitude below 1e-13");
      nz.clear();
      for (int j : live_) {
        S& v = at(r, j);
        if (v != 0) {
          v /= piv;
          nz.push_back(j);
        }
      }
      at(r, enter) = S(1);
      for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        const S f = at(i, enter);
        if (f == 0) continue;
        for (int j : nz) at(i, j) -= f * at(r, j);
        at(i, enter) = S(0);
      }
      const S fd = d[enter];
      if (fd != 0)
        for (int j : nz) d[j] -= fd * at(r, j);
      d[enter] = S(0);

      pos_[leaving] = -1;
      set_basic(r, enter);
      beta_[r] = entering_value;
      if (leaving >= first_art_) kill(leaving);
    }
  }

  const LinearProgram& lp_;
  int n_ = 0;
  int m_ = 0;
  int cols_ = 0;
  int first_art_ = 0;
  bool trivially_infeasible_ = false;
  std::vector<S> tab_;
  std::vector<S> beta_;
  std::vector<int> basis_;
  std::vector<int> pos_;
  std::vector<char> at_upper_;
  std::vector<char> has_upper_;
  std::vector<S> upper_;
  std::vector<char> dead_;
  std::vector<int> live_;
  std::vector<std::vector<std::pair<int, S>>> original_;
  std::vector<S> original_rhs_;
  long iterations_ = 0;
};

template <class S>
Outcome solve_with(const LinearProgram& lp, const SolveOptions& opts) {
  Outcome out;
  constexpr bool exact = std::is_same_v<S, Rational>;
  Simplex<S> sx(lp, !exact);
  if (sx.trivially_infeasible()) {
    out.status = Status::Infeasible;
    out.infeasibility = std::numeric_limits<double>::infinity();
    return out;
  }
  S infeas = sx.phase_one(opts.max_iterations);
  out.infeasibility = to_double(infeas);
  const bool infeasible = exact ? infeas > 0 : out.infeasibility > opts.tol;
  if (infeasible) {
    out.status = Status::Infeasible;
    out.iterations = sx.iterations();
    return out;
  }
  if (lp.objective) sx.phase_two(*lp.objective, opts.max_iterations);
  out.status = lp.objective ? Status::MaxReached : Status::Feasible;
  out.point = sx.point();
  out.iterations = sx.iterations();
  if (lp.objective)
    for (const auto& t : *lp.objective) out.objective += t.coef * out.point[t.var];
  return out;
}

}  // namespace

Outcome solve(const LinearProgram& lp, const SolveOptions& opts) {
  lp.validate();
  if (!(opts.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  auto attempt = [&](auto tag, const char* name) {
    using S = decltype(tag);
    Outcome out = solve_with<S>(lp, opts);
    out.arithmetic = name;
    if (out.status != Status::Infeasible) {
      out.max_residual = max_residual(lp, out.point);
      if (out.max_residual > opts.tol) {
        std::ostringstream msg;
        msg << "residual " << out.max_residual << " exceeds tolerance " << opts.tol;
        fail(ErrorCode::NumericalBreakdown, msg.str());
      }
    }
    return out;
  };
  if (opts.exact) return attempt(Rational{}, "rational");
  // Precision ladder: double, extended, quad, then exact rationals.
  try {
    return attempt(double{}, "double");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalBreakdown) throw;
  }
  try {
    return attempt((long double){}, "extended");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalBreakdown) throw;
  }
  try {
    return attempt(Quad{}, "quad");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalBreakdown) throw;
  }
  return attempt(Rational{}, "rational");
}

Outcome solve_lazy(const LinearProgram& lp, std::vector<char> active, const SolveOptions& opts,
                   LazyStats* stats, std::span<const int> groups) {
  lp.validate();
  if (active.size() != lp.constraints.size())
    fail(ErrorCode::DimensionMismatch, "active mask does not match constraint count");
  if (!groups.empty() && groups.size() != lp.constraints.size())
    fail(ErrorCode::DimensionMismatch, "row groups do not match constraint count");
  // Most violated inactive row per group in the current round.
  std::vector<std::pair<double, std::size_t>> worst;
  LazyStats local;
  for (;;) {
    LinearProgram sub;
    sub.num_vars = lp.num_vars;
    sub.lower = lp.lower;
    sub.upper = lp.upper;
    sub.objective = lp.objective;
    for (std::size_t i = 0; i < lp.constraints.size(); ++i)
      if (active[i]) sub.constraints.push_back(lp.constraints[i]);
    ++local.rounds;
    local.active_rows = static_cast<int>(sub.constraints.size());
    Outcome out = solve(sub, opts);
    local.iterations += out.iterations;
    if (out.status == Status::Infeasible) {
      if (stats) *stats = local;
      return out;
    }
    bool added = false;
    worst.clear();
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
      if (active[i]) continue;
      const double v = row_violation(lp.constraints[i], out.point);
      if (v <= opts.tol) continue;
      added = true;
      if (groups.empty() || groups[i] < 0) {
        active[i] = 1;
        continue;
      }
      const auto g = static_cast<std::size_t>(groups[i]);
      if (worst.size() <= g) worst.resize(g + 1, {0.0, 0});
      if (v > worst[g].first) worst[g] = {v, i};
    }
    for (const auto& [v, i] : worst) {
      if (v > 0.0) active[i] = 1;
    }
    if (!added) {
      out.max_residual = max_residual(lp, out.point);
      if (stats) *stats = local;
      return out;
    }
  }
}

std::string dump(const LinearProgram& lp) {
  auto name = [&](int j) {
    if (j < static_cast<int>(lp.names.size()) && !lp.names[j].empty()) return lp.names[j];
    return "x" + std::to_string(j);
  };
  std::ostringstream os;
  os.precision(17);
  for (const auto& c : lp.constraints) {
    bool first = true;
    for (const auto& t : c.terms) {
      if (!first) os << ' ';
      os << t.coef << '*' << name(t.var);
      first = false;
    }
    if (first) os << '0';
    os << (c.relation == Relation::Equal ? " = " : " >= ") << c.rhs << '\n';
  }
  return os.str();
}

}  // namespace scoremax::lp
