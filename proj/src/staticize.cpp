#include <algorithm>
#include <cmath>

#include "scoremax/error.hpp"
#include "scoremax/optimizer.hpp"

namespace scoremax {

namespace {

struct Point {
  double mu;
  double u;
};

// Lower convex hull, points sorted by belief.
std::vector<Point> lower_hull(std::vector<Point> pts) {
  std::vector<Point> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const Point& a = hull[hull.size() - 2];
      const Point& b = hull.back();
      const double cross = (b.mu - a.mu) * (p.u - a.u) - (b.u - a.u) * (p.mu - a.mu);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return hull;
}

bool in_box(double v) { return v >= -1e-9 && v <= 1.0 + 1e-9; }

}  // namespace

StaticScoringRule staticize_single_signal(const BeliefSystem& beliefs,
                                          const MenuContract& contract) {
  if (!is_single_signal(beliefs.environment())) {
    fail(ErrorCode::NotSingleSignal, "staticization needs exactly one informative signal");
  }
  if (!check_ic(contract, beliefs).empty()) {
    fail(ErrorCode::InvalidArgument, "staticization needs an incentive-compatible contract");
  }
  const int tau = contract.tau;

  // No-signal stopping utility at every node; equal beliefs keep the lowest.
  std::vector<Point> pts;
  for (int k = 0; k <= tau; ++k) {
    const double mu = beliefs.no_info(k);
    pts.push_back({mu, indirect_utility(contract, k, mu).value});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.mu < b.mu || (a.mu == b.mu && a.u < b.u);
  });
  std::vector<Point> uniq;
  for (const auto& p : pts) {
    if (uniq.empty() || p.mu - uniq.back().mu > 1e-12) uniq.push_back(p);
  }

  std::vector<RewardPair> options;
  // Steepest line below every point through a box edge, on each side.
  const bool above_diag = std::all_of(uniq.begin(), uniq.end(),
                                      [](const Point& p) { return p.u > p.mu; });
  if (above_diag) {
    double z0 = 1.0;
    for (const auto& p : uniq) z0 = std::min(z0, (p.u - p.mu) / (1.0 - p.mu));
    options.push_back({std::max(0.0, z0), 1.0});
  } else {
    double z1 = 1.0;
    for (const auto& p : uniq) {
      if (p.mu > 0.0) z1 = std::min(z1, p.u / p.mu);
    }
    options.push_back({0.0, std::max(0.0, z1)});
  }
  const bool above_anti = std::all_of(uniq.begin(), uniq.end(),
                                      [](const Point& p) { return p.u > 1.0 - p.mu; });
  if (above_anti) {
    double z1 = 1.0;
    for (const auto& p : uniq) z1 = std::min(z1, (p.u - (1.0 - p.mu)) / p.mu);
    options.push_back({1.0, std::max(0.0, z1)});
  } else {
    double z0 = 1.0;
    for (const auto& p : uniq) {
      if (p.mu < 1.0) z0 = std::min(z0, p.u / (1.0 - p.mu));
    }
    options.push_back({std::max(0.0, z0), 0.0});
  }

  // Segments of the convexified utility, extended to the box edges.
  const auto hull = lower_hull(uniq);
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const double slope = (hull[i + 1].u - hull[i].u) / (hull[i + 1].mu - hull[i].mu);
    const double r0 = hull[i].u - hull[i].mu * slope;
    const double r1 = r0 + slope;
    if (in_box(r0) && in_box(r1)) options.push_back(make_reward(r0, r1));
  }
  if (hull.size() == 1) options.push_back(make_reward(hull[0].u, hull[0].u));
  return StaticScoringRule::from_options(options, "staticized");
}

}  // namespace scoremax
