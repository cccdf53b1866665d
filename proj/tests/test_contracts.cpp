#include "doctest.h"

#include <random>

#include "scoremax/agent.hpp"
#include "scoremax/contracts.hpp"
#include "scoremax/error.hpp"
#include "support.hpp"

using namespace scoremax;
using testsupport::Family;

namespace {

bool near(const RewardPair& a, const RewardPair& b, double tol = 1e-12) {
  return std::abs(a.r0 - b.r0) <= tol && std::abs(a.r1 - b.r1) <= tol;
}

ErrorCode error_code(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

}  // namespace

TEST_CASE("v-shaped parameters from a kink") {
  CHECK(near(v_shaped_from_kink(0.5).rule().options[0], {1, 0}));
  auto half = v_shaped_from_kink(0.5);
  CHECK((half.r0 == 1.0 && half.r1 == 1.0));
  auto two_thirds = v_shaped_from_kink(2.0 / 3.0);
  CHECK(two_thirds.r0 == 1.0);
  CHECK(two_thirds.r1 == doctest::Approx(0.5).epsilon(1e-15));
  auto quarter = v_shaped_from_kink(0.25);
  CHECK(quarter.r0 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(quarter.r1 == 1.0);
  CHECK(error_code([] { v_shaped_from_kink(0.0); }) == ErrorCode::InvalidKink);
  CHECK(error_code([] { v_shaped_from_kink(1.0); }) == ErrorCode::InvalidKink);
}

TEST_CASE("indirect utility and its tie rule") {
  const std::vector<RewardPair> v{{1, 0}, {0, 1}};
  auto tie = indirect_utility(v, 0.5);
  CHECK(tie.value == 0.5);
  CHECK(near(tie.option, {1, 0}));
  auto hi = indirect_utility(v, 0.8);
  CHECK(hi.value == doctest::Approx(0.8));
  CHECK(near(hi.option, {0, 1}));
  auto kink = indirect_utility(v_shaped_from_kink(2.0 / 3.0).rule(), 0.5);
  CHECK(kink.value == doctest::Approx(0.5));
  CHECK(near(kink.option, {1, 0}));
  CHECK(error_code([] { indirect_utility(std::vector<RewardPair>{}, 0.5); }) ==
        ErrorCode::EmptyMenu);
}

TEST_CASE("rewards outside the unit box are rejected") {
  CHECK_THROWS_AS(make_reward(1.1, 0.0), Error);
  CHECK_THROWS_AS(make_reward(0.0, -0.2), Error);
  CHECK(make_reward(1.0 + 5e-10, -5e-10) == RewardPair{1.0, 0.0});
}

TEST_CASE("myopic-incentive contract") {
  SUBCASE("odds ratio rewards") {
    BeliefSystem b({1.0, 4, 0.25, 0.05, {0.2, 0.1, 0.1, 0.2}});
    auto c = myopic_incentive_contract(b, 4);
    for (const auto& r : c.bad) CHECK(near(r, {1.0 / 3.0, 0.0}, 1e-15));
    for (const auto& r : c.good) CHECK(near(r, {1.0, 0.0}));
    CHECK(near(c.terminal, {1.0, 0.0}));
    auto s = myopic_incentive_contract(b, 4, MyopicOrientation::Swapped);
    for (const auto& r : s.good) CHECK(near(r, {0.0, 1.0}));
  }
  SUBCASE("stationary prior 0.4") {
    BeliefSystem b({1.0, 6, 0.4, 0.05, {0.2, 0.1, 0.1, 0.2}});
    for (const auto& r : myopic_incentive_contract(b, 6).bad) CHECK(near(r, {2.0 / 3.0, 0.0}));
  }
  SUBCASE("prior at one half") {
    BeliefSystem b({1.0, 6, 0.5, 0.05, {0.2, 0.1, 0.1, 0.2}});
    CHECK(error_code([&] { myopic_incentive_contract(b, 3); }) == ErrorCode::DomainViolation);
  }
  SUBCASE("slow-drift family: swapped orientation is IC") {
    for (double eps : {0.02, 0.01, 0.005, 0.0}) {
      BeliefSystem b({1.0, 80, 0.3, 0.05, {0.24, 0.04, 0.045 + eps, 0.245}});
      CHECK(check_ic(myopic_incentive_contract(b, 80, MyopicOrientation::Swapped), b).empty());
    }
  }
  SUBCASE("when each orientation is IC") {
    // Verbatim pays (1,0) after good news, which every bad-news bearer prefers
    // to its own (odds, 0) option. Swapped is IC exactly when no bad-news
    // posterior sits above the same period's no-information belief.
    std::mt19937_64 rng(5);
    int swapped_ic = 0;
    for (int t = 0; t < 200; ++t) {
      auto env = testsupport::random_env(rng, Family::General, 12);
      if (env.prior >= 0.5) continue;
      BeliefSystem b(env);
      auto verbatim = myopic_incentive_contract(b, 12, MyopicOrientation::Verbatim);
      auto swapped = myopic_incentive_contract(b, 12, MyopicOrientation::Swapped);
      const bool both = b.signal_defined(Signal::Good) && b.signal_defined(Signal::Bad);
      CHECK(check_ic(verbatim, b).empty() == !both);
      bool ordered = true;
      for (int k = 1; k <= 12; ++k)
        if (auto mb = b.posterior(Signal::Bad, k)) ordered = ordered && *mb <= b.no_info(k) + 1e-12;
      CHECK(check_ic(swapped, b).empty() == (ordered || !both));
      swapped_ic += check_ic(swapped, b).empty();
      for (std::size_t k = 1; k < swapped.bad.size(); ++k)
        CHECK(swapped.bad[k].r0 <= swapped.bad[k - 1].r0);
    }
    CHECK(swapped_ic > 0);
  }
}

TEST_CASE("incentive compatibility check") {
  BeliefSystem b({1.0, 4, 0.3, 0.05, {0.2, 0.1, 0.1, 0.2}});  // stationary
  SUBCASE("later good-news option pays more") {
    MenuContract c;
    c.tau = 2;
    c.good = {{0, 0.5}, {0, 0.9}};
    c.bad = {{0.2, 0}, {0.2, 0}};
    c.terminal = {0.2, 0};
    auto v = check_ic(c, b);
    REQUIRE(v.size() >= 1);
    CHECK(v.front().bearer == OptionKind::Good);
    CHECK(v.front().period == 1);
    CHECK(v.front().offending.reward == RewardPair{0, 0.9});
    CHECK(v.front().slack == doctest::Approx(-0.4 * 0.3 * 0.2 / 0.13));
  }
  SUBCASE("single option") {
    MenuContract c;
    c.terminal = {0.3, 0.6};
    CHECK(check_ic(c, b).empty());
  }
  SUBCASE("horizon mismatch") {
    MenuContract c;
    c.tau = 9;
    c.good.assign(9, {0, 1});
    c.bad.assign(9, {1, 0});
    CHECK(error_code([&] { check_ic(c, b); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("canonical form") {
  SUBCASE("stationary v-shaped menu is a fixed point") {
    for (double D : {0.3, 0.6}) {
      BeliefSystem b({1.0, 5, D, 0.05, {0.2, 0.1, 0.1, 0.2}});
      auto v = v_shaped_from_kink(D);
      MenuContract c;
      c.tau = 5;
      c.good.assign(5, {0, v.r1});
      c.bad.assign(5, {v.r0, 0});
      c.terminal = {v.r0, 0};
      REQUIRE(check_ic(c, b).empty());
      auto out = canonicalize(c, b);
      for (int k = 0; k < 5; ++k) {
        CHECK(near(out.good[k], c.good[k], 1e-12));
        CHECK(near(out.bad[k], c.bad[k], 1e-12));
      }
      CHECK(near(out.terminal, c.terminal, 1e-12));
    }
  }
  SUBCASE("bad-news option rebalanced onto r0 = 1") {
    BeliefSystem b({1.0, 3, 0.6, 0.05, {0.0, 0.0, 0.2, 0.2}});
    MenuContract c;
    c.tau = 1;
    c.bad = {{0.7, 0.3}};
    c.terminal = {0.7, 0.3};
    auto out = canonicalize(c, b);
    CHECK(near(out.bad[0], {1.0, 0.1}, 1e-12));
    CHECK(near(out.terminal, {1.0, 0.1}, 1e-12));
  }
  SUBCASE("constrained good-news maximizer") {
    const std::pair<double, double> caps[] = {{0.3, 0.4}};
    CHECK(near(maximize_under_caps(0.8, caps), {1.0 / 7.0, 1.0}, 1e-12));
  }
  SUBCASE("myopic contract keeps its effort") {
    BeliefSystem b({1.0, 30, 0.3, 0.05, {0.24, 0.04, 0.065, 0.245}});
    for (auto o : {MyopicOrientation::Verbatim, MyopicOrientation::Swapped}) {
      auto c = myopic_incentive_contract(b, 30, o);
      CHECK(best_response(b, canonicalize(c, b)).tau_star >= best_response(b, c).tau_star);
    }
  }
}

TEST_CASE("property: v-shaped kink identity and convex indirect utility") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    VShapedParams p{0.01 + 0.99 * u(rng), 0.01 + 0.99 * u(rng)};
    const double m = p.kink();
    CHECK(std::abs(utility(m, {p.r0, 0}) - utility(m, {0, p.r1})) <= 1e-15);
    auto back = v_shaped_from_kink(m);
    CHECK(std::abs(back.kink() - m) <= 1e-12);

    std::vector<RewardPair> opts(1 + rng() % 5);
    for (auto& r : opts) r = {u(rng), u(rng)};
    double a = u(rng), c = u(rng);
    if (a > c) std::swap(a, c);
    const double w = u(rng);
    const double mid = w * a + (1 - w) * c;
    CHECK(indirect_utility(opts, mid).value <=
          w * indirect_utility(opts, a).value + (1 - w) * indirect_utility(opts, c).value + 1e-12);
  }
}

// Arbitrary IC contracts may have no canonical form (the no-signal floor
// options can tempt bad-news bearers); those must be reported, not returned.
TEST_CASE("property: canonicalize is idempotent and never reduces effort") {
  std::mt19937_64 rng(33);
  int checked = 0, refused = 0;
  for (int t = 0; t < 200; ++t) {
    auto env = testsupport::random_env(rng, static_cast<Family>(t % 4), 2 + t % 10);
    BeliefSystem b(env);
    auto c = testsupport::nested_pool_contract(b, env.periods, rng);
    REQUIRE(check_ic(c, b).empty());
    MenuContract once;
    try {
      once = canonicalize(c, b);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleCanonicalization);
      ++refused;
      continue;
    }
    auto twice = canonicalize(once, b);
    CHECK(check_ic(once, b).empty());
    for (std::size_t k = 0; k < once.good.size(); ++k) CHECK(near(once.good[k], twice.good[k], 1e-10));
    for (std::size_t k = 0; k < once.bad.size(); ++k) {
      CHECK(near(once.bad[k], twice.bad[k], 1e-10));
      if (k > 0) {
        CHECK(once.bad[k].r0 <= once.bad[k - 1].r0 + 1e-12);
        CHECK(once.bad[k].r1 <= once.bad[k - 1].r1 + 1e-12);
      }
      if (once.bad[k].r1 > 1e-12) CHECK(once.bad[k].r0 == doctest::Approx(1.0));
    }
    CHECK(near(once.terminal, twice.terminal, 1e-10));
    CHECK(best_response(b, once).tau_star >= best_response(b, c).tau_star);
    ++checked;
  }
  MESSAGE("canonical forms: ", checked, " built, ", refused, " refused");
  CHECK(checked > refused);
}
