#include <gtest/gtest.h>

#include "ipbt/benchmarks.hpp"
#include "ipbt/errors.hpp"
#include "test_support.hpp"

using namespace ipbt;
using namespace ipbt::testing;

TEST(FullInformation, Example3FixedPrices) {
  const auto r = solve_full_information(load("example3"));
  for (int x = 1; x <= 25; ++x) {
    EXPECT_EQ(r.menus[x - 1].threshold, std::max(13 - x, 1)) << x;
    // Once the threshold reaches the lowest buyer the price is v21(x) + v22(1).
    const int price = x <= 12 ? 2 * x + 13 : 3 * x + 1;
    EXPECT_EQ(*r.menus[x - 1].price, Rational(price)) << x;
    for (int y = 1; y <= 25; ++y) {
      const bool trade = y >= 13 - x;
      ASSERT_EQ(r.allocation.q()(x - 1, y - 1), Rational(trade ? 1 : 0));
      ASSERT_EQ(r.allocation.t()(x - 1, y - 1), Rational(trade ? price : 0));
    }
  }
}

TEST(FullInformation, Example4FixedPrices) {
  const auto r = solve_full_information(load("example4"));
  EXPECT_EQ(r.menus[0].threshold, 26);  // 27 - 1 lies above the top buyer type
  EXPECT_FALSE(r.menus[0].price.has_value());
  for (int x = 2; x <= 25; ++x) {
    EXPECT_EQ(r.menus[x - 1].threshold, 27 - x) << x;
    EXPECT_EQ(*r.menus[x - 1].price, Rational(2 * x + 27)) << x;
  }
}

TEST(FullInformation, MotivatingAndSkewedPrior) {
  for (const char* name : {"motivating", "b3"}) {
    const auto r = solve_full_information(load(name));
    EXPECT_EQ(r.allocation.q(), M({{"1", "1"}, {"1", "1"}})) << name;
    EXPECT_EQ(r.allocation.t(), M({{"200", "200"}, {"300", "300"}})) << name;
    EXPECT_EQ(r.seller_payoffs, V({"200", "300"})) << name;
  }
}

TEST(ExAnte, Example1OptimumIsTheFixedPrice) {
  const auto env = load("example1");
  const auto r = solve_ex_ante_optimal(env);
  EXPECT_EQ(r.value, Rational(10));
  const auto fixed = A(env, M({{"1", "1"}, {"1", "1"}}), M({{"10", "10"}, {"10", "10"}}));
  EXPECT_EQ(seller_payoffs(env, fixed)[0] / 2 + seller_payoffs(env, fixed)[1] / 2, r.value);
}

TEST(ExAnte, MotivatingValueAndConstruction) {
  const auto env = load("motivating");
  EXPECT_EQ(solve_ex_ante_optimal(env).value, Rational(250));
  const auto g = construct_ex_ante_from_full_info(env, solve_full_information(env));
  EXPECT_EQ(g.q(), M({{"1", "1"}, {"1", "1"}}));
  EXPECT_EQ(g.t(), M({{"250", "250"}, {"250", "250"}}));
}

TEST(ExAnte, DirectAndReducedFormulationsAgree) {
  for (const char* name : {"motivating", "example1", "b2", "b3", "one_type_seller"}) {
    const auto env = load(name);
    for (bool iir : {false, true}) {
      ExAnteOptions reduced, direct;
      reduced.seller_iir = direct.seller_iir = iir;
      direct.formulation = Formulation::Direct;
      EXPECT_EQ(solve_ex_ante_optimal(env, reduced).value, solve_ex_ante_optimal(env, direct).value)
          << name << " iir=" << iir;
    }
  }
}

TEST(ExAnte, Example4ConstructionHypothesisFails) {
  const auto env = load("example4");
  try {
    construct_ex_ante_from_full_info(env, solve_full_information(env));
    FAIL() << "expected MonotonicityHypothesisFails";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.code(), "MonotonicityHypothesisFails");
  }
}

TEST(Comparison, ExamplesPassEveryCheck) {
  for (const char* name : {"motivating", "example1", "b2", "b3", "one_type_seller"}) {
    const auto r = payoff_comparison_report(load(name));
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << name << ": " << c.name << " " << c.detail;
  }
}

TEST(Comparison, Example3UndersupplyIsStrictSomewhere) {
  const auto r = payoff_comparison_report(load("example3"));
  EXPECT_TRUE(r.all_passed());
  EXPECT_TRUE(r.regular);
  EXPECT_GE(r.strict_undersupply_cells, 1);
  ASSERT_TRUE(r.almost_fixed_prices.has_value());
}

TEST(Comparison, SkewedPriorRanking) {
  const auto r = payoff_comparison_report(load("b3"));
  EXPECT_EQ(r.exante_rsw, Rational(230));
  EXPECT_EQ(r.exante_optimal, Rational(250));
  EXPECT_EQ(r.exante_full_info, Rational(250));
  EXPECT_EQ(r.undersupply, M({{"0", "0"}, {"4/5", "0"}}));
}
