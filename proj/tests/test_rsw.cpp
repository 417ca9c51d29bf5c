#include <gtest/gtest.h>

#include <algorithm>

#include "ipbt/errors.hpp"
#include "ipbt/refine.hpp"
#include "ipbt/rsw.hpp"
#include "test_support.hpp"

using namespace ipbt;
using namespace ipbt::testing;

TEST(Rsw, MotivatingExampleAllocation) {
  const auto r = solve_rsw(load("motivating"));
  EXPECT_EQ(r.allocation.q(), M({{"1", "1"}, {"0", "2/3"}}));
  EXPECT_EQ(r.allocation.t(), M({{"200", "200"}, {"0", "800/3"}}));
  EXPECT_EQ(r.seller_payoffs, V({"200", "800/3"}));
  EXPECT_EQ(r.objective, R("700/3"));
}

TEST(Rsw, CertificateOfMotivatingExample) {
  const auto env = load("motivating");
  const auto r = solve_rsw(env);
  const auto& c = r.certificate;
  EXPECT_EQ(c.kappa, V({"0", "1/3", "0"}));
  EXPECT_EQ(c.pi1, V({"5/6", "1/6"}));
  EXPECT_EQ(c.lambda, M({{"5/6", "5/12"}, {"1/6", "1/12"}}));
  EXPECT_TRUE(verify_reduced_surplus_optimality(env, r.allocation, c).empty());
  // The relaxed-problem allocation is undominated under its supporting belief.
  EXPECT_TRUE(undominated_given(env, r.allocation, Belief::make(env, c.pi1)).undominated);
}

TEST(Rsw, Example1UniqueAllocation) {
  const auto r = solve_rsw(load("example1"));
  EXPECT_EQ(r.allocation.q(), M({{"1", "1"}, {"1/5", "1/5"}}));
  EXPECT_EQ(r.allocation.t(), M({{"7", "7"}, {"13/5", "13/5"}}));
  EXPECT_EQ(r.seller_payoffs, V({"7", "39/5"}));
}

TEST(Rsw, SkewedBuyerPrior) {
  const auto r = solve_rsw(load("b3"));
  EXPECT_EQ(r.allocation.q()(1, 0), R("1/5"));
  EXPECT_EQ(r.allocation.q()(1, 1), R("1"));
  EXPECT_EQ(r.allocation.t()(1, 0), R("60"));
  EXPECT_EQ(r.allocation.t()(1, 1), R("380"));
  EXPECT_EQ(r.seller_payoffs, V({"200", "260"}));
}

TEST(Rsw, Example4HasNoTrade) {
  const auto env = load("example4");
  EXPECT_EQ(solve_rsw(env).allocation, Allocation::no_trade(env));
}

TEST(Rsw, OneTypeSellerGetsTheFullInformationMenu) {
  const auto env = load("one_type_seller");
  const auto r = solve_rsw(env);
  EXPECT_EQ(r.allocation.q(), M({{"0", "1", "1"}}));
  EXPECT_EQ(r.allocation.t(), M({{"0", "25", "25"}}));
}

TEST(Rsw, WeightedObjectiveAndPerTypeMaximaAgree) {
  for (const char* name : {"motivating", "example1", "b2", "b3"}) {
    const auto env = load(name);
    const auto r = solve_rsw(env);
    EXPECT_EQ(solve_rsw_weighted(env, V({"1", "3"})), r.seller_payoffs) << name;
    EXPECT_EQ(rsw_per_type_crosscheck(env), r.seller_payoffs) << name;
  }
  EXPECT_THROW(solve_rsw_weighted(load("motivating"), V({"1", "0"})), InputError);
}

TEST(AlmostFixedPrices, MotivatingMenus) {
  const auto env = load("motivating");
  const auto menus = extract_almost_fixed_prices(env, solve_rsw(env).allocation);
  ASSERT_EQ(menus.size(), 2u);
  EXPECT_EQ(menus[0].threshold, 1);
  EXPECT_EQ(menus[0].interior_q, Rational(1));
  EXPECT_EQ(*menus[0].price, Rational(200));
  EXPECT_EQ(menus[1].threshold, 2);
  EXPECT_EQ(menus[1].interior_q, R("2/3"));
  EXPECT_EQ(menus[1].interior_t, R("800/3"));
  EXPECT_FALSE(menus[1].price.has_value());
}

TEST(AlmostFixedPrices, RegularityViolationIsReported) {
  const auto env = load("example1");
  try {
    extract_almost_fixed_prices(env, solve_rsw(env).allocation);
    FAIL() << "expected RegularityViolated";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.code(), "RegularityViolated");
    EXPECT_NE(std::string(e.what()).find("y=1 to y=2"), std::string::npos);
  }
}

TEST(AlmostFixedPrices, Example3MenusAreAlmostFixed) {
  const auto env = load("example3");
  const auto r = solve_rsw(env);
  const auto menus = extract_almost_fixed_prices(env, r.allocation);
  ASSERT_EQ(menus.size(), 25u);
  // Trade starts no earlier than under full information, whose threshold is 13 - x.
  for (int x = 1; x <= 25; ++x) EXPECT_GE(menus[x - 1].threshold, std::max(13 - x, 1)) << x;
}
