#include <gtest/gtest.h>

#include "ipbt/environment.hpp"
#include "ipbt/lp.hpp"
#include "test_support.hpp"

using namespace ipbt;
using namespace ipbt::testing;

TEST(MonotoneLinear, Example3VirtualSurplusRow) {
  const auto env = load("example3");
  const auto r = maximize_monotone_linear(derive(env).virtual_surplus.row(0), env.p2());
  EXPECT_EQ(r.threshold, 12);  // 2 + 2y - 25 >= 0 iff y >= 12
  Rational expected(0);
  for (int y = 12; y <= 25; ++y) expected += Rational(2 * y - 23, 25);
  EXPECT_EQ(r.value, expected);
}

TEST(MonotoneLinear, AllNegativeMeansNoTrade) {
  const auto r = maximize_monotone_linear(V({"-1", "-2", "-1/3"}), V({"1/3", "1/3", "1/3"}));
  EXPECT_EQ(r.threshold, 4);
  EXPECT_EQ(r.value, Rational(0));
  EXPECT_EQ(r.rule, V({"0", "0", "0"}));
}

TEST(MonotoneLinear, TiesPickTheLargestRule) {
  // Suffix sums from k=2 and k=1 are both 1; the maximal rule trades everywhere.
  const auto r = maximize_monotone_linear(V({"0", "1"}), V({"1/2", "1/2"}));
  EXPECT_EQ(r.threshold, 1);
  EXPECT_EQ(r.value, Rational(1, 2));
  EXPECT_EQ(r.rule, V({"1", "1"}));
}

TEST(MonotoneLinear, NonMonotoneCoefficientsUseSuffixSums) {
  // Suffix sums: k=3 -> 2, k=2 -> -1, k=1 -> 0.
  const auto r = maximize_monotone_linear(V({"1", "-3", "2"}), V({"1", "1", "1"}));
  EXPECT_EQ(r.threshold, 3);
  EXPECT_EQ(r.value, Rational(2));
}
