#include <gtest/gtest.h>

#include "ipbt/benchmarks.hpp"
#include "ipbt/refine.hpp"
#include "ipbt/rsw.hpp"
#include "random_env.hpp"

using namespace ipbt;
using namespace ipbt::testing;

// Fuzzing over small random environments. The acceptance binary runs the
// larger sweep; these keep the unit suite fast.

TEST(Properties, RelaxedProblemCertificate) {
  Rng rng(101);
  for (int i = 0; i < 40; ++i) {
    const auto env = random_environment(rng);
    const auto r = solve_rsw(env);
    const auto dq = derive(env);
    Rational total(0);
    for (const auto& w : r.certificate.pi1) {
      ASSERT_GE(w, Rational(0));
      total += w;
    }
    ASSERT_EQ(total, Rational(1));
    for (int x = 0; x < env.x_size(); ++x) {
      for (int y = 0; y < env.y_size(); ++y) {
        ASSERT_EQ(r.certificate.lambda(x, y), r.certificate.pi1[x] * (Rational(1) - dq.P2[y]));
      }
    }
    ASSERT_TRUE(verify_reduced_surplus_optimality(env, r.allocation, r.certificate).empty());
    const auto rep = check_constraints(env, r.allocation, Belief::prior(env));
    ASSERT_TRUE(rep.seller_bic_ok);
    ASSERT_TRUE(rep.buyer_epic_ok);
    ASSERT_TRUE(rep.buyer_epir_ok);
  }
}

TEST(Properties, WeightedResolveKeepsPayoffs) {
  Rng rng(202);
  for (int i = 0; i < 30; ++i) {
    const auto env = random_environment(rng, 3, 3);
    const auto r = solve_rsw(env);
    RationalVector w(env.x_size());
    for (auto& v : w) v = small_rational(rng, 1, 4);
    ASSERT_EQ(solve_rsw_weighted(env, w), r.seller_payoffs) << i;
  }
}

TEST(Properties, ComparisonInequalities) {
  Rng rng(303);
  for (int i = 0; i < 30; ++i) {
    const auto env = random_environment(rng, 3, 4);
    const auto r = payoff_comparison_report(env);
    for (const auto& c : r.checks) ASSERT_TRUE(c.passed) << i << ": " << c.name << " " << c.detail;
    ASSERT_LE(r.exante_rsw, r.exante_optimal);
    ASSERT_LE(r.exante_optimal, r.exante_full_info);
  }
}

TEST(Properties, PayoffEquivalentTransform) {
  Rng rng(404);
  int transformed = 0;
  for (int i = 0; i < 30; ++i) {
    const auto env = random_environment(rng, 3, 3);
    const auto prior = Belief::prior(env);
    const auto g = random_feasible_allocation(env, rng);
    const auto r = epic_equivalent(env, g);
    ASSERT_EQ(seller_payoffs(env, r.allocation), seller_payoffs(env, g)) << i;
    ASSERT_EQ(buyer_interim_payoffs(env, r.allocation, prior), buyer_interim_payoffs(env, g, prior));
    ASSERT_TRUE(check_constraints(env, r.allocation, prior).buyer_epic_ok);
    const auto& q = r.allocation.q();
    for (int x = 0; x < env.x_size(); ++x) {
      for (int y = 0; y < env.y_size(); ++y) {
        if (y > 0) ASSERT_LE(q(x, y - 1), q(x, y));
        if (x > 0) ASSERT_GE(q(x - 1, y), q(x, y));
      }
    }
    ++transformed;
  }
  EXPECT_EQ(transformed, 30);
}
