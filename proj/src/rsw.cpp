#include "ipbt/rsw.hpp"

#include <exception>

#include "ipbt/errors.hpp"
#include "models.hpp"

namespace ipbt {

namespace {

using models::ReducedModel;

struct RelaxedSolve {
  Allocation allocation;
  LpSolution lp;
  std::vector<int> bic_rows;
};

RelaxedSolve solve_relaxed(const Environment& env, const RationalVector& weights,
                           const LpOptions& options) {
  LpProblem lp(ObjectiveSense::Maximize);
  ReducedModel model(env, lp, ReducedModel::Rebate::NonNegative);
  model.add_convexity_rows();
  auto bic_rows = model.add_upward_bic_rows();
  for (int x = 0; x < env.x_size(); ++x) {
    std::vector<LpTerm> terms = model.seller_payoff(x).terms;
    for (auto& t : terms) t.coef *= weights[x];
    lp.add_objective(terms);
  }
  LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::Optimal) {
    throw VerificationError("RelaxedProblem", std::string("relaxed LP is ") +
                                                  to_string(sol.status));
  }
  const auto bad = verify_lp_optimality(lp, sol);
  if (!bad.empty()) throw VerificationError("LpCertificate", bad.front());
  Allocation g = model.reconstruct(sol.x);
  return {std::move(g), std::move(sol), std::move(bic_rows)};
}

[[noreturn]] void fail(const std::string& what) { throw VerificationError("RswVerification", what); }

void verify_rsw(const Environment& env, const Allocation& g, const RswCertificate& cert) {
  const int X = env.x_size();
  const int Y = env.y_size();
  const auto rep = check_constraints(env, g, Belief::prior(env));
  if (!rep.seller_bic_ok) fail("seller interim incentive compatibility");
  if (!rep.seller_iir_ok) fail("seller interim participation");
  if (!rep.buyer_epic_ok) fail("buyer ex post incentive compatibility");
  if (!rep.buyer_epir_ok) fail("buyer ex post participation");
  for (int x = 0; x < X; ++x) {
    if (!rep.buyer_epir(x, 0).is_zero()) fail("lowest buyer type keeps a rent");
    for (int y = 1; y < Y; ++y) {
      if (!rep.buyer_epic[x](y, y - 1).is_zero()) fail("local downward constraint slack");
    }
  }
  Rational total(0);
  for (int x = 0; x < X; ++x) {
    if (cert.kappa[x + 1].sign() < 0) fail("negative seller multiplier");
    if (cert.pi1[x].sign() < 0) fail("negative supporting belief");
    total += cert.pi1[x];
    if (x + 1 < X && cert.kappa[x + 1].sign() > 0 && !rep.seller_bic(x, x + 1).is_zero()) {
      fail("complementary slackness on a seller constraint");
    }
    if (cert.pi1[x].is_zero()) {
      for (int y = 0; y < Y; ++y) {
        if (!g.q()(x, y).is_zero() || !g.t()(x, y).is_zero()) {
          fail("type with zero supporting belief trades");
        }
      }
    }
  }
  if (total != Rational(1)) fail("supporting belief does not sum to one");
  const auto bad = verify_reduced_surplus_optimality(env, g, cert);
  if (!bad.empty()) fail(bad.front());
}

}  // namespace

RswResult solve_rsw(const Environment& env, const RswOptions& options) {
  const int X = env.x_size();
  const int Y = env.y_size();
  auto solved = solve_relaxed(env, env.p1(), options.lp);

  RswCertificate cert;
  cert.kappa.assign(X + 1, Rational(0));
  for (int x = 0; x + 1 < X; ++x) cert.kappa[x + 1] = -solved.lp.duals[solved.bic_rows[x]];
  cert.pi1.resize(X);
  for (int x = 0; x < X; ++x) cert.pi1[x] = env.p1()[x] + cert.kappa[x + 1] - cert.kappa[x];
  const auto dq = derive(env);
  cert.lambda = RationalMatrix(X, Y);
  for (int x = 0; x < X; ++x) {
    for (int y = 0; y < Y; ++y) cert.lambda(x, y) = cert.pi1[x] * (Rational(1) - dq.P2[y]);
  }
  verify_rsw(env, solved.allocation, cert);

  RationalVector u = seller_payoffs(env, solved.allocation);
  Rational objective(0);
  for (int x = 0; x < X; ++x) objective += env.p1()[x] * u[x];
  return RswResult{std::move(solved.allocation), std::move(cert), std::move(u),
                   std::move(objective), solved.lp.pivots, solved.lp.standard_rows,
                   solved.lp.standard_cols};
}

RationalVector solve_rsw_weighted(const Environment& env, const RationalVector& weights,
                                  const LpOptions& lp) {
  if (static_cast<int>(weights.size()) != env.x_size()) {
    throw InputError("InvalidWeights", "weights length does not match x_size");
  }
  for (const auto& w : weights) {
    if (w.sign() <= 0) throw InputError("InvalidWeights", "weights must be positive");
  }
  return seller_payoffs(env, solve_relaxed(env, weights, lp).allocation);
}

RationalVector rsw_per_type_crosscheck(const Environment& env, const LpOptions& lp_options) {
  const int X = env.x_size();
  RationalVector out(X);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (int x = 0; x < X; ++x) {
    try {
      LpProblem lp(ObjectiveSense::Maximize);
      models::DirectModel model(env, lp);
      model.add_seller_bic_rows();
      model.add_epic_rows();
      model.add_epir_rows();
      lp.add_objective(model.seller_payoff(x).terms);
      const auto sol = solve_lp(lp, lp_options);
      if (sol.status != LpStatus::Optimal) {
        throw VerificationError("Crosscheck", std::string("per-type LP is ") +
                                                  to_string(sol.status));
      }
      out[x] = seller_payoffs(env, model.reconstruct(sol.x))[x];
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<std::string> verify_reduced_surplus_optimality(const Environment& env,
                                                           const Allocation& g,
                                                           const RswCertificate& cert) {
  std::vector<std::string> bad;
  const auto dq = derive(env);
  for (int x = 0; x < env.x_size(); ++x) {
    RationalVector c(env.y_size());
    Rational achieved(0);
    for (int y = 0; y < env.y_size(); ++y) {
      c[y] = cert.pi1[x] * dq.virtual_surplus(x, y) - cert.kappa[x] * dq.dv1[x];
      achieved += env.p2()[y] * c[y] * g.q()(x, y);
    }
    if (achieved != maximize_monotone_linear(c, env.p2()).value) {
      bad.push_back("row " + std::to_string(x + 1) + " does not maximize the reduced surplus");
    }
  }
  return bad;
}

std::vector<AlmostFixedPrice> extract_almost_fixed_prices(const Environment& env,
                                                          const Allocation& g) {
  const auto dq = derive(env);
  const int Y = env.y_size();
  for (int y = 0; y + 1 < Y; ++y) {
    if (!(dq.buyer_virtual[y] < dq.buyer_virtual[y + 1])) {
      throw PreconditionError("RegularityViolated",
                              "buyer virtual value is not strictly increasing from y=" +
                                  std::to_string(y + 1) + " to y=" + std::to_string(y + 2));
    }
  }
  std::vector<AlmostFixedPrice> menus;
  for (int x = 0; x < env.x_size(); ++x) {
    auto pattern = [&](const std::string& what) {
      throw VerificationError("PatternViolated",
                              "seller type " + std::to_string(x + 1) + ": " + what);
    };
    int k = 0;
    while (k < Y && g.q()(x, k).is_zero()) ++k;
    for (int y = 0; y < k; ++y) {
      if (!g.t()(x, y).is_zero()) pattern("payment without trade below the threshold");
    }
    AlmostFixedPrice m;
    m.threshold = k + 1;
    if (k == Y) {
      m.interior_q = Rational(0);
      m.interior_t = Rational(0);
      menus.push_back(std::move(m));
      continue;
    }
    m.interior_q = g.q()(x, k);
    m.interior_t = g.t()(x, k);
    if (k + 1 < Y) m.price = g.t()(x, k + 1);
    for (int y = k + 1; y < Y; ++y) {
      if (g.q()(x, y) != Rational(1)) pattern("trade is not certain above the threshold");
      if (g.t()(x, y) != *m.price) pattern("price varies above the threshold");
    }
    if (m.price && m.price->sign() < 0) pattern("negative price");
    menus.push_back(std::move(m));
  }
  return menus;
}

}  // namespace ipbt
