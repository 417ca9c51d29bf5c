#include "ipbt/refine.hpp"

#include <exception>

#include "ipbt/errors.hpp"
#include "models.hpp"
#include "refine_internal.hpp"

namespace ipbt {

namespace {

std::vector<int> members(int mask, int n) {
  std::vector<int> out;
  for (int x = 0; x < n; ++x) {
    if (mask & (1 << x)) out.push_back(x + 1);
  }
  return out;
}

RationalVector conditional_prior(const Environment& env, int mask) {
  RationalVector w(env.x_size(), Rational(0));
  Rational mass(0);
  for (int x = 0; x < env.x_size(); ++x) {
    if (mask & (1 << x)) mass += env.p1()[x];
  }
  for (int x = 0; x < env.x_size(); ++x) {
    if (mask & (1 << x)) w[x] = env.p1()[x] / mass;
  }
  return w;
}

RationalVector uniform_on(const Environment& env, int mask) {
  RationalVector w(env.x_size(), Rational(0));
  const Rational share(1, static_cast<long>(members(mask, env.x_size()).size()));
  for (int x = 0; x < env.x_size(); ++x) {
    if (mask & (1 << x)) w[x] = share;
  }
  return w;
}

/// Support masks for the spot checks: all nonempty subsets when small, else
/// singletons and the full set.
std::vector<int> spot_check_masks(int n) {
  std::vector<int> masks;
  const int full = (1 << n) - 1;
  if (n <= kMaxSpotCheckTypes) {
    for (int m = 1; m <= full; ++m) masks.push_back(m);
  } else {
    for (int x = 0; x < n; ++x) masks.push_back(1 << x);
    masks.push_back(full);
  }
  return masks;
}

template <class Fn>
void parallel_over(int n, bool parallel, Fn&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(ipbt_refine_error)
      {
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<SpotCheckHit> spot_check(const Environment& env, const RationalVector& base,
                                     bool cap_outside, bool uniform, const LpOptions& lp) {
  const int X = env.x_size();
  const auto masks = spot_check_masks(X);
  std::vector<std::optional<Rational>> gains(masks.size());
  parallel_over(static_cast<int>(masks.size()), true, [&](int i) {
    const int mask = masks[i];
    detail::ImprovementSpec spec;
    spec.base = base;
    spec.roles.assign(X, detail::Role::Free);
    for (int x = 0; x < X; ++x) {
      if (mask & (1 << x)) {
        spec.roles[x] = detail::Role::Improve;
      } else if (cap_outside) {
        spec.roles[x] = detail::Role::Capped;
      }
    }
    spec.beliefs = {uniform ? uniform_on(env, mask) : conditional_prior(env, mask)};
    const auto out = detail::solve_improvement(env, spec, lp);
    if (out.gain.sign() > 0) gains[i] = out.gain;
  });
  std::vector<SpotCheckHit> hits;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (gains[i]) hits.push_back({members(masks[i], X), *gains[i]});
  }
  return hits;
}

}  // namespace

namespace detail {

ImprovementOutcome solve_improvement(const Environment& env, const ImprovementSpec& spec,
                                     const LpOptions& options) {
  const int X = env.x_size();
  LpProblem lp(ObjectiveSense::Maximize);
  std::optional<models::ReducedModel> reduced;
  std::optional<models::DirectModel> direct;
  if (spec.formulation == Formulation::Reduced) {
    if (spec.beliefs.size() != 1) {
      throw PreconditionError("UnsupportedFormulation",
                              "the reduced formulation handles exactly one belief");
    }
    reduced.emplace(env, lp, models::ReducedModel::Rebate::Free);
    reduced->add_convexity_rows();
    reduced->add_upward_bic_rows();
    reduced->add_downward_bic_rows();
    reduced->add_seller_iir_rows();
    reduced->add_buyer_iir_row(spec.beliefs.front());
  } else {
    direct.emplace(env, lp);
    direct->add_seller_bic_rows();
    direct->add_seller_iir_rows();
    for (std::size_t i = 0; i < spec.beliefs.size(); ++i) {
      const std::string tag = "[" + std::to_string(i) + "]";
      direct->add_buyer_bic_rows(spec.beliefs[i], tag);
      direct->add_buyer_iir_rows(spec.beliefs[i], tag);
    }
  }
  auto payoff = [&](int x) {
    return reduced ? reduced->seller_payoff(x) : direct->seller_payoff(x);
  };

  int shared = -1;
  if (spec.shared_slack) {
    shared = lp.add_variable("s", Rational(1), Rational(0), spec.slack_cap);
  }
  for (int x = 0; x < X; ++x) {
    const std::string name = "(" + std::to_string(x + 1) + ")";
    models::Affine lhs = payoff(x);
    switch (spec.roles[x]) {
      case Role::Improve: {
        const int s = shared >= 0
                          ? shared
                          : lp.add_variable("s" + name, Rational(1), Rational(0), spec.slack_cap);
        lhs.terms.push_back({s, Rational(-1)});
        models::add_constraint(lp, lhs, RowSense::GreaterEqual, spec.base[x], "improve" + name);
        break;
      }
      case Role::Capped:
        models::add_constraint(lp, lhs, RowSense::LessEqual, spec.base[x], "cap" + name);
        break;
      case Role::Floor:
        models::add_constraint(lp, lhs, RowSense::GreaterEqual, spec.base[x], "floor" + name);
        break;
      case Role::Free:
        break;
    }
  }
  const auto sol = solve_lp(lp, options);
  if (sol.status == LpStatus::Infeasible) return {Rational(0), std::nullopt};
  if (sol.status != LpStatus::Optimal) {
    throw VerificationError("ImprovementProblem", std::string("improvement LP is ") +
                                                      to_string(sol.status));
  }
  const auto bad = verify_lp_optimality(lp, sol);
  if (!bad.empty()) throw VerificationError("LpCertificate", bad.front());
  Allocation w = reduced ? reduced->reconstruct(sol.x) : direct->reconstruct(sol.x);

  // Independent check of the witness against the defining conditions.
  for (const auto& b : spec.beliefs) {
    if (!check_constraints(env, w, Belief::make(env, b)).belief_feasible) {
      throw VerificationError("WitnessInfeasible", "improving allocation violates a constraint");
    }
  }
  const auto u = seller_payoffs(env, w);
  for (int x = 0; x < X; ++x) {
    const bool ok = spec.roles[x] == Role::Capped ? u[x] <= spec.base[x]
                    : spec.roles[x] == Role::Free ? true
                                                  : u[x] >= spec.base[x];
    if (!ok) throw VerificationError("WitnessPayoff", "improving allocation misses a payoff bound");
  }
  return {sol.objective, std::move(w)};
}

}  // namespace detail

// ---------------------------------------------------------------------------

EpicResult epic_equivalent(const Environment& env, const Allocation& g, EpicVariant variant) {
  const int X = env.x_size();
  const int Y = env.y_size();
  const auto prior = Belief::prior(env);
  const auto rep = check_constraints(env, g, prior);
  if (!rep.seller_bic_ok || !rep.buyer_bic_ok) {
    throw PreconditionError("NotBayesIncentiveCompatible",
                            rep.violations.empty() ? "" : rep.violations.front());
  }
  if (variant == EpicVariant::Binding && !rep.buyer_iir_ok) {
    throw PreconditionError("NotInterimIndividuallyRational",
                            rep.violations.empty() ? "" : rep.violations.front());
  }
  const auto rules = interim_rules(env, g, prior);
  QuadTransportProblem problem{env.p1(), env.p2(), rules.Q1, rules.Q2};
  auto transport = solve_quad_transport(problem, g.q());
  const RationalMatrix& q = transport.q;

  RationalVector alpha(Y + 1, Rational(0));
  for (int y = 0; y < Y; ++y) alpha[y] = env.v22()[y];
  if (variant == EpicVariant::PreserveBuyer) {
    for (int y = 1; y < Y; ++y) {
      const Rational dQ = rules.Q2[y] - rules.Q2[y - 1];
      if (dQ.is_zero()) continue;
      Rational shift(0);
      for (int x = 0; x < X; ++x) {
        shift += env.p1()[x] * env.v21()[x] * (g.q()(x, y) - g.q()(x, y - 1));
      }
      alpha[y] = (rules.T2[y] - rules.T2[y - 1] - shift) / dQ;
      if (alpha[y] < env.v22()[y - 1] || alpha[y] > env.v22()[y]) {
        throw VerificationError("AlphaOutOfRange",
                                "recovered valuation leaves its bracket at y=" +
                                    std::to_string(y + 1));
      }
    }
  }

  const auto target = seller_payoffs(env, g);
  RationalMatrix t(X, Y);
  for (int x = 0; x < X; ++x) {
    // Payments up to a constant, then the constant that restores U1(x).
    RationalVector rel(Y, Rational(0));
    rel[0] = (env.v21()[x] + alpha[0]) * q(x, 0);
    for (int y = 1; y < Y; ++y) {
      rel[y] = rel[y - 1] + (env.v21()[x] + alpha[y]) * (q(x, y) - q(x, y - 1));
    }
    Rational u(0);
    for (int y = 0; y < Y; ++y) {
      u += env.p2()[y] * (rel[y] + (env.v11()[x] + env.v12()[y]) * (Rational(1) - q(x, y)));
    }
    const Rational c = target[x] - u;
    for (int y = 0; y < Y; ++y) t(x, y) = rel[y] + c;
  }
  Allocation out = Allocation::make(env, q, std::move(t));

  auto fail = [](const std::string& what) { throw VerificationError("EpicEquivalent", what); };
  for (int x = 0; x < X; ++x) {
    for (int y = 1; y < Y; ++y) {
      if (q(x, y) < q(x, y - 1)) fail("transport rule is not increasing in the buyer type");
    }
  }
  const auto after = check_constraints(env, out, prior);
  if (seller_payoffs(env, out) != target) fail("seller payoffs changed");
  if (!after.seller_bic_ok) fail("seller incentive compatibility lost");
  if (!after.buyer_epic_ok) fail("buyer ex post incentive compatibility fails");
  if (variant == EpicVariant::PreserveBuyer) {
    if (buyer_interim_payoffs(env, out, prior) != buyer_interim_payoffs(env, g, prior)) {
      fail("buyer interim payoffs changed");
    }
  } else {
    for (int x = 0; x < X; ++x) {
      for (int y = 1; y < Y; ++y) {
        if (!after.buyer_epic[x](y, y - 1).is_zero()) fail("local downward constraint slack");
      }
    }
    if (after.buyer_iir[0].sign() < 0) fail("lowest buyer type loses participation");
  }
  return {std::move(out), std::move(alpha), std::move(transport), variant};
}

DominanceResult undominated_given(const Environment& env, const Allocation& g,
                                  const Belief& belief, Formulation formulation,
                                  const LpOptions& lp) {
  detail::ImprovementSpec spec;
  spec.base = seller_payoffs(env, g);
  spec.roles.assign(env.x_size(), detail::Role::Improve);
  spec.beliefs = {belief.weights()};
  spec.formulation = formulation;
  auto out = detail::solve_improvement(env, spec, lp);
  DominanceResult r;
  r.gain = out.gain;
  r.undominated = out.gain.is_zero();
  if (!r.undominated) {
    if (compare_payoffs(seller_payoffs(env, *out.witness), spec.base) != Dominance::Dominates) {
      throw VerificationError("WitnessPayoff", "witness does not dominate");
    }
    r.dominating = std::move(out.witness);
  }
  return r;
}

StrongSolutionResult check_strong_solution(const Environment& env, const LpOptions& lp) {
  RswOptions options;
  options.lp = lp;
  StrongSolutionResult r{.rsw = solve_rsw(env, options)};
  auto dom = undominated_given(env, r.rsw.allocation, Belief::prior(env), Formulation::Reduced, lp);
  r.strong = dom.undominated;
  r.dominating = std::move(dom.dominating);
  return r;
}

CoreResult check_core(const Environment& env, const Allocation& g, const CoreOptions& options) {
  const int X = env.x_size();
  if (X > kMaxCoreTypes) {
    throw PreconditionError("UnsupportedDimension",
                            "coalition enumeration supports at most " +
                                std::to_string(kMaxCoreTypes) + " seller types");
  }
  const auto rep = check_constraints(env, g, Belief::prior(env));
  if (!rep.feasible) {
    throw PreconditionError("InfeasibleInput",
                            rep.violations.empty() ? "allocation is not feasible"
                                                   : rep.violations.front());
  }
  const auto base = seller_payoffs(env, g);
  const int full = (1 << X) - 1;
  std::vector<std::optional<Allocation>> blocks(full + 1);
  parallel_over(full, options.parallel, [&](int i) {
    const int mask = i + 1;
    detail::ImprovementSpec spec;
    spec.base = base;
    spec.roles.assign(X, detail::Role::Capped);
    for (int x = 0; x < X; ++x) {
      if (mask & (1 << x)) spec.roles[x] = detail::Role::Improve;
    }
    spec.shared_slack = true;
    spec.slack_cap = Rational(1);
    spec.formulation = Formulation::Direct;
    for (int sup = mask; sup <= full; ++sup) {
      if ((sup & mask) == mask) spec.beliefs.push_back(conditional_prior(env, sup));
    }
    auto out = detail::solve_improvement(env, spec, options.lp);
    if (out.gain.sign() > 0) blocks[mask] = std::move(out.witness);
  });
  CoreResult r;
  r.coalitions_checked = full;
  for (int mask = 1; mask <= full; ++mask) {
    if (blocks[mask]) {
      r.in_core = false;
      r.blocking_coalition = members(mask, X);
      r.blocking_allocation = std::move(blocks[mask]);
      break;
    }
  }
  return r;
}

FgpResult check_fgp_exists(const Environment& env, const LpOptions& lp) {
  auto strong = check_strong_solution(env, lp);
  FgpResult r;
  r.exists = strong.strong;
  r.spot_check_hits = spot_check(env, strong.rsw.seller_payoffs, true, false, lp);
  // Undominated implies no conditional prior admits an improvement; dominated
  // implies the full support does.
  r.corroborated = r.exists == r.spot_check_hits.empty();
  if (r.exists) r.allocation = std::move(strong.rsw.allocation);
  return r;
}

SnpResult check_snp_exists(const Environment& env, const LpOptions& lp) {
  RswOptions options;
  options.lp = lp;
  auto rsw = solve_rsw(env, options);
  const auto full = solve_full_information(env);
  SnpResult r;
  for (int x = 0; x < env.x_size(); ++x) {
    if (rsw.seller_payoffs[x] != full.seller_payoffs[x]) r.payoff_gap_types.push_back(x + 1);
  }
  r.exists = r.payoff_gap_types.empty();
  r.spot_check_hits = spot_check(env, rsw.seller_payoffs, false, true, lp);
  r.corroborated = r.exists == r.spot_check_hits.empty();
  if (r.exists) r.allocation = std::move(rsw.allocation);
  return r;
}

}  // namespace ipbt
