#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ipbt/environment.hpp"
#include "ipbt/lp.hpp"

namespace ipbt {

/// Multipliers certifying an RSW allocation.
/// kappa has size x_size + 1 with kappa[0] = kappa[x_size] = 0; kappa[x] is the
/// multiplier on the seller's local upward constraint of type x.
/// pi1[x - 1] = p1(x) + kappa[x] - kappa[x - 1] is the supporting belief and
/// lambda(x, y) = pi1(x) (1 - P2(y - 1)) the multiplier on the buyer's local
/// downward ex post constraint (y >= 2) or ex post participation (y = 1).
struct RswCertificate {
  RationalVector kappa;
  RationalVector pi1;
  RationalMatrix lambda;
};

struct RswResult {
  Allocation allocation;
  RswCertificate certificate;
  RationalVector seller_payoffs;
  Rational objective;  // E_x U1
  std::int64_t pivots = 0;
  int lp_rows = 0;
  int lp_cols = 0;
};

struct RswOptions {
  LpOptions lp;
};

/// Solves the relaxed seller problem: seller local upward interim incentive
/// constraints, buyer local downward ex post incentive constraints and the
/// lowest buyer's ex post participation, maximizing E_x U1. The returned
/// allocation and certificate pass every exact post-check or a
/// VerificationError is thrown.
RswResult solve_rsw(const Environment& env, const RswOptions& options = {});

/// Seller payoffs of the relaxed problem with objective sum_x weights(x) U1(x).
RationalVector solve_rsw_weighted(const Environment& env, const RationalVector& weights,
                                  const LpOptions& lp = {});

/// For each type x separately: max U1(x) over allocations that satisfy all
/// seller interim incentive constraints and all buyer ex post incentive and
/// participation constraints. Solved as independent direct LPs over (q, t).
RationalVector rsw_per_type_crosscheck(const Environment& env, const LpOptions& lp = {});

/// Checks that every row q(x, .) maximizes
/// sum_y p2(y) [pi1(x) VS(x, y) - kappa(x - 1) dv1(x)] q(y) over increasing q.
std::vector<std::string> verify_reduced_surplus_optimality(const Environment& env,
                                                           const Allocation& g,
                                                           const RswCertificate& cert);

/// Menu of a seller type: no trade below `threshold`, a lottery
/// (interior_q, interior_t) at it, and trade at `price` above it.
/// threshold == y_size + 1 is the no-trade menu; price is absent when no
/// buyer type lies above the threshold.
struct AlmostFixedPrice {
  int threshold = 0;
  Rational interior_q;
  Rational interior_t;
  std::optional<Rational> price;
};

/// Reads the almost-fixed-price menu of every seller type.
/// Throws PreconditionError("RegularityViolated") when the buyer virtual value
/// is not strictly increasing, VerificationError("PatternViolated") when a
/// menu does not have the almost-fixed-price shape.
std::vector<AlmostFixedPrice> extract_almost_fixed_prices(const Environment& env,
                                                          const Allocation& g);

}  // namespace ipbt
