#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ipbt/rational.hpp"

namespace ipbt {

/// Seller type in 1..x_size.
struct SellerType {
  int value;
};

/// Buyer type in 1..y_size.
struct BuyerType {
  int value;
};

/// Raw environment fields before validation. Vectors are indexed by type - 1.
struct EnvironmentData {
  int x_size = 0;
  int y_size = 0;
  RationalVector p1, p2;
  RationalVector v11, v12;  // seller value of the good: v11(x) + v12(y)
  RationalVector v21, v22;  // buyer value of the good: v21(x) + v22(y)
};

/// Validated bilateral-trade environment with full-support priors and
/// monotone valuations (v11, v22 strictly increasing; v12, v21 weakly).
class Environment {
 public:
  /// Throws InputError("InvalidEnvironment") naming the first violated invariant.
  static Environment build(EnvironmentData data);

  int x_size() const { return d_.x_size; }
  int y_size() const { return d_.y_size; }
  const RationalVector& p1() const { return d_.p1; }
  const RationalVector& p2() const { return d_.p2; }
  const RationalVector& v11() const { return d_.v11; }
  const RationalVector& v12() const { return d_.v12; }
  const RationalVector& v21() const { return d_.v21; }
  const RationalVector& v22() const { return d_.v22; }
  const EnvironmentData& data() const { return d_; }

 private:
  explicit Environment(EnvironmentData d) : d_(std::move(d)) {}
  EnvironmentData d_;
};

/// Quantities derived from an environment. All vectors are 0-based:
/// entry i refers to type i + 1, except `P2`, where P2[y] = Pr(buyer <= y), P2[0] = 0.
struct DerivedQuantities {
  RationalVector psi;     // v21 - v11
  RationalVector phi;     // v22 - v12
  RationalVector dv1;     // v11(x) - v11(x-1), dv1[0] = 0
  RationalVector dv2;     // v22(y+1) - v22(y), dv2[y_size-1] = 0
  RationalVector P2;      // size y_size + 1
  RationalVector hazard;  // (1 - P2(y)) / p2(y)
  RationalVector buyer_virtual;  // phi(y) - dv2(y) * hazard(y)
  RationalMatrix virtual_surplus;  // psi(x) + buyer_virtual(y)
  Rational mean_v12;
};

DerivedQuantities derive(const Environment& env);

/// Distribution over seller types; may put zero mass on some types.
class Belief {
 public:
  /// Throws InputError("InvalidBelief") unless nonnegative, summing to one, sized x_size.
  static Belief make(const Environment& env, RationalVector weights);
  static Belief prior(const Environment& env);

  const RationalVector& weights() const { return w_; }
  const Rational& operator[](int i) const { return w_[i]; }
  int size() const { return static_cast<int>(w_.size()); }

 private:
  explicit Belief(RationalVector w) : w_(std::move(w)) {}
  RationalVector w_;
};

/// Direct mechanism: trade probability q and buyer-to-seller payment t per report pair.
class Allocation {
 public:
  /// Throws InputError("InvalidAllocation") on shape mismatch or q outside [0, 1].
  static Allocation make(const Environment& env, RationalMatrix q, RationalMatrix t);
  static Allocation no_trade(const Environment& env);

  const RationalMatrix& q() const { return q_; }
  const RationalMatrix& t() const { return t_; }
  const Rational& q(SellerType x, BuyerType y) const { return q_(x.value - 1, y.value - 1); }
  const Rational& t(SellerType x, BuyerType y) const { return t_(x.value - 1, y.value - 1); }

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  Allocation(RationalMatrix q, RationalMatrix t) : q_(std::move(q)), t_(std::move(t)) {}
  RationalMatrix q_;
  RationalMatrix t_;
};

/// Seller's interim payoff when her type is `truth` and she reports `report`.
Rational seller_interim_payoff(const Environment& env, const Allocation& g, SellerType report,
                               SellerType truth);
/// Buyer's ex post payoff from reporting `report` when the true types are (x, y).
Rational buyer_expost_payoff(const Environment& env, const Allocation& g, BuyerType report,
                             SellerType x, BuyerType y);
/// Buyer's interim payoff under belief `belief` over seller types.
Rational buyer_interim_payoff(const Environment& env, const Allocation& g, BuyerType report,
                              BuyerType y, const Belief& belief);

/// Truthful seller payoff vector U1(x), 0-based.
RationalVector seller_payoffs(const Environment& env, const Allocation& g);
/// Truthful buyer ex post payoffs u2(x, y).
RationalMatrix buyer_expost_payoffs(const Environment& env, const Allocation& g);
/// Truthful buyer interim payoffs U2(y) under `belief`.
RationalVector buyer_interim_payoffs(const Environment& env, const Allocation& g,
                                     const Belief& belief);

struct InterimRules {
  RationalVector Q1;  // E_y q(x, y)
  RationalVector T1;  // E_y t(x, y)
  RationalVector Q2;  // sum_x belief(x) q(x, y)
  RationalVector T2;  // sum_x belief(x) t(x, y)
};

InterimRules interim_rules(const Environment& env, const Allocation& g, const Belief& belief);

/// Constraint slacks (truthful minus deviation payoff) and the derived flags.
/// Buyer BIC/IIR slacks are evaluated under the supplied belief; `feasible`
/// re-evaluates them under the prior.
struct ConstraintReport {
  RationalMatrix seller_bic;           // [x][x_hat]
  RationalVector seller_iir;           // [x]
  RationalMatrix buyer_bic;            // [y][y_hat]
  RationalVector buyer_iir;            // [y]
  std::vector<RationalMatrix> buyer_epic;  // [x](y, y_hat)
  RationalMatrix buyer_epir;           // (x, y)

  bool seller_bic_ok = false;
  bool seller_iir_ok = false;
  bool buyer_bic_ok = false;
  bool buyer_iir_ok = false;
  bool buyer_epic_ok = false;
  bool buyer_epir_ok = false;
  bool belief_feasible = false;  // seller BIC+IIR, buyer BIC+IIR under the belief
  bool feasible = false;         // same under the prior

  /// Human-readable description of the first violated constraint, if any.
  std::vector<std::string> violations;
};

ConstraintReport check_constraints(const Environment& env, const Allocation& g,
                                   const Belief& belief);

enum class Dominance { Dominates, Equal, DominatedBy, Incomparable };

/// Compares seller payoff vectors: `Dominates` means a >= b everywhere, > somewhere.
Dominance dominance(const Environment& env, const Allocation& a, const Allocation& b);
Dominance compare_payoffs(const RationalVector& a, const RationalVector& b);
const char* to_string(Dominance d);

/// q(x, y) = 1 iff psi(x) + phi(y) >= 0, with zero payments.
Allocation efficient_rule(const Environment& env);

/// True iff buyer_virtual is strictly increasing in y.
bool is_regular(const DerivedQuantities& dq);

}  // namespace ipbt
