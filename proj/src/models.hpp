#pragma once

// LP formulations shared by the solvers. Indices are 0-based throughout.

#include <vector>

#include "ipbt/environment.hpp"
#include "ipbt/lp.hpp"

namespace ipbt::models {

/// A linear expression: sum of terms plus a constant.
struct Affine {
  std::vector<LpTerm> terms;
  Rational constant;

  Affine& add(const Affine& o, const Rational& scale = Rational(1));
};

void add_constraint(LpProblem& lp, const Affine& lhs, RowSense sense, const Rational& rhs,
                    std::string name);

/// Allocations with increasing rows, written as mixtures of threshold rules,
/// whose local downward ex post buyer constraints bind and whose lowest buyer
/// type receives the rebate r(x) = u2(x, 1). U1(x) is then linear in (mu, r).
class ReducedModel {
 public:
  enum class Rebate { NonNegative, Free };

  ReducedModel(const Environment& env, LpProblem& lp, Rebate rebate);

  /// sum_k mu(x, k) <= 1 for every x.
  void add_convexity_rows();
  /// U1(x) >= U1(x + 1 | x); returns the row index per x.
  std::vector<int> add_upward_bic_rows();
  /// U1(x + 1) >= U1(x | x + 1).
  void add_downward_bic_rows();
  /// U1(x) >= v11(x) + E v12.
  void add_seller_iir_rows();
  /// sum_x belief(x) r(x) >= 0.
  void add_buyer_iir_row(const RationalVector& belief);

  Affine seller_payoff(int x) const;  // U1(x)
  Affine trade_probability(int x) const;  // Q1(x)
  int rebate_var(int x) const { return rebate_[x]; }

  Allocation reconstruct(const RationalVector& solution) const;

 private:
  const Environment& env_;
  DerivedQuantities dq_;
  LpProblem& lp_;
  std::vector<std::vector<int>> mu_;  // [x][k - 1], k = 1..Y
  std::vector<int> rebate_;
  RationalMatrix surplus_;  // A(x, k) = sum_{y >= k} p2(y) VS(x, y)
};

/// Direct formulation over (q, t) with q in [0, 1] and t free.
class DirectModel {
 public:
  DirectModel(const Environment& env, LpProblem& lp);

  Affine seller_deviation(int report, int truth) const;  // U1(report | truth)
  Affine seller_payoff(int x) const { return seller_deviation(x, x); }
  Affine buyer_expost(int report, int x, int y) const;   // u2(report | x, y)

  void add_seller_bic_rows();
  void add_seller_iir_rows();
  void add_buyer_bic_rows(const RationalVector& belief, const std::string& tag);
  void add_buyer_iir_rows(const RationalVector& belief, const std::string& tag);
  void add_epic_rows();
  void add_epir_rows();

  Allocation reconstruct(const RationalVector& solution) const;

 private:
  const Environment& env_;
  LpProblem& lp_;
  Rational mean_v12_;
  std::vector<std::vector<int>> q_, t_;
};

}  // namespace ipbt::models
