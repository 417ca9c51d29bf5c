#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ipbt/environment.hpp"
#include "ipbt/lp.hpp"
#include "ipbt/rsw.hpp"

namespace ipbt {

/// Optimal fixed-price menu of a seller type whose type is public.
/// threshold == y_size + 1 means no trade; then there is no price.
struct FixedPriceMenu {
  int threshold = 0;
  std::optional<Rational> price;
};

struct FullInfoResult {
  Allocation allocation;
  std::vector<FixedPriceMenu> menus;
  RationalVector seller_payoffs;
};

/// Per seller type, the maximal optimal threshold rule for sum_y p2(y) VS(x, y) q(y)
/// with price v21(x) + v22(threshold).
FullInfoResult solve_full_information(const Environment& env);

enum class Formulation {
  Reduced,  // threshold mixtures with binding buyer constraints
  Direct,   // all (q, t) variables with every constraint written out
};

struct ExAnteOptions {
  bool seller_iir = false;
  Formulation formulation = Formulation::Reduced;
  LpOptions lp;
};

struct ExAnteResult {
  Allocation allocation;
  RationalVector seller_payoffs;
  Rational value;  // E_x U1
};

/// max E_x U1 subject to seller interim incentive compatibility and buyer interim
/// incentive compatibility and participation under the prior (optionally also
/// seller interim participation).
ExAnteResult solve_ex_ante_optimal(const Environment& env, const ExAnteOptions& options = {});

/// Builds an ex-ante optimal allocation that trades like the full-information
/// benchmark. Throws PreconditionError("MonotonicityHypothesisFails") unless the
/// benchmark's interim trade probability is decreasing in x.
Allocation construct_ex_ante_from_full_info(const Environment& env, const FullInfoResult& full);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ComparisonReport {
  RswResult rsw;
  FullInfoResult full_info;
  Allocation efficient;
  ExAnteResult ex_ante;
  std::optional<Allocation> ex_ante_from_full_info;  // when the hypothesis holds
  RationalMatrix undersupply;         // q_full - q_rsw
  int strict_undersupply_cells = 0;
  RationalMatrix full_info_vs_efficient;  // q_efficient - q_full
  bool phi_increasing = false;
  RationalMatrix buyer_gap;           // u2_full - u2_rsw
  Rational exante_rsw, exante_optimal, exante_full_info;
  bool regular = false;
  std::optional<std::vector<AlmostFixedPrice>> almost_fixed_prices;
  std::vector<PropertyCheck> checks;

  bool all_passed() const;
};

ComparisonReport payoff_comparison_report(const Environment& env, const LpOptions& lp = {});

}  // namespace ipbt
