#pragma once

// Slack-maximization LP shared by the dominance, core and spot checks.

#include <optional>
#include <vector>

#include "ipbt/benchmarks.hpp"
#include "ipbt/environment.hpp"
#include "ipbt/lp.hpp"

namespace ipbt::detail {

enum class Role {
  Improve,  // U1'(x) >= base(x) + s
  Capped,   // U1'(x) <= base(x)
  Floor,    // U1'(x) >= base(x)
  Free,
};

struct ImprovementSpec {
  RationalVector base;
  std::vector<Role> roles;
  /// One slack for every improving type instead of one each.
  bool shared_slack = false;
  std::optional<Rational> slack_cap;
  /// The allocation must be feasible under each belief. Reduced needs exactly one.
  std::vector<RationalVector> beliefs;
  Formulation formulation = Formulation::Reduced;
};

struct ImprovementOutcome {
  Rational gain;  // optimal total slack; zero when the LP is infeasible
  std::optional<Allocation> witness;
};

/// Maximizes the slack. The witness is re-checked against every belief and bound.
ImprovementOutcome solve_improvement(const Environment& env, const ImprovementSpec& spec,
                                     const LpOptions& options);

}  // namespace ipbt::detail
