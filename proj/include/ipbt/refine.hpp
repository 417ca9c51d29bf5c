#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ipbt/benchmarks.hpp"
#include "ipbt/environment.hpp"
#include "ipbt/lp.hpp"
#include "ipbt/rsw.hpp"

namespace ipbt {

// ---------------------------------------------------------------------------
// Ex post incentive compatible equivalents

enum class EpicVariant {
  /// Preserves every interim payoff; buyer payments use the recovered
  /// valuations alpha(y).
  PreserveBuyer,
  /// Preserves seller payoffs; local downward ex post constraints bind.
  Binding,
};

struct EpicResult {
  Allocation allocation;
  /// alpha(1..y_size) followed by alpha(y_size + 1) = 0. Binding variant: v22 then 0.
  RationalVector alpha;
  QuadTransportSolution transport;
  EpicVariant variant = EpicVariant::PreserveBuyer;
};

/// Requires seller interim incentive compatibility and buyer interim incentive
/// compatibility under the prior (plus buyer interim participation for the
/// binding variant); otherwise throws PreconditionError("NotBayesIncentiveCompatible").
/// The trade rule is the quadratic transport projection of g's interim rules.
EpicResult epic_equivalent(const Environment& env, const Allocation& g,
                           EpicVariant variant = EpicVariant::PreserveBuyer);

// ---------------------------------------------------------------------------
// Dominance and refinements

struct DominanceResult {
  bool undominated = true;
  std::optional<Allocation> dominating;  // witness when dominated
  Rational gain;                         // optimal sum of payoff improvements
};

/// Whether some allocation that is feasible under `belief` (seller interim
/// constraints, buyer interim constraints under the belief) gives every seller
/// type at least U1^g and some type strictly more.
DominanceResult undominated_given(const Environment& env, const Allocation& g,
                                  const Belief& belief,
                                  Formulation formulation = Formulation::Reduced,
                                  const LpOptions& lp = {});

struct StrongSolutionResult {
  bool strong = false;
  RswResult rsw;
  std::optional<Allocation> dominating;
};

/// The relaxed-problem allocation is a strong solution iff it is undominated under the prior.
StrongSolutionResult check_strong_solution(const Environment& env, const LpOptions& lp = {});

struct CoreOptions {
  bool parallel = true;
  LpOptions lp;
};

struct CoreResult {
  bool in_core = true;
  std::vector<int> blocking_coalition;   // seller types, 1-based
  std::optional<Allocation> blocking_allocation;
  int coalitions_checked = 0;
};

/// Largest supported x_size for coalition enumeration.
inline constexpr int kMaxCoreTypes = 6;

/// Checks every nonempty coalition Z: is there an allocation giving Z strictly
/// more, nobody outside Z more, and feasible under the prior conditioned on
/// every superset of Z? Requires g feasible (PreconditionError("InfeasibleInput")).
CoreResult check_core(const Environment& env, const Allocation& g, const CoreOptions& options = {});

/// A belief support for which the spot check found an improving allocation.
struct SpotCheckHit {
  std::vector<int> support;  // seller types, 1-based
  Rational gain;
};

struct FgpResult {
  bool exists = false;
  std::optional<Allocation> allocation;  // the relaxed-problem allocation when it exists
  std::vector<SpotCheckHit> spot_check_hits;
  bool corroborated = false;
};

/// Exists iff the relaxed-problem allocation is undominated under the prior.
/// Corroborated by searching, for the prior conditioned on each subset S, for an
/// allocation that improves types in S and no type outside S.
FgpResult check_fgp_exists(const Environment& env, const LpOptions& lp = {});

struct SnpResult {
  bool exists = false;
  std::optional<Allocation> allocation;
  std::vector<int> payoff_gap_types;  // 1-based types with U1 below full information
  std::vector<SpotCheckHit> spot_check_hits;
  bool corroborated = false;
};

/// Exists iff the relaxed-problem payoffs equal the full-information payoffs.
/// Corroborated by searching, for the uniform belief on each subset S, for an
/// allocation that weakly improves every type in S and strictly improves one.
SnpResult check_snp_exists(const Environment& env, const LpOptions& lp = {});

/// Largest x_size for which the spot checks enumerate every subset; above it
/// only singletons and the full set are tried.
inline constexpr int kMaxSpotCheckTypes = 8;

// ---------------------------------------------------------------------------
// Seller payoff set (two seller types)

struct PayoffVertex {
  Rational u1;
  Rational u2;
  Allocation witness;
};

/// a u1 + b u2 <= c with (a, b) coprime integers.
struct PayoffFacet {
  Rational a;
  Rational b;
  Rational c;
  RationalVector duals;  // optimal duals of the support LP in direction (a, b)
};

struct PayoffPolygon {
  std::vector<PayoffVertex> vertices;  // counter-clockwise from the lowest u1 (then u2)
  /// With three or more vertices facets[i] joins vertices[i] and vertices[i + 1]
  /// (cyclically). A segment has four facets (two opposite normals and two end
  /// caps) and a point has the four axis facets.
  std::vector<PayoffFacet> facets;
  int support_solves = 0;
};

/// Seller payoff vectors of prior-feasible allocations that weakly improve on
/// the relaxed-problem payoffs, computed exactly by support-function refinement.
/// Requires x_size == 2 (PreconditionError("UnsupportedDimension")).
PayoffPolygon seller_payoff_set(const Environment& env, const LpOptions& lp = {});

}  // namespace ipbt
