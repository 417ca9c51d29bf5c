#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ipbt/rational.hpp"

namespace ipbt {

// ---------------------------------------------------------------------------
// Exact linear programming

enum class ObjectiveSense { Maximize, Minimize };
enum class RowSense { LessEqual, GreaterEqual, Equal };
enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpTerm {
  int var;
  Rational coef;
};

struct LpRow {
  std::vector<LpTerm> terms;
  RowSense sense;
  Rational rhs;
  std::string name;
};

struct LpVariable {
  std::optional<Rational> lower;  // nullopt: unbounded below
  std::optional<Rational> upper;  // nullopt: unbounded above
  Rational objective;
  std::string name;
};

class LpProblem {
 public:
  explicit LpProblem(ObjectiveSense sense = ObjectiveSense::Maximize) : sense_(sense) {}

  /// Adds a variable with bounds [lower, upper]; defaults to x >= 0.
  int add_variable(std::string name, Rational objective = Rational(0),
                   std::optional<Rational> lower = Rational(0),
                   std::optional<Rational> upper = std::nullopt);
  int add_free_variable(std::string name, Rational objective = Rational(0));
  int add_row(std::vector<LpTerm> terms, RowSense sense, Rational rhs, std::string name = {});
  /// Adds `terms` to the objective coefficients.
  void add_objective(const std::vector<LpTerm>& terms);

  ObjectiveSense sense() const { return sense_; }
  const std::vector<LpVariable>& variables() const { return vars_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

 private:
  ObjectiveSense sense_;
  std::vector<LpVariable> vars_;
  std::vector<LpRow> rows_;
};

enum class PivotKernel { Auto, Serial, Parallel };

struct LpOptions {
  PivotKernel kernel = PivotKernel::Auto;
  /// Overrides the default ceiling of kPivotCeilingFactor * (rows + cols)^2.
  std::optional<std::int64_t> pivot_limit;
  /// When set, every tableau is written here in plain text.
  std::ostream* trace = nullptr;
};

/// Default pivot ceiling is this factor times (rows + cols)^2 of the standard form.
inline constexpr std::int64_t kPivotCeilingFactor = 2;

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  RationalVector x;           // per problem variable
  Rational objective;
  /// Shadow prices d(opt)/d(rhs) per row: for maximization >= 0 on <= rows and
  /// <= 0 on >= rows; reversed for minimization.
  RationalVector duals;
  RationalVector reduced_costs;  // c_j - duals . A_j
  std::vector<int> basis;        // standard-form column index per tableau row
  std::int64_t pivots = 0;
  int standard_rows = 0;
  int standard_cols = 0;
};

/// Two-phase primal simplex on a dense exact tableau. Dantzig pricing with a
/// switch to Bland's rule after any degenerate pivot, so the method terminates.
/// Deterministic. Throws VerificationError("PivotLimit") past the ceiling.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

/// Exact optimality check of an Optimal solution: primal feasibility, dual sign
/// conditions, reduced-cost signs and complementary slackness. Returns the
/// violated conditions; empty means certified.
std::vector<std::string> verify_lp_optimality(const LpProblem& problem, const LpSolution& s);

/// Effective pivot ceiling for a standard form of the given size.
std::int64_t pivot_ceiling(int standard_rows, int standard_cols, const LpOptions& options);

namespace detail {

/// Dense tableau: (rows + 1) x (cols + 1), row `rows` is the objective, column
/// `cols` the right-hand side.
struct Tableau {
  int rows = 0;
  int cols = 0;
  std::vector<Rational> a;
  Rational& at(int r, int c) { return a[static_cast<std::size_t>(r) * (cols + 1) + c]; }
  const Rational& at(int r, int c) const {
    return a[static_cast<std::size_t>(r) * (cols + 1) + c];
  }
};

/// Gauss-Jordan pivot on (r, c); serial reference implementation.
void pivot_serial(Tableau& t, int r, int c);
/// Same update with rows distributed over OpenMP threads.
void pivot_parallel(Tableau& t, int r, int c);

}  // namespace detail

// ---------------------------------------------------------------------------
// Monotone linear maximization

struct MonotoneLinearResult {
  Rational value;
  /// Smallest optimal threshold k in 1..n+1: rule(y) = 1 iff y >= k.
  int threshold = 0;
  RationalVector rule;  // the maximal optimal rule, 0/1 entries
};

/// max sum_y weights(y) c(y) q(y) over increasing q in [0,1]^n. The optimum is
/// attained by a threshold rule; the maximal one (smallest threshold) is returned.
MonotoneLinearResult maximize_monotone_linear(const RationalVector& c,
                                              const RationalVector& weights);

// ---------------------------------------------------------------------------
// Quadratic transport projection

/// min sum_{x,y} row_weight(x) col_weight(y) q(x,y)^2 subject to
///   sum_y col_weight(y) q(x,y) = row_target(x)   for every x,
///   sum_x row_weight(x) q(x,y) = col_target(y)   for every y,
///   0 <= q <= 1.
/// Column weights must be positive; row weights nonnegative.
struct QuadTransportProblem {
  RationalVector row_weight;
  RationalVector col_weight;
  RationalVector row_target;
  RationalVector col_target;
};

struct QuadTransportSolution {
  RationalMatrix q;
  /// Potentials with q(x,y) = clamp(a(x) + b(y), 0, 1) on positive-weight rows.
  RationalVector a;
  RationalVector b;
  int iterations = 0;
};

/// Exact primal active-set method. Starts from `start` when given (it must
/// satisfy the constraints), otherwise from a max-flow feasible point. Rows of
/// zero weight do not enter the objective or the column constraints; they are
/// filled as clamp(a(x) + b(y)), the limit of a vanishing positive weight.
/// Throws PreconditionError("InfeasibleMarginals") when no feasible q exists.
QuadTransportSolution solve_quad_transport(const QuadTransportProblem& problem,
                                           const std::optional<RationalMatrix>& start = {});

/// Exact KKT check of a solution; returns violated conditions.
std::vector<std::string> verify_quad_transport(const QuadTransportProblem& problem,
                                               const QuadTransportSolution& s);

}  // namespace ipbt
