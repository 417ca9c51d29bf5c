#include <omp.h>

#include <cstdlib>
#include <sstream>

#include "ipbt/errors.hpp"
#include "ipbt/lp.hpp"

namespace ipbt {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

int LpProblem::add_variable(std::string name, Rational objective, std::optional<Rational> lower,
                            std::optional<Rational> upper) {
  vars_.push_back({std::move(lower), std::move(upper), std::move(objective), std::move(name)});
  return static_cast<int>(vars_.size()) - 1;
}

int LpProblem::add_free_variable(std::string name, Rational objective) {
  return add_variable(std::move(name), std::move(objective), std::nullopt, std::nullopt);
}

int LpProblem::add_row(std::vector<LpTerm> terms, RowSense sense, Rational rhs, std::string name) {
  rows_.push_back({std::move(terms), sense, std::move(rhs), std::move(name)});
  return static_cast<int>(rows_.size()) - 1;
}

void LpProblem::add_objective(const std::vector<LpTerm>& terms) {
  for (const auto& t : terms) vars_[t.var].objective += t.coef;
}

std::int64_t pivot_ceiling(int standard_rows, int standard_cols, const LpOptions& options) {
  if (options.pivot_limit) return *options.pivot_limit;
  if (const char* env = std::getenv("TOOLKIT_PIVOT_LIMIT")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  const std::int64_t n = static_cast<std::int64_t>(standard_rows) + standard_cols;
  return kPivotCeilingFactor * n * n;
}

namespace detail {

namespace {

void normalize_pivot_row(Tableau& t, int r, int c, std::vector<int>& nz) {
  const mpq_class piv = t.at(r, c).raw();
  nz.clear();
  for (int j = 0; j <= t.cols; ++j) {
    mpq_class& v = t.at(r, j).raw();
    if (sgn(v) != 0) {
      mpq_div(v.get_mpq_t(), v.get_mpq_t(), piv.get_mpq_t());
      nz.push_back(j);
    }
  }
}

void eliminate_row(Tableau& t, int i, int r, int c, const std::vector<int>& nz, mpq_class& f,
                   mpq_class& tmp) {
  f = t.at(i, c).raw();
  if (sgn(f) == 0) return;
  for (int j : nz) {
    mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), t.at(r, j).raw().get_mpq_t());
    mpq_class& v = t.at(i, j).raw();
    mpq_sub(v.get_mpq_t(), v.get_mpq_t(), tmp.get_mpq_t());
  }
}

}  // namespace

void pivot_serial(Tableau& t, int r, int c) {
  std::vector<int> nz;
  normalize_pivot_row(t, r, c, nz);
  mpq_class f, tmp;
  for (int i = 0; i <= t.rows; ++i) {
    if (i != r) eliminate_row(t, i, r, c, nz, f, tmp);
  }
}

void pivot_parallel(Tableau& t, int r, int c) {
  std::vector<int> nz;
  normalize_pivot_row(t, r, c, nz);
#pragma omp parallel
  {
    mpq_class f, tmp;
#pragma omp for schedule(dynamic, 4)
    for (int i = 0; i <= t.rows; ++i) {
      if (i != r) eliminate_row(t, i, r, c, nz, f, tmp);
    }
  }
}

}  // namespace detail

namespace {

using detail::Tableau;

struct StructuralColumn {
  int var;
  int sign;
};

struct StandardForm {
  std::vector<StructuralColumn> columns;  // structural columns
  std::vector<Rational> shift;            // per problem variable
  int original_rows = 0;
  Tableau tab;
  std::vector<int> unit_col;       // per row: column holding the initial identity
  std::vector<int> row_sign;       // +1, or -1 when the row was negated
  std::vector<bool> artificial;    // per column
  std::vector<int> basis;
  std::vector<Rational> cost;      // phase-two cost per column (internal maximization)
};

void write_tableau(std::ostream& os, const Tableau& t, const std::vector<int>& basis,
                   const char* label, std::int64_t pivot) {
  os << "# " << label << " pivot " << pivot << "\n";
  for (int i = 0; i <= t.rows; ++i) {
    os << (i < t.rows ? "b" + std::to_string(basis[i]) : std::string("obj"));
    for (int j = 0; j <= t.cols; ++j) os << ' ' << t.at(i, j);
    os << '\n';
  }
}

class SimplexRunner {
 public:
  SimplexRunner(StandardForm& sf, const LpOptions& opt) : sf_(sf), opt_(opt) {
    limit_ = pivot_ceiling(sf.tab.rows, sf.tab.cols, opt);
  }

  // Returns false when unbounded.
  bool run(const std::vector<bool>& forbidden, const char* label) {
    Tableau& t = sf_.tab;
    bool bland = false;
    for (;;) {
      const int m = t.rows;
      int enter = -1;
      for (int j = 0; j < t.cols; ++j) {
        if (forbidden[j]) continue;
        const Rational& d = t.at(m, j);
        if (d.sign() <= 0) continue;
        if (enter < 0) {
          enter = j;
          if (bland) break;
        } else if (d > t.at(m, enter)) {
          enter = j;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < m; ++i) {
        const Rational& a = t.at(i, enter);
        if (a.sign() <= 0) continue;
        Rational ratio = t.at(i, t.cols) / a;
        if (leave < 0 || ratio < best || (ratio == best && sf_.basis[i] < sf_.basis[leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (leave < 0) return false;
      bland = best.is_zero();
      pivot(leave, enter);
      if (opt_.trace) write_tableau(*opt_.trace, t, sf_.basis, label, pivots_);
    }
  }

  void pivot(int r, int c) {
    if (++pivots_ > limit_) {
      throw VerificationError("PivotLimit", "simplex exceeded " + std::to_string(limit_) +
                                                " pivots");
    }
    Tableau& t = sf_.tab;
    bool parallel = false;
    switch (opt_.kernel) {
      case PivotKernel::Serial: break;
      case PivotKernel::Parallel: parallel = true; break;
      case PivotKernel::Auto:
        parallel = omp_get_max_threads() > 1 &&
                   static_cast<std::int64_t>(t.rows + 1) * (t.cols + 1) > 40000;
        break;
    }
    if (parallel) {
      detail::pivot_parallel(t, r, c);
    } else {
      detail::pivot_serial(t, r, c);
    }
    sf_.basis[r] = c;
  }

  std::int64_t pivots() const { return pivots_; }

 private:
  StandardForm& sf_;
  const LpOptions& opt_;
  std::int64_t limit_ = 0;
  std::int64_t pivots_ = 0;
};

// Builds the standard form; returns false if some variable has empty bounds.
bool build_standard_form(const LpProblem& p, StandardForm& sf) {
  const int nv = p.num_variables();
  sf.shift.assign(nv, Rational(0));
  std::vector<std::vector<StructuralColumn>> var_cols(nv);
  struct BoundRow {
    int col;
    Rational ub;
  };
  std::vector<BoundRow> bound_rows;
  for (int j = 0; j < nv; ++j) {
    const auto& v = p.variables()[j];
    if (v.lower && v.upper && *v.upper < *v.lower) return false;
    const int col = static_cast<int>(sf.columns.size());
    if (v.lower) {
      sf.shift[j] = *v.lower;
      sf.columns.push_back({j, 1});
      if (v.upper) bound_rows.push_back({col, *v.upper - *v.lower});
    } else if (v.upper) {
      sf.shift[j] = *v.upper;
      sf.columns.push_back({j, -1});
    } else {
      sf.columns.push_back({j, 1});
      sf.columns.push_back({j, -1});
    }
  }
  std::vector<std::vector<int>> cols_of_var(nv);
  for (int c = 0; c < static_cast<int>(sf.columns.size()); ++c) {
    cols_of_var[sf.columns[c].var].push_back(c);
  }

  const int ns = static_cast<int>(sf.columns.size());
  sf.original_rows = p.num_rows();
  const int m = p.num_rows() + static_cast<int>(bound_rows.size());

  // Dense structural coefficients, senses and right-hand sides after shifting.
  std::vector<std::vector<Rational>> coef(m, std::vector<Rational>(ns));
  std::vector<RowSense> sense(m);
  std::vector<Rational> rhs(m);
  for (int i = 0; i < p.num_rows(); ++i) {
    const auto& row = p.rows()[i];
    sense[i] = row.sense;
    rhs[i] = row.rhs;
    for (const auto& term : row.terms) {
      rhs[i] -= term.coef * sf.shift[term.var];
      for (int c : cols_of_var[term.var]) {
        coef[i][c] += sf.columns[c].sign > 0 ? term.coef : -term.coef;
      }
    }
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    const int i = p.num_rows() + static_cast<int>(k);
    sense[i] = RowSense::LessEqual;
    rhs[i] = bound_rows[k].ub;
    coef[i][bound_rows[k].col] = Rational(1);
  }
  sf.row_sign.assign(m, 1);
  for (int i = 0; i < m; ++i) {
    if (rhs[i].sign() < 0) {
      sf.row_sign[i] = -1;
      rhs[i] = -rhs[i];
      for (auto& a : coef[i]) a = -a;
      if (sense[i] == RowSense::LessEqual) {
        sense[i] = RowSense::GreaterEqual;
      } else if (sense[i] == RowSense::GreaterEqual) {
        sense[i] = RowSense::LessEqual;
      }
    }
  }

  int n = ns;
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  for (int i = 0; i < m; ++i) {
    if (sense[i] != RowSense::Equal) slack_col[i] = n++;
  }
  for (int i = 0; i < m; ++i) {
    if (sense[i] != RowSense::LessEqual) art_col[i] = n++;
  }
  sf.tab.rows = m;
  sf.tab.cols = n;
  sf.tab.a.assign(static_cast<std::size_t>(m + 1) * (n + 1), Rational(0));
  sf.artificial.assign(n, false);
  sf.unit_col.assign(m, -1);
  sf.basis.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < ns; ++c) sf.tab.at(i, c) = coef[i][c];
    sf.tab.at(i, n) = rhs[i];
    if (slack_col[i] >= 0) {
      sf.tab.at(i, slack_col[i]) = Rational(sense[i] == RowSense::LessEqual ? 1 : -1);
    }
    if (art_col[i] >= 0) {
      sf.tab.at(i, art_col[i]) = Rational(1);
      sf.artificial[art_col[i]] = true;
      sf.unit_col[i] = art_col[i];
    } else {
      sf.unit_col[i] = slack_col[i];
    }
    sf.basis[i] = sf.unit_col[i];
  }

  const bool maximize = p.sense() == ObjectiveSense::Maximize;
  sf.cost.assign(n, Rational(0));
  for (int c = 0; c < ns; ++c) {
    const auto& col = sf.columns[c];
    Rational cj = p.variables()[col.var].objective;
    if (col.sign < 0) cj = -cj;
    sf.cost[c] = maximize ? cj : -cj;
  }
  return true;
}

void load_objective(StandardForm& sf, const std::vector<Rational>& cost) {
  Tableau& t = sf.tab;
  const int m = t.rows;
  for (int j = 0; j <= t.cols; ++j) {
    Rational d = j < t.cols ? cost[j] : Rational(0);
    for (int i = 0; i < m; ++i) {
      const Rational& cb = cost[sf.basis[i]];
      if (!cb.is_zero() && !t.at(i, j).is_zero()) d -= cb * t.at(i, j);
    }
    t.at(m, j) = std::move(d);
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  LpSolution sol;
  StandardForm sf;
  if (!build_standard_form(problem, sf)) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  Tableau& t = sf.tab;
  sol.standard_rows = t.rows;
  sol.standard_cols = t.cols;
  SimplexRunner runner(sf, options);
  const std::vector<bool> none(t.cols, false);

  bool has_artificial = false;
  for (bool a : sf.artificial) has_artificial = has_artificial || a;
  if (has_artificial) {
    std::vector<Rational> phase1(t.cols, Rational(0));
    for (int j = 0; j < t.cols; ++j) {
      if (sf.artificial[j]) phase1[j] = Rational(-1);
    }
    load_objective(sf, phase1);
    runner.run(none, "phase1");
    if (t.at(t.rows, t.cols).sign() != 0) {
      sol.status = LpStatus::Infeasible;
      sol.pivots = runner.pivots();
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int i = 0; i < t.rows; ++i) {
      if (!sf.artificial[sf.basis[i]]) continue;
      for (int j = 0; j < t.cols; ++j) {
        if (!sf.artificial[j] && !t.at(i, j).is_zero()) {
          runner.pivot(i, j);
          break;
        }
      }
    }
  }

  load_objective(sf, sf.cost);
  if (!runner.run(sf.artificial, "phase2")) {
    sol.status = LpStatus::Unbounded;
    sol.pivots = runner.pivots();
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.pivots = runner.pivots();
  sol.basis = sf.basis;
  std::vector<Rational> col_value(t.cols, Rational(0));
  for (int i = 0; i < t.rows; ++i) col_value[sf.basis[i]] = t.at(i, t.cols);
  const int nv = problem.num_variables();
  sol.x = sf.shift;
  for (int c = 0; c < static_cast<int>(sf.columns.size()); ++c) {
    const auto& col = sf.columns[c];
    if (col.sign > 0) {
      sol.x[col.var] += col_value[c];
    } else {
      sol.x[col.var] -= col_value[c];
    }
  }
  sol.objective = Rational(0);
  for (int j = 0; j < nv; ++j) sol.objective += problem.variables()[j].objective * sol.x[j];

  const bool maximize = problem.sense() == ObjectiveSense::Maximize;
  sol.duals.assign(problem.num_rows(), Rational(0));
  for (int i = 0; i < problem.num_rows(); ++i) {
    // Multiplier of the internal maximization: minus the reduced cost of the
    // column that held the identity for this row.
    Rational u = -t.at(t.rows, sf.unit_col[i]);
    if (sf.row_sign[i] < 0) u = -u;
    sol.duals[i] = maximize ? u : -u;
  }
  sol.reduced_costs.assign(nv, Rational(0));
  for (int j = 0; j < nv; ++j) sol.reduced_costs[j] = problem.variables()[j].objective;
  for (int i = 0; i < problem.num_rows(); ++i) {
    if (sol.duals[i].is_zero()) continue;
    for (const auto& term : problem.rows()[i].terms) {
      sol.reduced_costs[term.var] -= sol.duals[i] * term.coef;
    }
  }
  return sol;
}

std::vector<std::string> verify_lp_optimality(const LpProblem& p, const LpSolution& s) {
  std::vector<std::string> bad;
  if (s.status != LpStatus::Optimal) {
    bad.emplace_back("status is not Optimal");
    return bad;
  }
  const bool maximize = p.sense() == ObjectiveSense::Maximize;
  Rational obj(0);
  for (int j = 0; j < p.num_variables(); ++j) {
    const auto& v = p.variables()[j];
    obj += v.objective * s.x[j];
    const bool at_lower = v.lower && s.x[j] == *v.lower;
    const bool at_upper = v.upper && s.x[j] == *v.upper;
    if ((v.lower && s.x[j] < *v.lower) || (v.upper && s.x[j] > *v.upper)) {
      bad.push_back("variable " + v.name + " violates its bounds");
    }
    // For maximization: d_j <= 0 allowed only at the lower bound, >= 0 only at the upper.
    const int dsign = maximize ? s.reduced_costs[j].sign() : -s.reduced_costs[j].sign();
    if (dsign < 0 && !at_lower) bad.push_back("reduced cost sign of " + v.name);
    if (dsign > 0 && !at_upper) bad.push_back("reduced cost sign of " + v.name);
  }
  if (obj != s.objective) bad.emplace_back("objective mismatch");
  Rational dual_obj(0);
  for (int i = 0; i < p.num_rows(); ++i) {
    const auto& row = p.rows()[i];
    Rational lhs(0);
    for (const auto& term : row.terms) lhs += term.coef * s.x[term.var];
    const Rational slack = lhs - row.rhs;
    const bool ok = row.sense == RowSense::LessEqual      ? slack.sign() <= 0
                    : row.sense == RowSense::GreaterEqual ? slack.sign() >= 0
                                                          : slack.is_zero();
    if (!ok) bad.push_back("row " + std::to_string(i) + " " + row.name + " infeasible");
    const int ysign = maximize ? s.duals[i].sign() : -s.duals[i].sign();
    if (row.sense == RowSense::LessEqual && ysign < 0) {
      bad.push_back("dual sign of row " + std::to_string(i));
    }
    if (row.sense == RowSense::GreaterEqual && ysign > 0) {
      bad.push_back("dual sign of row " + std::to_string(i));
    }
    if (!s.duals[i].is_zero() && !slack.is_zero()) {
      bad.push_back("complementary slackness on row " + std::to_string(i));
    }
    dual_obj += s.duals[i] * row.rhs;
  }
  // Strong duality: c.x = y.b + d.x, with d.x supported on bounds by the checks above.
  for (int j = 0; j < p.num_variables(); ++j) dual_obj += s.reduced_costs[j] * s.x[j];
  if (dual_obj != s.objective) bad.emplace_back("duality gap");
  return bad;
}

}  // namespace ipbt
