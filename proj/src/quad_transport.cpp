#include <algorithm>
#include <deque>
#include <string>

#include "ipbt/errors.hpp"
#include "ipbt/lp.hpp"

namespace ipbt {

namespace {

Rational clamp01(const Rational& v) {
  if (v.sign() < 0) return Rational(0);
  if (v > Rational(1)) return Rational(1);
  return v;
}

void validate(const QuadTransportProblem& p) {
  const auto X = p.row_weight.size();
  const auto Y = p.col_weight.size();
  if (p.row_target.size() != X || p.col_target.size() != Y || X == 0 || Y == 0) {
    throw InputError("InvalidTransport", "transport problem dimensions disagree");
  }
  for (const auto& w : p.row_weight) {
    if (w.sign() < 0) throw InputError("InvalidTransport", "negative row weight");
  }
  for (const auto& w : p.col_weight) {
    if (w.sign() <= 0) throw InputError("InvalidTransport", "column weights must be positive");
  }
  for (const auto* v : {&p.row_target, &p.col_target}) {
    for (const auto& t : *v) {
      if (t.sign() < 0 || t > Rational(1)) {
        throw PreconditionError("InfeasibleMarginals", "marginal outside [0,1]");
      }
    }
  }
  Rational lhs(0), rhs(0);
  for (std::size_t x = 0; x < X; ++x) lhs += p.row_weight[x] * p.row_target[x];
  for (std::size_t y = 0; y < Y; ++y) rhs += p.col_weight[y] * p.col_target[y];
  if (lhs != rhs) throw PreconditionError("InfeasibleMarginals", "marginal totals differ");
}

bool satisfies_constraints(const QuadTransportProblem& p, const RationalMatrix& q) {
  const int X = static_cast<int>(p.row_weight.size());
  const int Y = static_cast<int>(p.col_weight.size());
  if (q.rows() != X || q.cols() != Y) return false;
  for (int x = 0; x < X; ++x) {
    Rational s(0);
    for (int y = 0; y < Y; ++y) {
      if (q(x, y).sign() < 0 || q(x, y) > Rational(1)) return false;
      s += p.col_weight[y] * q(x, y);
    }
    if (s != p.row_target[x]) return false;
  }
  for (int y = 0; y < Y; ++y) {
    Rational s(0);
    for (int x = 0; x < X; ++x) s += p.row_weight[x] * q(x, y);
    if (s != p.col_target[y]) return false;
  }
  return true;
}

// Edmonds-Karp on the bipartite network source -> rows -> columns -> sink.
RationalMatrix max_flow_start(const QuadTransportProblem& p, const std::vector<int>& rows) {
  const int X = static_cast<int>(p.row_weight.size());
  const int Y = static_cast<int>(p.col_weight.size());
  const int P = static_cast<int>(rows.size());
  const int n = P + Y + 2;
  const int src = P + Y;
  const int snk = P + Y + 1;
  std::vector<std::vector<Rational>> cap(n, std::vector<Rational>(n));
  Rational demand(0);
  for (int i = 0; i < P; ++i) {
    const int x = rows[i];
    cap[src][i] = p.row_weight[x] * p.row_target[x];
    demand += cap[src][i];
    for (int y = 0; y < Y; ++y) cap[i][P + y] = p.row_weight[x] * p.col_weight[y];
  }
  for (int y = 0; y < Y; ++y) cap[P + y][snk] = p.col_weight[y] * p.col_target[y];
  std::vector<std::vector<Rational>> flow(n, std::vector<Rational>(n));
  Rational total(0);
  for (;;) {
    std::vector<int> prev(n, -1);
    prev[src] = src;
    std::deque<int> queue{src};
    while (!queue.empty() && prev[snk] < 0) {
      const int u = queue.front();
      queue.pop_front();
      for (int v = 0; v < n; ++v) {
        if (prev[v] < 0 && cap[u][v] - flow[u][v] > Rational(0)) {
          prev[v] = u;
          queue.push_back(v);
        }
      }
    }
    if (prev[snk] < 0) break;
    Rational push;
    bool first = true;
    for (int v = snk; v != src; v = prev[v]) {
      Rational residual = cap[prev[v]][v] - flow[prev[v]][v];
      if (first || residual < push) push = residual;
      first = false;
    }
    for (int v = snk; v != src; v = prev[v]) {
      flow[prev[v]][v] += push;
      flow[v][prev[v]] -= push;
    }
    total += push;
  }
  if (total != demand) {
    throw PreconditionError("InfeasibleMarginals", "no allocation matches the marginals");
  }
  RationalMatrix q(X, Y);
  for (int i = 0; i < P; ++i) {
    const int x = rows[i];
    for (int y = 0; y < Y; ++y) {
      q(x, y) = flow[i][P + y] / (p.row_weight[x] * p.col_weight[y]);
    }
  }
  return q;
}

// Any solution of M z = rhs (free unknowns set to zero). The system is known
// to be consistent; inconsistency is a verification failure.
RationalVector solve_consistent(std::vector<RationalVector> m, RationalVector rhs) {
  const int n = static_cast<int>(rhs.size());
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < n; ++col) {
    int sel = -1;
    for (int i = row; i < n; ++i) {
      if (!m[i][col].is_zero()) {
        sel = i;
        break;
      }
    }
    if (sel < 0) continue;
    std::swap(m[sel], m[row]);
    std::swap(rhs[sel], rhs[row]);
    const Rational inv = Rational(1) / m[row][col];
    for (int j = col; j < n; ++j) m[row][j] *= inv;
    rhs[row] *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == row || m[i][col].is_zero()) continue;
      const Rational f = m[i][col];
      for (int j = col; j < n; ++j) {
        if (!m[row][j].is_zero()) m[i][j] -= f * m[row][j];
      }
      rhs[i] -= f * rhs[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (int i = row; i < n; ++i) {
    if (!rhs[i].is_zero()) {
      throw VerificationError("TransportSystem", "face system is inconsistent");
    }
  }
  RationalVector z(n, Rational(0));
  for (int i = 0; i < row; ++i) z[pivot_col[i]] = rhs[i];
  return z;
}

struct DiffEdge {
  int from;
  int to;
  Rational w;
  int x;
  int y;
  bool raise;  // true: q(x,y) may increase along a cycle through this edge
};

class ActiveSet {
 public:
  ActiveSet(const QuadTransportProblem& p, std::vector<int> rows, RationalMatrix q)
      : p_(p), rows_(std::move(rows)), q_(std::move(q)) {
    Y_ = static_cast<int>(p.col_weight.size());
    P_ = static_cast<int>(rows_.size());
  }

  int run() {
    int iterations = 0;
    for (;;) {
      ++iterations;
      if (face_step()) continue;
      if (kkt_or_cycle_step()) return iterations;
    }
  }

  const RationalMatrix& q() const { return q_; }
  const RationalVector& a() const { return a_; }
  const RationalVector& b() const { return b_; }

 private:
  bool is_free(int x, int y) const {
    return q_(x, y).sign() > 0 && q_(x, y) < Rational(1);
  }

  // Moves toward the minimizer on the current face; returns true if q changed.
  bool face_step() {
    const int n = P_ + Y_;
    std::vector<RationalVector> m(n, RationalVector(n));
    RationalVector rhs(n);
    for (int i = 0; i < P_; ++i) rhs[i] = p_.row_target[rows_[i]];
    for (int y = 0; y < Y_; ++y) rhs[P_ + y] = p_.col_target[y];
    bool any_free = false;
    for (int i = 0; i < P_; ++i) {
      const int x = rows_[i];
      const Rational& r = p_.row_weight[x];
      for (int y = 0; y < Y_; ++y) {
        const Rational& c = p_.col_weight[y];
        if (is_free(x, y)) {
          any_free = true;
          m[i][i] += c;
          m[i][P_ + y] += c;
          m[P_ + y][i] += r;
          m[P_ + y][P_ + y] += r;
        } else if (!q_(x, y).is_zero()) {
          rhs[i] -= c * q_(x, y);
          rhs[P_ + y] -= r * q_(x, y);
        }
      }
    }
    if (!any_free) return false;
    const RationalVector z = solve_consistent(std::move(m), std::move(rhs));
    // Step toward the face minimizer, stopping at the first bound.
    Rational step(1);
    bool moved = false;
    RationalMatrix dir(q_.rows(), Y_);
    for (int i = 0; i < P_; ++i) {
      const int x = rows_[i];
      for (int y = 0; y < Y_; ++y) {
        if (!is_free(x, y)) continue;
        dir(x, y) = z[i] + z[P_ + y] - q_(x, y);
        const Rational& d = dir(x, y);
        if (d.is_zero()) continue;
        moved = true;
        const Rational room = d.sign() > 0 ? (Rational(1) - q_(x, y)) / d : -q_(x, y) / d;
        if (room < step) step = room;
      }
    }
    if (!moved) return false;
    for (int i = 0; i < P_; ++i) {
      const int x = rows_[i];
      for (int y = 0; y < Y_; ++y) {
        if (is_free(x, y) && !dir(x, y).is_zero()) q_(x, y) += step * dir(x, y);
      }
    }
    return true;
  }

  // Node ids: rows 0..P-1 carry a(x); P..P+Y-1 carry c(y) = -b(y).
  // A constraint u - v <= w is the edge v -> u of weight w.
  std::vector<DiffEdge> build_edges() const {
    std::vector<DiffEdge> edges;
    for (int i = 0; i < P_; ++i) {
      const int x = rows_[i];
      for (int y = 0; y < Y_; ++y) {
        const Rational& v = q_(x, y);
        const int ny = P_ + y;
        if (v < Rational(1)) edges.push_back({ny, i, v, x, y, true});    // a + b <= q
        if (v.sign() > 0) edges.push_back({i, ny, -v, x, y, false});     // a + b >= q
      }
    }
    return edges;
  }

  // Returns true when optimal (potentials stored); otherwise takes a descent
  // step along a negative cycle and returns false.
  bool kkt_or_cycle_step() {
    const int n = P_ + Y_;
    const auto edges = build_edges();
    RationalVector dist(n, Rational(0));
    std::vector<int> pred(n, -1);
    int updated = -1;
    for (int it = 0; it < n; ++it) {
      updated = -1;
      for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const auto& ed = edges[e];
        Rational cand = dist[ed.from] + ed.w;
        if (cand < dist[ed.to]) {
          dist[ed.to] = std::move(cand);
          pred[ed.to] = e;
          updated = ed.to;
        }
      }
      if (updated < 0) break;
    }
    if (updated < 0) {
      a_.assign(q_.rows(), Rational(0));
      for (int i = 0; i < P_; ++i) a_[rows_[i]] = dist[i];
      b_.assign(Y_, Rational(0));
      for (int y = 0; y < Y_; ++y) b_[y] = -dist[P_ + y];
      return true;
    }
    int v = updated;
    for (int k = 0; k < n; ++k) v = edges[pred[v]].from;
    std::vector<int> cycle;
    int u = v;
    do {
      cycle.push_back(pred[u]);
      u = edges[pred[u]].from;
    } while (u != v);

    Rational slope(0), curvature(0);
    for (int e : cycle) {
      const auto& ed = edges[e];
      slope += ed.raise ? q_(ed.x, ed.y) : -q_(ed.x, ed.y);
      curvature += Rational(1) / (p_.row_weight[ed.x] * p_.col_weight[ed.y]);
    }
    if (slope.sign() >= 0) {
      throw VerificationError("TransportCycle", "negative cycle is not a descent direction");
    }
    Rational step = -slope / curvature;
    for (int e : cycle) {
      const auto& ed = edges[e];
      const Rational w = p_.row_weight[ed.x] * p_.col_weight[ed.y];
      const Rational room = ed.raise ? (Rational(1) - q_(ed.x, ed.y)) * w : q_(ed.x, ed.y) * w;
      if (room < step) step = room;
    }
    for (int e : cycle) {
      const auto& ed = edges[e];
      const Rational delta = step / (p_.row_weight[ed.x] * p_.col_weight[ed.y]);
      if (ed.raise) {
        q_(ed.x, ed.y) += delta;
      } else {
        q_(ed.x, ed.y) -= delta;
      }
    }
    return false;
  }

  const QuadTransportProblem& p_;
  std::vector<int> rows_;
  RationalMatrix q_;
  RationalVector a_, b_;
  int Y_ = 0;
  int P_ = 0;
};

// Solves sum_y c(y) clamp(a + b(y)) = target for a.
Rational fit_zero_row(const RationalVector& b, const RationalVector& c, const Rational& target) {
  RationalVector cand;
  for (const auto& by : b) {
    cand.push_back(-by);
    cand.push_back(Rational(1) - by);
  }
  std::sort(cand.begin(), cand.end());
  auto value = [&](const Rational& a) {
    Rational s(0);
    for (std::size_t y = 0; y < b.size(); ++y) s += c[y] * clamp01(a + b[y]);
    return s;
  };
  if (target.is_zero()) return cand.front();
  Rational lo = cand.front();
  Rational vlo = value(lo);
  for (const auto& hi : cand) {
    const Rational vhi = value(hi);
    if (vhi >= target) {
      if (vhi == vlo) return hi;
      return lo + (hi - lo) * (target - vlo) / (vhi - vlo);
    }
    lo = hi;
    vlo = vhi;
  }
  return cand.back();
}

}  // namespace

QuadTransportSolution solve_quad_transport(const QuadTransportProblem& p,
                                           const std::optional<RationalMatrix>& start) {
  validate(p);
  const int X = static_cast<int>(p.row_weight.size());
  const int Y = static_cast<int>(p.col_weight.size());
  std::vector<int> rows;
  for (int x = 0; x < X; ++x) {
    if (p.row_weight[x].sign() > 0) rows.push_back(x);
  }
  RationalMatrix q0;
  if (start) {
    if (!satisfies_constraints(p, *start)) {
      throw PreconditionError("InfeasibleStart", "start point violates the transport constraints");
    }
    q0 = *start;
  } else {
    q0 = max_flow_start(p, rows);
  }

  QuadTransportSolution sol;
  ActiveSet solver(p, rows, std::move(q0));
  sol.iterations = solver.run();
  sol.q = solver.q();
  sol.a = solver.a();
  sol.b = solver.b();
  for (int x = 0; x < X; ++x) {
    if (p.row_weight[x].sign() > 0) continue;
    sol.a[x] = fit_zero_row(sol.b, p.col_weight, p.row_target[x]);
    for (int y = 0; y < Y; ++y) sol.q(x, y) = clamp01(sol.a[x] + sol.b[y]);
  }
  const auto bad = verify_quad_transport(p, sol);
  if (!bad.empty()) throw VerificationError("TransportKkt", bad.front());
  return sol;
}

std::vector<std::string> verify_quad_transport(const QuadTransportProblem& p,
                                               const QuadTransportSolution& s) {
  std::vector<std::string> bad;
  if (!satisfies_constraints(p, s.q)) bad.emplace_back("marginal or bound constraint violated");
  const int X = static_cast<int>(p.row_weight.size());
  const int Y = static_cast<int>(p.col_weight.size());
  if (static_cast<int>(s.a.size()) != X || static_cast<int>(s.b.size()) != Y) {
    bad.emplace_back("potential dimensions");
    return bad;
  }
  for (int x = 0; x < X; ++x) {
    for (int y = 0; y < Y; ++y) {
      const Rational z = s.a[x] + s.b[y];
      const Rational& v = s.q(x, y);
      const bool ok = v.is_zero() ? z.sign() <= 0
                      : v == Rational(1) ? z >= Rational(1)
                                         : z == v;
      if (!ok) {
        bad.push_back("KKT violated at (" + std::to_string(x + 1) + "," + std::to_string(y + 1) +
                      ")");
      }
    }
  }
  return bad;
}

}  // namespace ipbt
