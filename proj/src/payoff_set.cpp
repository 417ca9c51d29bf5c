#include <algorithm>
#include <map>
#include <utility>

#include <gmpxx.h>

#include "ipbt/errors.hpp"
#include "ipbt/refine.hpp"
#include "models.hpp"

namespace ipbt {

namespace {

struct Point {
  Rational u1;
  Rational u2;
  Allocation witness;
};

struct Direction {
  Rational a;
  Rational b;
  bool operator<(const Direction& o) const {
    return std::pair(a, b) < std::pair(o.a, o.b);
  }
};

struct Support {
  Rational value;
  Point point;
  RationalVector duals;
};

/// Scales (a, b) != 0 to coprime integers with the same direction.
Direction primitive(const Rational& a, const Rational& b) {
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), a.raw().get_den_mpz_t(), b.raw().get_den_mpz_t());
  const mpq_class sa = a.raw() * l;
  const mpq_class sb = b.raw() * l;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), sa.get_num_mpz_t(), sb.get_num_mpz_t());
  return {Rational(mpq_class(sa.get_num() / g)), Rational(mpq_class(sb.get_num() / g))};
}

Rational cross(const Point& o, const Point& a, const Point& b) {
  return (a.u1 - o.u1) * (b.u2 - o.u2) - (a.u2 - o.u2) * (b.u1 - o.u1);
}

/// Strictly convex hull, counter-clockwise from the lexicographically smallest point.
std::vector<Point> hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& p, const Point& q) {
    return std::pair(p.u1, p.u2) < std::pair(q.u1, q.u2);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point& p, const Point& q) {
                          return p.u1 == q.u1 && p.u2 == q.u2;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> h;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t floor = h.size();
    for (const auto& p : pts) {
      while (h.size() >= floor + 2 && cross(h[h.size() - 2], h.back(), p).sign() <= 0) {
        h.pop_back();
      }
      h.push_back(p);
    }
    h.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  return h;
}

class SupportOracle {
 public:
  SupportOracle(const Environment& env, const RationalVector& floor, const LpOptions& lp)
      : env_(env), floor_(floor), lp_(lp) {}

  Support solve(const Direction& d) const {
    LpProblem lp(ObjectiveSense::Maximize);
    models::ReducedModel model(env_, lp, models::ReducedModel::Rebate::Free);
    model.add_convexity_rows();
    model.add_upward_bic_rows();
    model.add_downward_bic_rows();
    model.add_seller_iir_rows();
    model.add_buyer_iir_row(env_.p1());
    for (int x = 0; x < 2; ++x) {
      models::add_constraint(lp, model.seller_payoff(x), RowSense::GreaterEqual, floor_[x],
                             "floor(" + std::to_string(x + 1) + ")");
    }
    for (int x = 0; x < 2; ++x) {
      auto terms = model.seller_payoff(x).terms;
      for (auto& t : terms) t.coef *= x == 0 ? d.a : d.b;
      lp.add_objective(terms);
    }
    const auto sol = solve_lp(lp, lp_);
    if (sol.status != LpStatus::Optimal) {
      throw VerificationError("PayoffSet", std::string("support LP is ") + to_string(sol.status));
    }
    const auto bad = verify_lp_optimality(lp, sol);
    if (!bad.empty()) throw VerificationError("LpCertificate", bad.front());
    Allocation w = model.reconstruct(sol.x);
    const auto u = seller_payoffs(env_, w);
    if (!check_constraints(env_, w, Belief::prior(env_)).feasible || u[0] < floor_[0] ||
        u[1] < floor_[1]) {
      throw VerificationError("PayoffSet", "support witness is not feasible");
    }
    const Rational value = d.a * u[0] + d.b * u[1];
    return {value, Point{u[0], u[1], std::move(w)}, sol.duals};
  }

 private:
  const Environment& env_;
  const RationalVector& floor_;
  const LpOptions& lp_;
};

struct Query {
  Direction dir;
  const Point* anchor;  // a point the facet must pass through
};

}  // namespace

PayoffPolygon seller_payoff_set(const Environment& env, const LpOptions& lp) {
  if (env.x_size() != 2) {
    throw PreconditionError("UnsupportedDimension", "payoff sets need exactly two seller types");
  }
  RswOptions options;
  options.lp = lp;
  const auto floor = solve_rsw(env, options).seller_payoffs;
  const SupportOracle oracle(env, floor, lp);
  std::map<Direction, Support> cache;
  int solves = 0;

  auto fetch = [&](const std::vector<Direction>& dirs) {
    std::vector<Direction> todo;
    for (const auto& d : dirs) {
      if (!cache.count(d) &&
          std::find_if(todo.begin(), todo.end(), [&](const Direction& e) {
            return !(e < d) && !(d < e);
          }) == todo.end()) {
        todo.push_back(d);
      }
    }
    std::vector<std::optional<Support>> got(todo.size());
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < static_cast<int>(todo.size()); ++i) {
      try {
        got[i] = oracle.solve(todo[i]);
      } catch (...) {
#pragma omp critical(ipbt_payoff_set_error)
        {
          if (!error) error = std::current_exception();
        }
      }
    }
    if (error) std::rethrow_exception(error);
    for (std::size_t i = 0; i < todo.size(); ++i) cache.emplace(todo[i], std::move(*got[i]));
    solves += static_cast<int>(todo.size());
  };

  const std::vector<Direction> axes = {{Rational(1), Rational(0)},
                                       {Rational(0), Rational(1)},
                                       {Rational(-1), Rational(0)},
                                       {Rational(0), Rational(-1)}};
  fetch(axes);
  std::vector<Point> points;
  for (const auto& d : axes) points.push_back(cache.at(d).point);

  while (true) {
    const auto h = hull(points);
    std::vector<Query> queries;
    if (h.size() == 1) {
      for (const auto& d : axes) queries.push_back({d, &h[0]});
    } else if (h.size() == 2) {
      const Rational du = h[1].u1 - h[0].u1;
      const Rational dv = h[1].u2 - h[0].u2;
      queries.push_back({primitive(dv, -du), &h[0]});
      queries.push_back({primitive(-dv, du), &h[0]});
      queries.push_back({primitive(du, dv), &h[1]});
      queries.push_back({primitive(-du, -dv), &h[0]});
    } else {
      for (std::size_t i = 0; i < h.size(); ++i) {
        const Point& u = h[i];
        const Point& v = h[(i + 1) % h.size()];
        queries.push_back({primitive(v.u2 - u.u2, u.u1 - v.u1), &u});
      }
    }
    std::vector<Direction> dirs;
    for (const auto& q : queries) dirs.push_back(q.dir);
    fetch(dirs);

    bool grew = false;
    for (const auto& q : queries) {
      const auto& s = cache.at(q.dir);
      if (s.value > q.dir.a * q.anchor->u1 + q.dir.b * q.anchor->u2) {
        points.push_back(s.point);
        grew = true;
      }
    }
    if (grew) continue;

    PayoffPolygon poly;
    poly.support_solves = solves;
    for (const auto& p : h) poly.vertices.push_back({p.u1, p.u2, p.witness});
    for (const auto& q : queries) {
      const auto& s = cache.at(q.dir);
      poly.facets.push_back({q.dir.a, q.dir.b, s.value, s.duals});
    }
    return poly;
  }
}

}  // namespace ipbt
