// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every exact criterion compares rationals with ==; the only float tolerance is
// kFloatTolerance against the floating-point transport oracle.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "float_oracle.hpp"
#include "ipbt/benchmarks.hpp"
#include "ipbt/refine.hpp"
#include "ipbt/rsw.hpp"
#include "random_env.hpp"
#include "test_support.hpp"

using namespace ipbt;
using namespace ipbt::testing;

namespace {

constexpr double kFloatTolerance = 1e-6;
constexpr int kFuzzEnvironments = 200;
constexpr int kMonotoneVectors = 100;
constexpr int kTransportInstances = 100;

/// Collects failures of one criterion; empty means pass.
class Failures {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) items_.push_back(what);
  }
  bool empty() const { return items_.empty(); }
  std::string summary() const {
    std::ostringstream os;
    os << items_.size() << " failure(s); first: " << items_.front();
    return os.str();
  }

 private:
  std::vector<std::string> items_;
};

bool run(int id, const char* title, const std::function<void(Failures&)>& body) {
  Failures f;
  try {
    body(f);
  } catch (const std::exception& e) {
    f.check(false, std::string("exception: ") + e.what());
  }
  if (f.empty()) {
    std::printf("[PASS] %d %s\n", id, title);
  } else {
    std::printf("[FAIL] %d %s: %s\n", id, title, f.summary().c_str());
  }
  std::fflush(stdout);
  return f.empty();
}

bool increasing_rows_decreasing_cols(const RationalMatrix& q) {
  for (int x = 0; x < q.rows(); ++x) {
    for (int y = 0; y < q.cols(); ++y) {
      if (y > 0 && q(x, y - 1) > q(x, y)) return false;
      if (x > 0 && q(x - 1, y) < q(x, y)) return false;
    }
  }
  return true;
}

Allocation mix(const Environment& env, const Allocation& a, const Allocation& b, const Rational& w) {
  RationalMatrix q(env.x_size(), env.y_size()), t(env.x_size(), env.y_size());
  for (int x = 0; x < env.x_size(); ++x) {
    for (int y = 0; y < env.y_size(); ++y) {
      q(x, y) = w * a.q()(x, y) + (Rational(1) - w) * b.q()(x, y);
      t(x, y) = w * a.t()(x, y) + (Rational(1) - w) * b.t()(x, y);
    }
  }
  return Allocation::make(env, q, t);
}

const PayoffVertex* find_vertex(const PayoffPolygon& p, const Rational& u1, const Rational& u2) {
  for (const auto& v : p.vertices) {
    if (v.u1 == u1 && v.u2 == u2) return &v;
  }
  return nullptr;
}

void motivating_table(Failures& f) {
  const auto r = solve_rsw(load("motivating"));
  f.check(r.allocation.q() == M({{"1", "1"}, {"0", "2/3"}}), "q differs");
  f.check(r.allocation.t() == M({{"200", "200"}, {"0", "800/3"}}), "t differs");
  f.check(r.seller_payoffs == V({"200", "800/3"}), "payoffs differ from (200, 800/3)");
}

void example1(Failures& f) {
  const auto env = load("example1");
  const auto r = solve_rsw(env);
  f.check(r.allocation.q() == M({{"1", "1"}, {"1/5", "1/5"}}), "q*");
  f.check(r.allocation.t() == M({{"7", "7"}, {"13/5", "13/5"}}), "t*");
  f.check(!check_strong_solution(env).strong, "relaxed allocation reported as strong");
  const auto fixed = A(env, M({{"1", "1"}, {"1", "1"}}), M({{"10", "10"}, {"10", "10"}}));
  f.check(check_constraints(env, fixed, Belief::prior(env)).feasible, "price-10 rule infeasible");
  f.check(dominance(env, fixed, r.allocation) == Dominance::Dominates, "price-10 rule not dominating");
}

void example3(Failures& f) {
  const auto env = load("example3");
  const auto full = solve_full_information(env);
  for (int x = 1; x <= 25; ++x) {
    const auto& m = full.menus[x - 1];
    // 13 - x until it reaches the lowest buyer type.
    const int k = std::max(13 - x, 1);
    f.check(m.threshold == k, "threshold x=" + std::to_string(x));
    f.check(m.price && *m.price == env.v21()[x - 1] + env.v22()[k - 1], "price x=" + std::to_string(x));
    if (x <= 12) f.check(m.price && *m.price == Rational(2 * x + 13), "price 2x+13 x=" + std::to_string(x));
  }
  const auto cmp = payoff_comparison_report(env);
  f.check(cmp.regular, "regularity");
  f.check(cmp.almost_fixed_prices.has_value(), "menus are not almost-fixed prices");
  f.check(cmp.all_passed(), "a comparison check failed");
  f.check(cmp.strict_undersupply_cells >= 1, "no strict undersupply cell");
  bool cellwise = true;
  for (int x = 0; x < 25; ++x) {
    for (int y = 0; y < 25; ++y) cellwise = cellwise && cmp.undersupply(x, y) >= Rational(0);
  }
  f.check(cellwise, "cellwise undersupply");
}

void example4(Failures& f) {
  const auto env = load("example4");
  const auto full = solve_full_information(env);
  f.check(full.menus[0].threshold == 26 && !full.menus[0].price, "x=1 should not trade");
  for (int x = 2; x <= 25; ++x) {
    const auto& m = full.menus[x - 1];
    f.check(m.threshold == 27 - x, "threshold x=" + std::to_string(x));
    f.check(m.price && *m.price == Rational(2 * x + 27), "price x=" + std::to_string(x));
  }
  const auto r = solve_rsw(env);
  f.check(r.allocation == Allocation::no_trade(env), "relaxed allocation trades");
}

void triangle(Failures& f) {
  const auto p = seller_payoff_set(load("motivating"));
  f.check(p.vertices.size() == 3, "vertex count " + std::to_string(p.vertices.size()));
  f.check(find_vertex(p, Rational(200), R("800/3")) != nullptr, "vertex (200,800/3)");
  f.check(find_vertex(p, R("700/3"), R("800/3")) != nullptr, "vertex (700/3,800/3)");
  f.check(find_vertex(p, Rational(225), Rational(275)) != nullptr, "vertex (225,275)");
  // a u1 + b u2 <= c
  const std::vector<std::array<Rational, 3>> expected{
      {Rational(0), Rational(-1), R("-800/3")},  // U1(2) >= 800/3
      {Rational(-1), Rational(3), Rational(600)},  // U1(2) <= U1(1)/3 + 200
      {Rational(1), Rational(1), Rational(500)}};  // U1(2) <= 500 - U1(1)
  f.check(p.facets.size() == 3, "facet count " + std::to_string(p.facets.size()));
  for (const auto& e : expected) {
    bool found = false;
    for (const auto& fc : p.facets) found = found || (fc.a == e[0] && fc.b == e[1] && fc.c == e[2]);
    f.check(found, "facet " + e[0].str() + "," + e[1].str() + "," + e[2].str());
  }
}

void core_example(Failures& f) {
  const auto env = load("b2");
  const auto p = seller_payoff_set(env);
  Rational top = p.vertices.front().u2;
  for (const auto& v : p.vertices) top = max(top, v.u2);
  f.check(top == Rational(100), "max U1(2) is " + top.str());
  const auto* a = find_vertex(p, Rational(95), Rational(100));
  const auto* b = find_vertex(p, Rational(100), Rational(100));
  f.check(a && b, "vertices (95,100) and (100,100)");
  if (!a || !b) return;
  const auto mid = mix(env, a->witness, b->witness, R("3/5"));
  f.check(seller_payoffs(env, mid) == V({"97", "100"}), "mixture payoffs");
  for (const auto* g : {&a->witness, &mid, &b->witness}) {
    f.check(check_core(env, *g).in_core, "not in core: U1(1)=" + seller_payoffs(env, *g)[0].str());
  }
  const auto rsw = solve_rsw(env);
  f.check(rsw.seller_payoffs == V({"80", "90"}), "relaxed payoffs");
  f.check(!check_core(env, rsw.allocation).in_core, "relaxed allocation in core");
}

void skewed_prior(Failures& f) {
  const auto env = load("b3");
  const auto r = solve_rsw(env);
  f.check(r.seller_payoffs == V({"200", "260"}), "relaxed payoffs");
  f.check(r.allocation.q()(1, 0) == R("1/5"), "q*(2,1)");
  f.check(r.allocation.t()(1, 0) == Rational(60), "t*(2,1)");
  f.check(r.allocation.t()(1, 1) == Rational(380), "t*(2,2)");
  f.check(solve_full_information(env).seller_payoffs == V({"200", "300"}), "full-information payoffs");
  f.check(check_fgp_exists(env).exists, "fgp");
  f.check(!check_snp_exists(env).exists, "snp");
}

void fuzz(Failures& f) {
  Rng rng(20240611);
  for (int i = 0; i < kFuzzEnvironments; ++i) {
    const auto env = random_environment(rng, 4, 4);
    const std::string tag = "env " + std::to_string(i) + ": ";
    const auto prior = Belief::prior(env);
    const auto dq = derive(env);

    // solve_rsw throws on a failed post-check; the explicit checks repeat the key ones.
    const auto r = solve_rsw(env);
    const auto rep = check_constraints(env, r.allocation, prior);
    f.check(rep.seller_bic_ok && rep.buyer_epic_ok && rep.buyer_epir_ok, tag + "relaxed constraints");
    f.check(verify_reduced_surplus_optimality(env, r.allocation, r.certificate).empty(),
            tag + "row optimality");
    Rational total(0);
    bool nonneg = true;
    for (const auto& w : r.certificate.pi1) total += w, nonneg = nonneg && w >= Rational(0);
    f.check(nonneg && total == Rational(1), tag + "belief is not a distribution");
    for (int x = 0; x < env.x_size(); ++x) {
      for (int y = 0; y < env.y_size(); ++y) {
        f.check(r.certificate.lambda(x, y) == r.certificate.pi1[x] * (Rational(1) - dq.P2[y]),
                tag + "lambda");
      }
    }

    RationalVector w(env.x_size());
    for (auto& v : w) v = small_rational(rng, 1, 5);
    f.check(solve_rsw_weighted(env, w) == r.seller_payoffs, tag + "weighted re-solve");

    const auto cmp = payoff_comparison_report(env);
    for (const auto& c : cmp.checks) f.check(c.passed, tag + c.name + " " + c.detail);

    const auto g = random_feasible_allocation(env, rng);
    const auto e = epic_equivalent(env, g);
    f.check(seller_payoffs(env, e.allocation) == seller_payoffs(env, g), tag + "U1 changed");
    f.check(buyer_interim_payoffs(env, e.allocation, prior) == buyer_interim_payoffs(env, g, prior),
            tag + "U2 changed");
    f.check(increasing_rows_decreasing_cols(e.transport.q), tag + "transport output not monotone");
  }
}

bool monotone01(const std::vector<int>& q) {
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i - 1] > q[i]) return false;
  }
  return true;
}

void oracles(Failures& f) {
  Rng rng(777);
  for (int i = 0; i < kMonotoneVectors; ++i) {
    const int n = 1 + i % 12;
    RationalVector c(n), w(n);
    for (int y = 0; y < n; ++y) c[y] = small_rational(rng, -5, 5), w[y] = small_rational(rng, 1, 3);
    const auto r = maximize_monotone_linear(c, w);
    Rational best(0);  // the all-zero rule
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> q(n);
      for (int y = 0; y < n; ++y) q[y] = (mask >> y) & 1;
      if (!monotone01(q)) continue;
      Rational v(0);
      for (int y = 0; y < n; ++y) {
        if (q[y]) v += w[y] * c[y];
      }
      best = max(best, v);
    }
    f.check(r.value == best, "monotone vector " + std::to_string(i));
    Rational attained(0);
    for (int y = 0; y < n; ++y) attained += w[y] * c[y] * r.rule[y];
    f.check(attained == best, "monotone rule value " + std::to_string(i));
  }

  for (int i = 0; i < kTransportInstances; ++i) {
    const int rows = 1 + i % 3;
    const int cols = 1 + (i / 3) % (6 / rows);
    const auto p = random_transport_problem(rng, rows, cols);
    const auto s = solve_quad_transport(p);
    f.check(verify_quad_transport(p, s).empty(), "KKT " + std::to_string(i));
    const auto o = brute_force_transport(p);
    f.check(o.found, "float oracle found nothing " + std::to_string(i));
    if (!o.found) continue;
    for (int k = 0; k < rows * cols; ++k) {
      f.check(std::abs(s.q(k / cols, k % cols).to_double() - o.q[k]) <= kFloatTolerance,
              "transport cell " + std::to_string(i));
    }
  }
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run(1, "motivating example relaxed allocation", motivating_table);
  ok &= run(2, "example 1 dominated relaxed allocation", example1);
  ok &= run(3, "example 3 fixed prices and undersupply", example3);
  ok &= run(4, "example 4 no trade", example4);
  ok &= run(5, "motivating payoff triangle", triangle);
  ok &= run(6, "core allocations with top type payoff 100", core_example);
  ok &= run(7, "skewed buyer prior refinements", skewed_prior);
  ok &= run(8, "random environment properties", fuzz);
  ok &= run(9, "oracle equivalence", oracles);
  std::printf("%s\n", ok ? "ALL PASS" : "SOME CRITERIA FAILED");
  return ok ? 0 : 1;
}
