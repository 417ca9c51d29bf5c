#include "ipbt/environment.hpp"

#include <sstream>

#include "ipbt/errors.hpp"

namespace ipbt {

namespace {

[[noreturn]] void invalid_env(const std::string& what) {
  throw InputError("InvalidEnvironment", what);
}

void check_size(const RationalVector& v, int n, const char* name) {
  if (static_cast<int>(v.size()) != n) {
    std::ostringstream os;
    os << name << " has length " << v.size() << ", expected " << n;
    invalid_env(os.str());
  }
}

void check_distribution(const RationalVector& p, const char* name) {
  Rational sum(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].sign() <= 0) {
      std::ostringstream os;
      os << name << "(" << i + 1 << ") = " << p[i] << " is not positive (full support required)";
      invalid_env(os.str());
    }
    sum += p[i];
  }
  if (sum != Rational(1)) invalid_env(std::string(name) + " sums to " + sum.str() + ", not 1");
}

void check_monotone(const RationalVector& v, bool strict, const char* name) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (strict ? !(v[i - 1] < v[i]) : !(v[i - 1] <= v[i])) {
      std::ostringstream os;
      os << name << " is not " << (strict ? "strictly " : "") << "increasing at " << i << " -> "
         << i + 1;
      invalid_env(os.str());
    }
  }
}

// Valuations are monotone, so the lowest type pair attains the minimum.
void check_nonnegative_value(const RationalVector& a, const RationalVector& b, const char* name) {
  if ((a[0] + b[0]).sign() < 0) invalid_env(std::string(name) + " valuation is negative");
}

Rational interim_q(const Environment& env, const Allocation& g, int xr) {
  Rational s(0);
  for (int y = 0; y < env.y_size(); ++y) s += env.p2()[y] * g.q()(xr, y);
  return s;
}

Rational interim_t(const Environment& env, const Allocation& g, int xr) {
  Rational s(0);
  for (int y = 0; y < env.y_size(); ++y) s += env.p2()[y] * g.t()(xr, y);
  return s;
}

Rational mean(const RationalVector& w, const RationalVector& v) {
  Rational s(0);
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * v[i];
  return s;
}

// Seller payoff, 0-based: type x reporting xr.
Rational seller_payoff0(const Environment& env, const Allocation& g, int xr, int x) {
  Rational s(0);
  for (int y = 0; y < env.y_size(); ++y) {
    s += env.p2()[y] *
         (g.t()(xr, y) + (env.v11()[x] + env.v12()[y]) * (Rational(1) - g.q()(xr, y)));
  }
  return s;
}

Rational buyer_expost0(const Environment& env, const Allocation& g, int yr, int x, int y) {
  return (env.v21()[x] + env.v22()[y]) * g.q()(x, yr) - g.t()(x, yr);
}

Rational buyer_interim0(const Environment& env, const Allocation& g, int yr, int y,
                        const RationalVector& belief) {
  Rational s(0);
  for (int x = 0; x < env.x_size(); ++x) {
    if (!belief[x].is_zero()) s += belief[x] * buyer_expost0(env, g, yr, x, y);
  }
  return s;
}

struct BuyerInterimSlacks {
  RationalMatrix bic;
  RationalVector iir;
  bool bic_ok = true;
  bool iir_ok = true;
};

BuyerInterimSlacks buyer_interim_slacks(const Environment& env, const Allocation& g,
                                        const RationalVector& belief,
                                        std::vector<std::string>* violations) {
  const int Y = env.y_size();
  BuyerInterimSlacks out{RationalMatrix(Y, Y), RationalVector(Y), true, true};
  RationalMatrix dev(Y, Y);
  for (int y = 0; y < Y; ++y) {
    for (int yr = 0; yr < Y; ++yr) dev(y, yr) = buyer_interim0(env, g, yr, y, belief);
  }
  for (int y = 0; y < Y; ++y) {
    for (int yr = 0; yr < Y; ++yr) {
      out.bic(y, yr) = dev(y, y) - dev(y, yr);
      if (out.bic(y, yr).sign() < 0 && out.bic_ok) {
        out.bic_ok = false;
        if (violations) {
          violations->push_back("buyer BIC: type " + std::to_string(y + 1) + " gains by reporting " +
                                std::to_string(yr + 1));
        }
      }
    }
    out.iir[y] = dev(y, y);
    if (out.iir[y].sign() < 0 && out.iir_ok) {
      out.iir_ok = false;
      if (violations) violations->push_back("buyer IIR: type " + std::to_string(y + 1));
    }
  }
  return out;
}

}  // namespace

Environment Environment::build(EnvironmentData d) {
  if (d.x_size < 1) invalid_env("x_size must be at least 1");
  if (d.y_size < 1) invalid_env("y_size must be at least 1");
  check_size(d.p1, d.x_size, "p1");
  check_size(d.p2, d.y_size, "p2");
  check_size(d.v11, d.x_size, "v11");
  check_size(d.v12, d.y_size, "v12");
  check_size(d.v21, d.x_size, "v21");
  check_size(d.v22, d.y_size, "v22");
  check_distribution(d.p1, "p1");
  check_distribution(d.p2, "p2");
  check_monotone(d.v11, true, "v11");
  check_monotone(d.v12, false, "v12");
  check_monotone(d.v21, false, "v21");
  check_monotone(d.v22, true, "v22");
  check_nonnegative_value(d.v11, d.v12, "seller");
  check_nonnegative_value(d.v21, d.v22, "buyer");
  return Environment(std::move(d));
}

DerivedQuantities derive(const Environment& env) {
  const int X = env.x_size();
  const int Y = env.y_size();
  DerivedQuantities dq;
  dq.psi.resize(X);
  dq.dv1.assign(X, Rational(0));
  for (int x = 0; x < X; ++x) {
    dq.psi[x] = env.v21()[x] - env.v11()[x];
    if (x > 0) dq.dv1[x] = env.v11()[x] - env.v11()[x - 1];
  }
  dq.phi.resize(Y);
  dq.dv2.assign(Y, Rational(0));
  dq.P2.assign(Y + 1, Rational(0));
  dq.hazard.resize(Y);
  dq.buyer_virtual.resize(Y);
  for (int y = 0; y < Y; ++y) {
    dq.phi[y] = env.v22()[y] - env.v12()[y];
    if (y + 1 < Y) dq.dv2[y] = env.v22()[y + 1] - env.v22()[y];
    dq.P2[y + 1] = dq.P2[y] + env.p2()[y];
  }
  for (int y = 0; y < Y; ++y) {
    dq.hazard[y] = (Rational(1) - dq.P2[y + 1]) / env.p2()[y];
    dq.buyer_virtual[y] = dq.phi[y] - dq.dv2[y] * dq.hazard[y];
  }
  dq.virtual_surplus = RationalMatrix(X, Y);
  for (int x = 0; x < X; ++x) {
    for (int y = 0; y < Y; ++y) dq.virtual_surplus(x, y) = dq.psi[x] + dq.buyer_virtual[y];
  }
  dq.mean_v12 = mean(env.p2(), env.v12());
  return dq;
}

Belief Belief::make(const Environment& env, RationalVector weights) {
  if (static_cast<int>(weights.size()) != env.x_size()) {
    throw InputError("InvalidBelief", "belief length does not match x_size");
  }
  Rational sum(0);
  for (const auto& w : weights) {
    if (w.sign() < 0) throw InputError("InvalidBelief", "negative belief weight");
    sum += w;
  }
  if (sum != Rational(1)) throw InputError("InvalidBelief", "belief sums to " + sum.str());
  return Belief(std::move(weights));
}

Belief Belief::prior(const Environment& env) { return Belief(env.p1()); }

Allocation Allocation::make(const Environment& env, RationalMatrix q, RationalMatrix t) {
  if (q.rows() != env.x_size() || q.cols() != env.y_size() || t.rows() != env.x_size() ||
      t.cols() != env.y_size()) {
    throw InputError("InvalidAllocation", "allocation shape does not match environment");
  }
  for (int x = 0; x < q.rows(); ++x) {
    for (int y = 0; y < q.cols(); ++y) {
      if (q(x, y).sign() < 0 || q(x, y) > Rational(1)) {
        throw InputError("InvalidAllocation", "q(" + std::to_string(x + 1) + "," +
                                                  std::to_string(y + 1) + ") outside [0,1]");
      }
    }
  }
  return Allocation(std::move(q), std::move(t));
}

Allocation Allocation::no_trade(const Environment& env) {
  return Allocation(RationalMatrix(env.x_size(), env.y_size()),
                    RationalMatrix(env.x_size(), env.y_size()));
}

Rational seller_interim_payoff(const Environment& env, const Allocation& g, SellerType report,
                               SellerType truth) {
  return seller_payoff0(env, g, report.value - 1, truth.value - 1);
}

Rational buyer_expost_payoff(const Environment& env, const Allocation& g, BuyerType report,
                             SellerType x, BuyerType y) {
  return buyer_expost0(env, g, report.value - 1, x.value - 1, y.value - 1);
}

Rational buyer_interim_payoff(const Environment& env, const Allocation& g, BuyerType report,
                              BuyerType y, const Belief& belief) {
  return buyer_interim0(env, g, report.value - 1, y.value - 1, belief.weights());
}

RationalVector seller_payoffs(const Environment& env, const Allocation& g) {
  RationalVector u(env.x_size());
  for (int x = 0; x < env.x_size(); ++x) u[x] = seller_payoff0(env, g, x, x);
  return u;
}

RationalMatrix buyer_expost_payoffs(const Environment& env, const Allocation& g) {
  RationalMatrix u(env.x_size(), env.y_size());
  for (int x = 0; x < env.x_size(); ++x) {
    for (int y = 0; y < env.y_size(); ++y) u(x, y) = buyer_expost0(env, g, y, x, y);
  }
  return u;
}

RationalVector buyer_interim_payoffs(const Environment& env, const Allocation& g,
                                     const Belief& belief) {
  RationalVector u(env.y_size());
  for (int y = 0; y < env.y_size(); ++y) u[y] = buyer_interim0(env, g, y, y, belief.weights());
  return u;
}

InterimRules interim_rules(const Environment& env, const Allocation& g, const Belief& belief) {
  const int X = env.x_size();
  const int Y = env.y_size();
  InterimRules r{RationalVector(X), RationalVector(X), RationalVector(Y), RationalVector(Y)};
  for (int x = 0; x < X; ++x) {
    r.Q1[x] = interim_q(env, g, x);
    r.T1[x] = interim_t(env, g, x);
  }
  for (int y = 0; y < Y; ++y) {
    for (int x = 0; x < X; ++x) {
      r.Q2[y] += belief[x] * g.q()(x, y);
      r.T2[y] += belief[x] * g.t()(x, y);
    }
  }
  return r;
}

ConstraintReport check_constraints(const Environment& env, const Allocation& g,
                                   const Belief& belief) {
  const int X = env.x_size();
  const int Y = env.y_size();
  const Rational mean_v12 = mean(env.p2(), env.v12());
  ConstraintReport rep;
  rep.seller_bic = RationalMatrix(X, X);
  rep.seller_iir = RationalVector(X);
  rep.seller_bic_ok = rep.seller_iir_ok = true;

  RationalVector Q1(X), T1(X);
  for (int x = 0; x < X; ++x) {
    Q1[x] = interim_q(env, g, x);
    T1[x] = interim_t(env, g, x);
  }
  // U1(xr | x) = T1(xr) + (v11(x) + E v12) - v11(x) Q1(xr) - E[v12 q(xr, .)]
  RationalVector v12q(X);
  for (int x = 0; x < X; ++x) {
    for (int y = 0; y < Y; ++y) v12q[x] += env.p2()[y] * env.v12()[y] * g.q()(x, y);
  }
  auto seller_dev = [&](int xr, int x) {
    return T1[xr] + env.v11()[x] + mean_v12 - env.v11()[x] * Q1[xr] - v12q[xr];
  };
  for (int x = 0; x < X; ++x) {
    const Rational truthful = seller_dev(x, x);
    for (int xr = 0; xr < X; ++xr) {
      rep.seller_bic(x, xr) = truthful - seller_dev(xr, x);
      if (rep.seller_bic(x, xr).sign() < 0 && rep.seller_bic_ok) {
        rep.seller_bic_ok = false;
        rep.violations.push_back("seller BIC: type " + std::to_string(x + 1) +
                                 " gains by reporting " + std::to_string(xr + 1));
      }
    }
    rep.seller_iir[x] = truthful - env.v11()[x] - mean_v12;
    if (rep.seller_iir[x].sign() < 0 && rep.seller_iir_ok) {
      rep.seller_iir_ok = false;
      rep.violations.push_back("seller IIR: type " + std::to_string(x + 1));
    }
  }

  auto interim = buyer_interim_slacks(env, g, belief.weights(), &rep.violations);
  rep.buyer_bic = std::move(interim.bic);
  rep.buyer_iir = std::move(interim.iir);
  rep.buyer_bic_ok = interim.bic_ok;
  rep.buyer_iir_ok = interim.iir_ok;

  rep.buyer_epic.assign(X, RationalMatrix(Y, Y));
  rep.buyer_epir = RationalMatrix(X, Y);
  rep.buyer_epic_ok = rep.buyer_epir_ok = true;
  for (int x = 0; x < X; ++x) {
    for (int y = 0; y < Y; ++y) {
      const Rational truthful = buyer_expost0(env, g, y, x, y);
      for (int yr = 0; yr < Y; ++yr) {
        rep.buyer_epic[x](y, yr) = truthful - buyer_expost0(env, g, yr, x, y);
        if (rep.buyer_epic[x](y, yr).sign() < 0 && rep.buyer_epic_ok) {
          rep.buyer_epic_ok = false;
          rep.violations.push_back("buyer EPIC: (" + std::to_string(x + 1) + "," +
                                   std::to_string(y + 1) + ") gains by reporting " +
                                   std::to_string(yr + 1));
        }
      }
      rep.buyer_epir(x, y) = truthful;
      if (truthful.sign() < 0 && rep.buyer_epir_ok) {
        rep.buyer_epir_ok = false;
        rep.violations.push_back("buyer EPIR: (" + std::to_string(x + 1) + "," +
                                 std::to_string(y + 1) + ")");
      }
    }
  }

  rep.belief_feasible =
      rep.seller_bic_ok && rep.seller_iir_ok && rep.buyer_bic_ok && rep.buyer_iir_ok;
  if (belief.weights() == env.p1()) {
    rep.feasible = rep.belief_feasible;
  } else {
    const auto prior = buyer_interim_slacks(env, g, env.p1(), nullptr);
    rep.feasible = rep.seller_bic_ok && rep.seller_iir_ok && prior.bic_ok && prior.iir_ok;
  }
  return rep;
}

Dominance compare_payoffs(const RationalVector& a, const RationalVector& b) {
  bool a_gt = false;
  bool b_gt = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) a_gt = true;
    if (b[i] > a[i]) b_gt = true;
  }
  if (a_gt && b_gt) return Dominance::Incomparable;
  if (a_gt) return Dominance::Dominates;
  if (b_gt) return Dominance::DominatedBy;
  return Dominance::Equal;
}

Dominance dominance(const Environment& env, const Allocation& a, const Allocation& b) {
  return compare_payoffs(seller_payoffs(env, a), seller_payoffs(env, b));
}

const char* to_string(Dominance d) {
  switch (d) {
    case Dominance::Dominates: return "Dominates";
    case Dominance::Equal: return "Equal";
    case Dominance::DominatedBy: return "DominatedBy";
    case Dominance::Incomparable: return "Incomparable";
  }
  return "?";
}

Allocation efficient_rule(const Environment& env) {
  const auto dq = derive(env);
  RationalMatrix q(env.x_size(), env.y_size());
  for (int x = 0; x < env.x_size(); ++x) {
    for (int y = 0; y < env.y_size(); ++y) {
      if ((dq.psi[x] + dq.phi[y]).sign() >= 0) q(x, y) = Rational(1);
    }
  }
  return Allocation::make(env, std::move(q), RationalMatrix(env.x_size(), env.y_size()));
}

bool is_regular(const DerivedQuantities& dq) {
  for (std::size_t y = 1; y < dq.buyer_virtual.size(); ++y) {
    if (!(dq.buyer_virtual[y - 1] < dq.buyer_virtual[y])) return false;
  }
  return true;
}

}  // namespace ipbt
