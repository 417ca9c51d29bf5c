#include "models.hpp"

namespace ipbt::models {

namespace {

std::string idx(int a) { return std::to_string(a + 1); }
std::string idx(int a, int b) { return idx(a) + "," + idx(b); }

}  // namespace

Affine& Affine::add(const Affine& o, const Rational& scale) {
  for (const auto& t : o.terms) terms.push_back({t.var, t.coef * scale});
  constant += o.constant * scale;
  return *this;
}

void add_constraint(LpProblem& lp, const Affine& lhs, RowSense sense, const Rational& rhs,
                    std::string name) {
  lp.add_row(lhs.terms, sense, rhs - lhs.constant, std::move(name));
}

ReducedModel::ReducedModel(const Environment& env, LpProblem& lp, Rebate rebate)
    : env_(env), dq_(derive(env)), lp_(lp) {
  const int X = env.x_size();
  const int Y = env.y_size();
  surplus_ = RationalMatrix(X, Y);
  for (int x = 0; x < X; ++x) {
    Rational suffix(0);
    for (int k = Y - 1; k >= 0; --k) {
      suffix += env.p2()[k] * dq_.virtual_surplus(x, k);
      surplus_(x, k) = suffix;
    }
  }
  mu_.assign(X, std::vector<int>(Y));
  rebate_.resize(X);
  for (int x = 0; x < X; ++x) {
    for (int k = 0; k < Y; ++k) mu_[x][k] = lp.add_variable("mu(" + idx(x, k) + ")");
  }
  for (int x = 0; x < X; ++x) {
    rebate_[x] = rebate == Rebate::Free ? lp.add_free_variable("r(" + idx(x) + ")")
                                        : lp.add_variable("r(" + idx(x) + ")");
  }
}

Affine ReducedModel::seller_payoff(int x) const {
  Affine a;
  for (int k = 0; k < env_.y_size(); ++k) a.terms.push_back({mu_[x][k], surplus_(x, k)});
  a.terms.push_back({rebate_[x], Rational(-1)});
  a.constant = env_.v11()[x] + dq_.mean_v12;
  return a;
}

Affine ReducedModel::trade_probability(int x) const {
  Affine a;
  for (int k = 0; k < env_.y_size(); ++k) {
    a.terms.push_back({mu_[x][k], Rational(1) - dq_.P2[k]});
  }
  return a;
}

void ReducedModel::add_convexity_rows() {
  for (int x = 0; x < env_.x_size(); ++x) {
    std::vector<LpTerm> terms;
    for (int k = 0; k < env_.y_size(); ++k) terms.push_back({mu_[x][k], Rational(1)});
    lp_.add_row(std::move(terms), RowSense::LessEqual, Rational(1), "mix(" + idx(x) + ")");
  }
}

std::vector<int> ReducedModel::add_upward_bic_rows() {
  std::vector<int> rows;
  for (int x = 0; x + 1 < env_.x_size(); ++x) {
    // U1(x) - U1(x+1) + dv1(x+1) (1 - Q1(x+1)) >= 0
    Affine lhs = seller_payoff(x);
    lhs.add(seller_payoff(x + 1), Rational(-1));
    lhs.add(trade_probability(x + 1), -dq_.dv1[x + 1]);
    lhs.constant += dq_.dv1[x + 1];
    add_constraint(lp_, lhs, RowSense::GreaterEqual, Rational(0), "bic_up(" + idx(x) + ")");
    rows.push_back(lp_.num_rows() - 1);
  }
  return rows;
}

void ReducedModel::add_downward_bic_rows() {
  for (int x = 0; x + 1 < env_.x_size(); ++x) {
    // U1(x+1) - U1(x) - dv1(x+1) (1 - Q1(x)) >= 0
    Affine lhs = seller_payoff(x + 1);
    lhs.add(seller_payoff(x), Rational(-1));
    lhs.add(trade_probability(x), dq_.dv1[x + 1]);
    lhs.constant -= dq_.dv1[x + 1];
    add_constraint(lp_, lhs, RowSense::GreaterEqual, Rational(0), "bic_down(" + idx(x + 1) + ")");
  }
}

void ReducedModel::add_seller_iir_rows() {
  for (int x = 0; x < env_.x_size(); ++x) {
    add_constraint(lp_, seller_payoff(x), RowSense::GreaterEqual, env_.v11()[x] + dq_.mean_v12,
                   "seller_iir(" + idx(x) + ")");
  }
}

void ReducedModel::add_buyer_iir_row(const RationalVector& belief) {
  std::vector<LpTerm> terms;
  for (int x = 0; x < env_.x_size(); ++x) {
    if (!belief[x].is_zero()) terms.push_back({rebate_[x], belief[x]});
  }
  lp_.add_row(std::move(terms), RowSense::GreaterEqual, Rational(0), "buyer_iir");
}

Allocation ReducedModel::reconstruct(const RationalVector& s) const {
  const int X = env_.x_size();
  const int Y = env_.y_size();
  RationalMatrix q(X, Y), t(X, Y);
  for (int x = 0; x < X; ++x) {
    Rational cum(0);
    for (int y = 0; y < Y; ++y) {
      cum += s[mu_[x][y]];
      q(x, y) = cum;
      const Rational price = env_.v21()[x] + env_.v22()[y];
      if (y == 0) {
        t(x, y) = price * q(x, y) - s[rebate_[x]];
      } else {
        t(x, y) = t(x, y - 1) + price * (q(x, y) - q(x, y - 1));
      }
    }
  }
  return Allocation::make(env_, std::move(q), std::move(t));
}

DirectModel::DirectModel(const Environment& env, LpProblem& lp)
    : env_(env), lp_(lp), mean_v12_(derive(env).mean_v12) {
  const int X = env.x_size();
  const int Y = env.y_size();
  q_.assign(X, std::vector<int>(Y));
  t_.assign(X, std::vector<int>(Y));
  for (int x = 0; x < X; ++x) {
    for (int y = 0; y < Y; ++y) {
      q_[x][y] = lp.add_variable("q(" + idx(x, y) + ")", Rational(0), Rational(0), Rational(1));
    }
  }
  for (int x = 0; x < X; ++x) {
    for (int y = 0; y < Y; ++y) t_[x][y] = lp.add_free_variable("t(" + idx(x, y) + ")");
  }
}

Affine DirectModel::seller_deviation(int report, int truth) const {
  Affine a;
  for (int y = 0; y < env_.y_size(); ++y) {
    const Rational& p = env_.p2()[y];
    a.terms.push_back({t_[report][y], p});
    a.terms.push_back({q_[report][y], -p * (env_.v11()[truth] + env_.v12()[y])});
  }
  a.constant = env_.v11()[truth] + mean_v12_;
  return a;
}

Affine DirectModel::buyer_expost(int report, int x, int y) const {
  Affine a;
  a.terms.push_back({q_[x][report], env_.v21()[x] + env_.v22()[y]});
  a.terms.push_back({t_[x][report], Rational(-1)});
  return a;
}

void DirectModel::add_seller_bic_rows() {
  for (int x = 0; x < env_.x_size(); ++x) {
    for (int xr = 0; xr < env_.x_size(); ++xr) {
      if (xr == x) continue;
      Affine lhs = seller_payoff(x);
      lhs.add(seller_deviation(xr, x), Rational(-1));
      add_constraint(lp_, lhs, RowSense::GreaterEqual, Rational(0),
                     "seller_bic(" + idx(x, xr) + ")");
    }
  }
}

void DirectModel::add_seller_iir_rows() {
  for (int x = 0; x < env_.x_size(); ++x) {
    add_constraint(lp_, seller_payoff(x), RowSense::GreaterEqual, env_.v11()[x] + mean_v12_,
                   "seller_iir(" + idx(x) + ")");
  }
}

void DirectModel::add_buyer_bic_rows(const RationalVector& belief, const std::string& tag) {
  for (int y = 0; y < env_.y_size(); ++y) {
    for (int yr = 0; yr < env_.y_size(); ++yr) {
      if (yr == y) continue;
      Affine lhs;
      for (int x = 0; x < env_.x_size(); ++x) {
        if (belief[x].is_zero()) continue;
        lhs.add(buyer_expost(y, x, y), belief[x]);
        lhs.add(buyer_expost(yr, x, y), -belief[x]);
      }
      if (lhs.terms.empty()) continue;
      add_constraint(lp_, lhs, RowSense::GreaterEqual, Rational(0),
                     "buyer_bic" + tag + "(" + idx(y, yr) + ")");
    }
  }
}

void DirectModel::add_buyer_iir_rows(const RationalVector& belief, const std::string& tag) {
  for (int y = 0; y < env_.y_size(); ++y) {
    Affine lhs;
    for (int x = 0; x < env_.x_size(); ++x) {
      if (!belief[x].is_zero()) lhs.add(buyer_expost(y, x, y), belief[x]);
    }
    add_constraint(lp_, lhs, RowSense::GreaterEqual, Rational(0),
                   "buyer_iir" + tag + "(" + idx(y) + ")");
  }
}

void DirectModel::add_epic_rows() {
  for (int x = 0; x < env_.x_size(); ++x) {
    for (int y = 0; y < env_.y_size(); ++y) {
      for (int yr = 0; yr < env_.y_size(); ++yr) {
        if (yr == y) continue;
        Affine lhs = buyer_expost(y, x, y);
        lhs.add(buyer_expost(yr, x, y), Rational(-1));
        add_constraint(lp_, lhs, RowSense::GreaterEqual, Rational(0),
                       "epic(" + idx(x, y) + "->" + idx(yr) + ")");
      }
    }
  }
}

void DirectModel::add_epir_rows() {
  for (int x = 0; x < env_.x_size(); ++x) {
    for (int y = 0; y < env_.y_size(); ++y) {
      add_constraint(lp_, buyer_expost(y, x, y), RowSense::GreaterEqual, Rational(0),
                     "epir(" + idx(x, y) + ")");
    }
  }
}

Allocation DirectModel::reconstruct(const RationalVector& s) const {
  const int X = env_.x_size();
  const int Y = env_.y_size();
  RationalMatrix q(X, Y), t(X, Y);
  for (int x = 0; x < X; ++x) {
    for (int y = 0; y < Y; ++y) {
      q(x, y) = s[q_[x][y]];
      t(x, y) = s[t_[x][y]];
    }
  }
  return Allocation::make(env_, std::move(q), std::move(t));
}

}  // namespace ipbt::models
