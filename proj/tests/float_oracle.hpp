#pragma once

// Floating-point brute-force oracles, independent of the exact solvers.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "ipbt/lp.hpp"

namespace ipbt::testing {

struct FloatTransport {
  bool found = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> q;  // row-major
};

/// Enumerates every assignment of each cell to {0, 1, free}; for each, the
/// equality-constrained minimizer over the free cells via a pseudo-inverse.
/// The global minimizer is the best candidate lying inside [0, 1].
/// Needs positive weights and at most 8 cells.
inline FloatTransport brute_force_transport(const QuadTransportProblem& p) {
  const int R = static_cast<int>(p.row_weight.size());
  const int C = static_cast<int>(p.col_weight.size());
  const int n = R * C;
  std::vector<double> rw(R), cw(C), rt(R), ct(C);
  for (int x = 0; x < R; ++x) rw[x] = p.row_weight[x].to_double(), rt[x] = p.row_target[x].to_double();
  for (int y = 0; y < C; ++y) cw[y] = p.col_weight[y].to_double(), ct[y] = p.col_target[y].to_double();

  FloatTransport best;
  int patterns = 1;
  for (int i = 0; i < n; ++i) patterns *= 3;
  std::vector<int> state(n);
  for (int code = 0; code < patterns; ++code) {
    int c = code;
    std::vector<int> free_cells;
    std::vector<double> q(n, 0.0);
    for (int i = 0; i < n; ++i) {
      state[i] = c % 3;
      c /= 3;
      if (state[i] == 1) q[i] = 1.0;
      if (state[i] == 2) free_cells.push_back(i);
    }
    Eigen::VectorXd b(R + C);
    for (int x = 0; x < R; ++x) b(x) = rt[x];
    for (int y = 0; y < C; ++y) b(R + y) = ct[y];
    for (int i = 0; i < n; ++i) {
      if (state[i] != 1) continue;
      b(i / C) -= cw[i % C];
      b(R + i % C) -= rw[i / C];
    }
    const int f = static_cast<int>(free_cells.size());
    if (f > 0) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(R + C, f);
      Eigen::VectorXd winv(f);
      for (int k = 0; k < f; ++k) {
        const int x = free_cells[k] / C, y = free_cells[k] % C;
        A(x, k) = cw[y];
        A(R + y, k) = rw[x];
        winv(k) = 1.0 / (rw[x] * cw[y]);
      }
      const Eigen::MatrixXd K = A * winv.asDiagonal() * A.transpose();
      const Eigen::VectorXd mu = K.completeOrthogonalDecomposition().solve(b);
      const Eigen::VectorXd sol = winv.asDiagonal() * A.transpose() * mu;
      if ((A * sol - b).norm() > 1e-9) continue;
      bool inside = true;
      for (int k = 0; k < f; ++k) {
        if (sol(k) < -1e-12 || sol(k) > 1 + 1e-12) inside = false;
        q[free_cells[k]] = sol(k);
      }
      if (!inside) continue;
    } else if (b.norm() > 1e-9) {
      continue;
    }
    double obj = 0;
    for (int i = 0; i < n; ++i) obj += rw[i / C] * cw[i % C] * q[i] * q[i];
    if (obj < best.objective - 1e-15) {
      best.found = true;
      best.objective = obj;
      best.q = q;
    }
  }
  return best;
}

}  // namespace ipbt::testing
