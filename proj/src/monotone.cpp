#include <stdexcept>

#include "ipbt/lp.hpp"

namespace ipbt {

MonotoneLinearResult maximize_monotone_linear(const RationalVector& c,
                                              const RationalVector& weights) {
  if (c.size() != weights.size()) throw std::invalid_argument("size mismatch");
  const int n = static_cast<int>(c.size());
  // Suffix sums S(k) = sum_{y >= k} w(y) c(y); S(n+1) = 0 is the no-trade rule.
  MonotoneLinearResult res;
  res.value = Rational(0);
  res.threshold = n + 1;
  Rational suffix(0);
  for (int k = n; k >= 1; --k) {
    suffix += weights[k - 1] * c[k - 1];
    if (suffix >= res.value) {
      res.value = suffix;
      res.threshold = k;
    }
  }
  res.rule.assign(n, Rational(0));
  for (int y = res.threshold; y <= n; ++y) res.rule[y - 1] = Rational(1);
  return res;
}

}  // namespace ipbt
