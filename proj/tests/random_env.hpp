#pragma once

// Random instances for property tests and the acceptance binary.

#include <random>

#include "ipbt/environment.hpp"
#include "ipbt/lp.hpp"

namespace ipbt::testing {

using Rng = std::mt19937_64;

/// Rational with numerator in [lo, hi] and denominator in {1, 2, 3}.
Rational small_rational(Rng& rng, int lo, int hi);

/// Valid environment with 1..max_x seller and 1..max_y buyer types, priors
/// with small integer weights and valuations with small-denominator steps.
Environment random_environment(Rng& rng, int max_x = 4, int max_y = 4);

/// A vertex of the prior-feasible set (direct formulation) for a random
/// objective on q and U1, mixed with the no-trade allocation.
Allocation random_feasible_allocation(const Environment& env, Rng& rng);

/// Quad transport instance whose marginals come from a random q in [0, 1].
QuadTransportProblem random_transport_problem(Rng& rng, int rows, int cols);

}  // namespace ipbt::testing
