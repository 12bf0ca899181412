#pragma once

#include "acqfam/interval.hpp"
#include "acqfam/rng.hpp"

#include <Eigen/Core>

namespace acqfam {

// Latin hypercube sample of n points: per dimension, the n strata are
// permuted and a uniform jitter is drawn within each cell, so every
// one-dimensional projection occupies all n strata. Points are returned as
// columns. Deterministic given the generator state.
Eigen::MatrixXd latin_hypercube(int n, const Bounds& bounds, CounterRng& rng);

// Convenience overload seeding a fresh stream.
Eigen::MatrixXd latin_hypercube(int n, const Bounds& bounds, std::uint64_t seed);

} // namespace acqfam
