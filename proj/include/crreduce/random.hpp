#pragma once

// Seeded random matrices shared by the reduction and the generators.

#include <cstdint>
#include <random>

#include "crreduce/linalg.hpp"

namespace crreduce {

using Rng = std::mt19937_64;

Mat random_gaussian(Index rows, Index cols, Rng& rng);
CMat random_complex_gaussian(Index rows, Index cols, Rng& rng);

Mat random_orthogonal(Index m, Rng& rng);
CMat random_unitary(Index m, Rng& rng);

/// Q1 diag(exp(u)) Q2 with u uniform in [-spread, spread]; condition number
/// at most exp(2 spread).
Mat random_well_conditioned(Index m, Rng& rng, double spread = 0.5);
CMat random_well_conditioned_complex(Index m, Rng& rng, double spread = 0.5);

}  // namespace crreduce
