#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "entlab/system.hpp"

namespace entlab {

struct RankProfile {
  std::vector<std::size_t> ranks;     // rank(A^0), rank(A^1), ...
  std::size_t stabilization_index = 0;  // least n with rank(A^n) = rank(A^n+1)
};

// Ranks of successive powers until they stabilize (at most dim steps).
// Rank by full-pivot elimination at tolerance 1e-10 relative to the scaled
// power; pivots inside the ambiguity band raise IndeterminateError.
RankProfile rank_stabilization_index(const std::vector<double>& matrix_row_major,
                                     std::size_t dim);

struct EntropyPrediction {
  double value = 0.0;
  std::string rationale;
};

// Linear maps on R^d predict 0. Torus endomorphisms predict the classical
// sum of log|lambda| over eigenvalues outside the unit circle, used as the
// cross-check oracle for the grid estimator.
EntropyPrediction entropy_prediction(const System& system);

}  // namespace entlab
