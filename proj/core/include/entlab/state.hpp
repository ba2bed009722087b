#pragma once

#include <span>
#include <vector>

namespace entlab {

// A point of a system's state space: symbols, coefficients or coordinates,
// stored as doubles. Sequence spaces store a finite prefix.
using State = std::vector<double>;
using StateView = std::span<const double>;

inline State to_state(StateView v) { return State(v.begin(), v.end()); }

}  // namespace entlab
