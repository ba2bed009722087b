#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entlab/cover.hpp"
#include "entlab/fit.hpp"
#include "entlab/space.hpp"

namespace entlab {

// Disjoint, exhaustive cell family over a finite ground set; no empty cells.
class FinitePartition {
public:
  static FinitePartition from_cells(std::size_t ground_size, std::vector<MemberSet> cells,
                                    std::vector<std::string> labels = {},
                                    std::string provenance = "");

  std::size_t ground_size() const { return ground_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<MemberSet>& cells() const { return cells_; }
  const MemberSet& cell(std::size_t k) const { return cells_[k]; }
  std::int32_t cell_of(std::size_t point) const { return cell_of_[point]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& provenance() const { return provenance_; }

  Cover as_cover() const { return Cover::from_members(ground_, cells_); }

private:
  FinitePartition() = default;
  std::size_t ground_ = 0;
  std::vector<MemberSet> cells_;
  std::vector<std::int32_t> cell_of_;
  std::vector<std::string> labels_;
  std::string provenance_;
};

// Nonnegative weights on the cells of a partition, total mass in [0, 1].
struct CellMeasure {
  std::vector<double> weights;

  double mass() const;
};

// Nonnegative weights on the ground points, total mass in [0, 1].
struct PointMeasure {
  std::vector<double> weights;

  double mass() const;
  CellMeasure on(const FinitePartition& partition) const;
};

// Sum of w log(1/w) with the 0 log(1/0) := 0 convention. Negative weights are
// a validation error.
double partition_entropy(const CellMeasure& mu, const FinitePartition& partition);
double partition_entropy(const PointMeasure& mu, const FinitePartition& partition);

// C v T^-1 C v ... v T^-(n-1) C through the discretized dynamics; cells carry
// itinerary labels built from the base labels.
FinitePartition refine_partition(const FinitePartition& c, const DiscreteMap& map,
                                 std::size_t n);

struct KSReport {
  std::vector<double> per_n_entropy;   // H_mu(C^n)
  std::vector<double> per_n_rate;      // H_mu(C^n) / n
  std::vector<std::size_t> per_n_cells;
  std::string partition;   // provenance and size of the partition used
  double rate = 0.0;       // slope of H_mu(C^n) vs n over the trailing half
  double terminal = 0.0;   // H(n_max) / n_max
  double mass = 0.0;
  double mass_correction = 0.0;  // m log(1/m), 0 at m in {0, 1}
  bool invariant = true;
  double invariance_gap = 0.0;
  std::size_t window_lo = 0, window_hi = 0;
};

// Partition-entropy growth rate. Invariance of mu is checked on the base
// cells at 1e-9 and flagged, not enforced. The slope of H vs n absorbs the
// constant mass term, so scaling commutes with the estimate.
KSReport ks_rate(const PointMeasure& mu, const FinitePartition& c, const DiscreteMap& map,
                 std::size_t n_max);

// alpha * mu; requires alpha >= 0 and alpha * mass <= 1.
CellMeasure scaled_measure(const CellMeasure& mu, double alpha);
PointMeasure scaled_measure(const PointMeasure& mu, double alpha);

struct EmpiricalMeasures {
  PointMeasure sigma_points;  // uniform on the separated set
  PointMeasure mu_points;     // orbit average (1/n) sum_j T^j_* sigma
  CellMeasure sigma;
  CellMeasure mu;
};

// The separated-set measures sigma_n and mu_n, attributed to the cells of the
// supplied partition. Masses are exactly 1.
EmpiricalMeasures empirical_measures(const std::vector<std::uint32_t>& separated_set,
                                     const DiscreteMap& map, std::size_t n,
                                     const FinitePartition& partition);

struct MisiurewiczReport {
  double lhs = 0.0;  // (q/n) log |E|
  double rhs = 0.0;  // H_{mu_n}(C^q) + (2 q^2 / n) log k
  double slack = 0.0;
  bool holds = false;
};

// Requires every cell of C to have base-metric diameter < eps; the report
// evaluates both sides of the counting inequality.
MisiurewiczReport misiurewicz_bound_check(const SampledSpace& space,
                                          const std::vector<std::uint32_t>& separated_set,
                                          const DiscreteMap& map, const FinitePartition& c,
                                          std::size_t q, std::size_t n, double eps);

// Greedy ball-difference partition with deterministic radius 3*eps/4, so cell
// diameters stay at or below 2*eps (callers wanting < eps pass eps/2). On a
// finite sample every radius gives measure-zero cell boundaries; the optional
// measure is only validated, it does not steer the radius.
FinitePartition build_fine_partition(const SampledSpace& space, const Metric& metric,
                                     double eps,
                                     const PointMeasure* boundary_measure = nullptr);

// Depth-d cylinder partition of a word grid; cells labeled by the prefix.
FinitePartition cylinder_partition(const SampledSpace& space, std::size_t depth);

// Product measure on a word grid with the given symbol probabilities.
PointMeasure bernoulli_measure(const SampledSpace& space,
                               const std::vector<double>& symbol_probs);

// {"cells": [[indices]], "weights": [reals]} (weights optional)
std::string partition_to_json(const FinitePartition& partition,
                              const CellMeasure* weights = nullptr);
std::pair<FinitePartition, std::optional<CellMeasure>> partition_from_json(
    const std::string& text);

}  // namespace entlab
