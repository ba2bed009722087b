#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "entlab/metric.hpp"
#include "entlab/space.hpp"
#include "entlab/system.hpp"

namespace entlab {

enum class PackMethod { Greedy, Exact };

struct PackingResult {
  std::size_t n = 1;
  double eps = 0.0;
  unsigned long long count = 0;
  double log_count = 0.0;                // natural log, exact for formula paths
  std::vector<std::uint32_t> selected;   // empty for formula-only paths
  PackMethod method = PackMethod::Greedy;
  std::string algorithm;                 // cylinder | interval | max_clique | lattice_greedy | greedy_cover | exact_cover
};

struct PackOptions {
  PackMethod mode = PackMethod::Greedy;
  bool force_scan = false;        // bypass cylinder/interval closed forms
  Metric metric_override;         // defaults to the space's canonical metric
};

// Maximal (greedy, lattice order) or maximum (exact, small instances)
// (n, eps)-separated subset: all selected pairs have d_n > eps.
PackingResult max_separated(const SampledSpace& space, const System& system,
                            std::size_t n, double eps, const PackOptions& = {});

// (n, eps)-spanning set: open d_n-balls of radius eps around the selected
// points cover the sample. Greedy set cover, exact when the instance is small
// or a closed form applies.
PackingResult min_spanning(const SampledSpace& space, const System& system,
                           std::size_t n, double eps, const PackOptions& = {});

// Exact integers for N(balls(d_n,eps)) <= s(n,eps) <= N(balls(d_n,eps/2)).
struct SandwichReport {
  unsigned long long cover_at_eps = 0;
  unsigned long long separated = 0;
  unsigned long long cover_at_half_eps = 0;
  bool holds = false;
};
SandwichReport sandwich_check(const SampledSpace& space, const System& system,
                              std::size_t n, double eps);

// d_n decisions between sample points. Shift systems are evaluated by symbol
// offsets, everything else through an exact orbit table.
class PairEvaluator {
public:
  PairEvaluator(const SampledSpace& space, const System& system, const Metric& metric,
                std::size_t n);
  ~PairEvaluator();
  PairEvaluator(PairEvaluator&&) noexcept;

  bool separated(std::size_t i, std::size_t j, double eps) const;  // d_n > eps
  bool within(std::size_t i, std::size_t j, double eps) const;     // d_n < eps
  double distance(std::size_t i, std::size_t j) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct EpsRate {
  double eps = 0.0;
  double rate_window = 0.0;    // slope of log s(n,eps) over the valid trailing window
  double rate_terminal = 0.0;  // (1/n) log s at the last valid n
  double residual = 0.0;
  std::size_t window_lo = 0, window_hi = 0;  // indices into n_range
  bool saturated = false;            // counts constant across the window
  bool resolution_limited = false;   // rows above the grid-resolution budget dropped
  bool disagreement = false;         // window and terminal differ by > 10%
  bool sandwich_recorded = false;
  double sandwich_log_lo = 0.0;      // log N(balls eps) at the terminal n
  double sandwich_log_hi = 0.0;      // log N(balls eps/2)
};

struct GridCell {
  double eps = 0.0;
  std::size_t n = 0;
  unsigned long long count = 0;
  double log_count = 0.0;
  PackMethod method = PackMethod::Greedy;
  std::string algorithm;
  bool resolution_limited = false;
};

struct EntropyEstimate {
  std::string system_name;
  std::string metric_name;
  std::vector<GridCell> cells;
  std::vector<EpsRate> per_eps;
  double estimate = 0.0;  // max over eps of rate_window
};

struct EstimateOptions {
  bool force_scan = false;
  // Greedy counts above fraction * grid size exhaust the sample's resolution
  // and are excluded from the rate window. Formula paths are never excluded.
  double resolution_fraction = 0.5;
  bool with_sandwich = true;
  bool parallel = true;
  Metric metric_override;
  // Checkpoint hooks: preload returns true when the cell is already known;
  // on_cell fires after each computed cell (serialized by the estimator).
  std::function<bool(double eps, std::size_t n, GridCell&)> preload;
  std::function<void(const GridCell&)> on_cell;
};

// s(n,eps) over the grid, per-eps trailing-window growth rates, and the
// overall estimate sup_eps of the per-eps rates.
EntropyEstimate bowen_entropy_estimate(const SampledSpace& space, const System& system,
                                       const std::vector<double>& eps_grid,
                                       const std::vector<std::size_t>& n_range,
                                       const EstimateOptions& = {});

// Per-grid rows: system,metric,eps,n,count,method,log_count,rate_window
void write_grid_csv(std::ostream& os, const EntropyEstimate& e);

}  // namespace entlab
