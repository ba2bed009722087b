#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entlab/metric.hpp"
#include "entlab/state.hpp"
#include "entlab/system.hpp"

namespace entlab {

enum class GridKind {
  Explicit,           // listed points, linear-scan locate
  Words,              // all words of a fixed length over an alphabet
  ProductWords,       // product of word lattices
  TorusLattice,       // uniform lattice on [0,1)^g
  ArctanLine,         // uniform in arctan coordinate over [-W, W]
  IntervalLine,       // uniform lattice on [-W, W]
  ContinuumInterval   // no points; [-W, W] handled by closed-form packing
};

struct GridOptions {
  double core_halfwidth = 10.0;    // compact core |x| <= W for line grids
  std::size_t truncation = 0;      // word length override; 0 derives from delta
  std::size_t max_points = std::size_t(1) << 22;
};

// A finite delta-dense stand-in for the state space. Immutable after
// construction; coordinates are stored flat (size * dim).
class SampledSpace {
public:
  std::size_t size() const { return size_; }
  std::size_t dim() const { return dim_; }
  StateView point(std::size_t i) const {
    return StateView(coords_.data() + i * dim_, dim_);
  }
  double mesh() const { return mesh_; }
  GridKind kind() const { return kind_; }
  const Metric& metric() const { return metric_; }

  bool in_core(std::size_t i) const { return core_.empty() ? true : core_[i] != 0; }
  bool all_core() const;

  // Nearest sample of an arbitrary state (lattice arithmetic where the grid
  // has structure, metric scan for Explicit).
  std::size_t locate(StateView x) const;

  struct WordsInfo {
    std::size_t alphabet = 0;
    std::size_t length = 0;
  };
  struct TorusInfo {
    std::size_t dims = 0;
    std::size_t resolution = 0;
  };
  struct LineInfo {
    double halfwidth = 0.0;
    std::size_t count = 0;
  };

  std::optional<WordsInfo> words_info() const;
  std::optional<std::vector<WordsInfo>> product_words_info() const;
  std::optional<TorusInfo> torus_info() const;
  std::optional<LineInfo> line_info() const;

  static SampledSpace explicit_points(std::vector<State> points, Metric metric,
                                      double mesh,
                                      std::vector<std::uint8_t> core_flags = {});
  // [-W, W] with no sample points; only closed-form packing paths accept it.
  static SampledSpace continuum_interval(double halfwidth, Metric metric);

  friend SampledSpace sample_grid(const System&, double, const GridOptions&);

private:
  SampledSpace() = default;

  std::size_t size_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  double mesh_ = 0.0;
  std::vector<std::uint8_t> core_;
  GridKind kind_ = GridKind::Explicit;
  Metric metric_;

  WordsInfo words_{};
  std::vector<WordsInfo> product_words_;
  TorusInfo torus_{};
  LineInfo line_{};
};

// Deterministic delta-dense lattice of the system's fundamental domain or
// declared compact core. Throws ResourceError (with the required count) when
// the lattice would exceed options.max_points.
SampledSpace sample_grid(const System& system, double delta,
                         const GridOptions& options = {});

// Grid-discretized dynamics: each sample maps forward to its nearest sample.
struct DiscreteMap {
  std::vector<std::uint32_t> next;

  std::uint32_t step(std::uint32_t i) const { return next[i]; }
  std::uint32_t orbit(std::uint32_t i, std::size_t j) const {
    while (j--) i = next[i];
    return i;
  }
};

DiscreteMap discretize(const SampledSpace& space, const System& system);

// Exact orbits T^j(x_i) for j < horizon, flattened for cache-friendly d_n
// evaluation.
class OrbitTable {
public:
  OrbitTable(const SampledSpace& space, const System& system, std::size_t horizon);

  StateView at(std::size_t i, std::size_t j) const {
    return StateView(data_.data() + (i * horizon_ + j) * dim_, dim_);
  }
  std::size_t horizon() const { return horizon_; }

private:
  std::size_t horizon_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace entlab
