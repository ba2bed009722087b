#include "entlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "json.hpp"

namespace entlab {

FinitePartition FinitePartition::from_cells(std::size_t ground_size,
                                            std::vector<MemberSet> cells,
                                            std::vector<std::string> labels,
                                            std::string provenance) {
  if (ground_size == 0) throw ValidationError("partition: empty ground set");
  FinitePartition p;
  p.ground_ = ground_size;
  p.cell_of_.assign(ground_size, -1);
  for (auto& raw : cells) {
    MemberSet cell = normalized_member(std::move(raw));
    if (cell.empty()) throw ValidationError("partition: empty cell");
    if (cell.back() >= ground_size)
      throw ValidationError("partition: cell index outside ground set");
    for (auto v : cell) {
      if (p.cell_of_[v] >= 0)
        throw ValidationError("partition: element " + std::to_string(v) +
                              " lies in two cells");
      p.cell_of_[v] = std::int32_t(p.cells_.size());
    }
    p.cells_.push_back(std::move(cell));
  }
  for (std::size_t v = 0; v < ground_size; ++v)
    if (p.cell_of_[v] < 0)
      throw ValidationError("partition: element " + std::to_string(v) +
                            " is in no cell");
  if (!labels.empty() && labels.size() != p.cells_.size())
    throw ValidationError("partition: label count mismatch");
  if (labels.empty()) {
    labels.reserve(p.cells_.size());
    for (std::size_t k = 0; k < p.cells_.size(); ++k) labels.push_back(std::to_string(k));
  }
  p.labels_ = std::move(labels);
  p.provenance_ = std::move(provenance);
  return p;
}

double CellMeasure::mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

double PointMeasure::mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

CellMeasure PointMeasure::on(const FinitePartition& partition) const {
  if (weights.size() != partition.ground_size())
    throw DimensionError("point measure: ground size mismatch");
  CellMeasure out;
  out.weights.assign(partition.size(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i)
    out.weights[std::size_t(partition.cell_of(i))] += weights[i];
  return out;
}

namespace {

double entropy_of_weights(const std::vector<double>& w) {
  double h = 0.0;
  for (double v : w) {
    if (v < 0.0)
      throw ValidationError("partition entropy: negative weight " + std::to_string(v));
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace

double partition_entropy(const CellMeasure& mu, const FinitePartition& partition) {
  if (mu.weights.size() != partition.size())
    throw DimensionError("partition entropy: weight/cell count mismatch");
  return entropy_of_weights(mu.weights);
}

double partition_entropy(const PointMeasure& mu, const FinitePartition& partition) {
  return entropy_of_weights(mu.on(partition).weights);
}

FinitePartition refine_partition(const FinitePartition& c, const DiscreteMap& map,
                                 std::size_t n) {
  if (n == 0) throw RangeError("refine_partition: n must be >= 1");
  const std::size_t m = c.ground_size();
  if (map.next.size() != m)
    throw ValidationError("refine_partition: map size does not match ground set");

  // itinerary of base-cell ids along the discrete orbit
  std::vector<std::vector<std::int32_t>> itinerary(m, std::vector<std::int32_t>(n));
  for (std::size_t i = 0; i < m; ++i) {
    std::uint32_t cur = std::uint32_t(i);
    for (std::size_t j = 0; j < n; ++j) {
      itinerary[i][j] = c.cell_of(cur);
      cur = map.next[cur];
    }
  }
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<MemberSet> cells;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < m; ++i) {
    std::string key;
    for (std::int32_t v : itinerary[i]) {
      key += std::to_string(v);
      key.push_back('.');
    }
    auto [it, fresh] = ids.try_emplace(key, cells.size());
    if (fresh) {
      cells.emplace_back();
      std::string label;
      for (std::size_t j = 0; j < n; ++j) {
        if (j) label.push_back('-');
        label += c.labels()[std::size_t(itinerary[i][j])];
      }
      labels.push_back(std::move(label));
    }
    cells[it->second].push_back(std::uint32_t(i));
  }
  return FinitePartition::from_cells(m, std::move(cells), std::move(labels),
                                     c.provenance());
}

KSReport ks_rate(const PointMeasure& mu, const FinitePartition& c, const DiscreteMap& map,
                 std::size_t n_max) {
  if (n_max == 0) throw RangeError("ks_rate: n_max must be >= 1");
  const std::size_t m = c.ground_size();
  if (mu.weights.size() != m) throw DimensionError("ks_rate: measure size mismatch");

  KSReport rep;
  rep.partition = (c.provenance().empty() ? std::string("cells") : c.provenance()) +
                  "(" + std::to_string(c.size()) + ")";
  rep.mass = mu.mass();
  rep.mass_correction = rep.mass > 0.0 ? rep.mass * std::log(1.0 / rep.mass) : 0.0;
  if (rep.mass < -1e-12 || rep.mass > 1.0 + 1e-9)
    throw ValidationError("ks_rate: total mass outside [0, 1]");

  // invariance on base cells: mu(T^-1 cell) vs mu(cell)
  {
    CellMeasure direct = mu.on(c);
    std::vector<double> pulled(c.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      pulled[std::size_t(c.cell_of(map.next[i]))] += mu.weights[i];
    double gap = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
      gap = std::max(gap, std::abs(pulled[k] - direct.weights[k]));
    rep.invariance_gap = gap;
    rep.invariant = gap <= 1e-9;
  }

  // incremental refinement: class id of each point extends by the base cell
  // of the next orbit step
  std::vector<std::size_t> cls(m);
  std::vector<std::uint32_t> orbit(m);
  for (std::size_t i = 0; i < m; ++i) {
    cls[i] = std::size_t(c.cell_of(i));
    orbit[i] = map.next[i];
  }
  std::size_t classes = c.size();
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n > 1) {
      std::unordered_map<std::uint64_t, std::size_t> ids;
      ids.reserve(m);
      std::vector<std::size_t> next_cls(m);
      for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t key =
            std::uint64_t(cls[i]) * std::uint64_t(c.size()) +
            std::uint64_t(c.cell_of(orbit[i]));
        auto [it, fresh] = ids.try_emplace(key, ids.size());
        next_cls[i] = it->second;
      }
      cls.swap(next_cls);
      classes = ids.size();
      for (std::size_t i = 0; i < m; ++i) orbit[i] = map.next[orbit[i]];
    }
    std::vector<double> w(classes, 0.0);
    for (std::size_t i = 0; i < m; ++i) w[cls[i]] += mu.weights[i];
    const double h = entropy_of_weights(w);
    rep.per_n_entropy.push_back(h);
    rep.per_n_rate.push_back(h / double(n));
    rep.per_n_cells.push_back(classes);
  }

  auto [lo, hi] = trailing_half(rep.per_n_entropy.size());
  rep.window_lo = lo;
  rep.window_hi = hi;
  std::vector<double> xs, ys;
  for (std::size_t i = lo; i < hi; ++i) {
    xs.push_back(double(i + 1));
    ys.push_back(rep.per_n_entropy[i]);
  }
  rep.rate = fit_line(xs, ys).slope;
  rep.terminal = rep.per_n_rate.back();
  return rep;
}

CellMeasure scaled_measure(const CellMeasure& mu, double alpha) {
  if (alpha < 0.0) throw RangeError("scaled_measure: alpha must be nonnegative");
  if (alpha * mu.mass() > 1.0 + 1e-12)
    throw RangeError("scaled_measure: alpha * mass exceeds 1");
  CellMeasure out = mu;
  for (double& w : out.weights) w *= alpha;
  return out;
}

PointMeasure scaled_measure(const PointMeasure& mu, double alpha) {
  if (alpha < 0.0) throw RangeError("scaled_measure: alpha must be nonnegative");
  if (alpha * mu.mass() > 1.0 + 1e-12)
    throw RangeError("scaled_measure: alpha * mass exceeds 1");
  PointMeasure out = mu;
  for (double& w : out.weights) w *= alpha;
  return out;
}

EmpiricalMeasures empirical_measures(const std::vector<std::uint32_t>& separated_set,
                                     const DiscreteMap& map, std::size_t n,
                                     const FinitePartition& partition) {
  if (separated_set.empty())
    throw ValidationError("empirical_measures: separated set is empty");
  if (n == 0) throw RangeError("empirical_measures: n must be >= 1");
  const std::size_t m = partition.ground_size();
  if (map.next.size() != m)
    throw ValidationError("empirical_measures: map size mismatch");

  EmpiricalMeasures out;
  out.sigma_points.weights.assign(m, 0.0);
  const double unit = 1.0 / double(separated_set.size());
  for (auto i : separated_set) {
    if (i >= m) throw ValidationError("empirical_measures: point index out of range");
    out.sigma_points.weights[i] += unit;
  }

  std::vector<double> cur = out.sigma_points.weights;
  std::vector<double> acc = cur;
  std::vector<double> next(m);
  for (std::size_t j = 1; j < n; ++j) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (cur[i] != 0.0) next[map.next[i]] += cur[i];
    cur.swap(next);
    for (std::size_t i = 0; i < m; ++i) acc[i] += cur[i];
  }
  out.mu_points.weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.mu_points.weights[i] = acc[i] / double(n);

  out.sigma = out.sigma_points.on(partition);
  out.mu = out.mu_points.on(partition);
  return out;
}

MisiurewiczReport misiurewicz_bound_check(const SampledSpace& space,
                                          const std::vector<std::uint32_t>& separated_set,
                                          const DiscreteMap& map, const FinitePartition& c,
                                          std::size_t q, std::size_t n, double eps) {
  if (q == 0 || n == 0) throw RangeError("misiurewicz_bound_check: q, n must be >= 1");
  if (c.ground_size() != space.size())
    throw ValidationError("misiurewicz_bound_check: partition ground mismatch");

  // cells must be eps-small in the base metric
  const Metric& metric = space.metric();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto& cell = c.cell(k);
    for (std::size_t a = 0; a < cell.size(); ++a)
      for (std::size_t b = a + 1; b < cell.size(); ++b)
        if (metric(space.point(cell[a]), space.point(cell[b])) >= eps)
          throw PreconditionError("misiurewicz_bound_check: cell " + std::to_string(k) +
                                  " has diameter >= eps");
  }

  const EmpiricalMeasures em = empirical_measures(separated_set, map, n, c);
  const FinitePartition cq = refine_partition(c, map, q);

  MisiurewiczReport rep;
  rep.lhs = double(q) / double(n) * std::log(double(separated_set.size()));
  rep.rhs = partition_entropy(em.mu_points, cq) +
            (2.0 * double(q) * double(q) / double(n)) * std::log(double(c.size()));
  rep.slack = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs + 1e-9;
  return rep;
}

FinitePartition build_fine_partition(const SampledSpace& space, const Metric& metric,
                                     double eps, const PointMeasure* boundary_measure) {
  if (!(eps > 0.0)) throw RangeError("build_fine_partition: eps must be positive");
  if (boundary_measure && boundary_measure->weights.size() != space.size())
    throw DimensionError("build_fine_partition: measure size mismatch");
  const std::size_t m = space.size();
  if (eps >= metric.diameter()) {
    // the trivial partition already has cell diameter <= eps
    MemberSet all(m);
    for (std::size_t i = 0; i < m; ++i) all[i] = std::uint32_t(i);
    return FinitePartition::from_cells(m, {std::move(all)}, {}, "ball-difference");
  }
  // Deterministic midpoint radius: on a finite sample every radius in
  // [eps/2, eps] gives measure-zero cell boundaries, so the measure does not
  // steer the choice.
  const double radius = 0.75 * eps;

  std::vector<MemberSet> balls(m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t j = 0; j < m; ++j)
      if (metric(space.point(c), space.point(j)) < radius)
        balls[c].push_back(std::uint32_t(j));

  // small greedy ball cover, then consecutive differences in pick order
  std::vector<std::uint8_t> covered(m, 0);
  std::size_t open = m;
  std::vector<MemberSet> cells;
  while (open > 0) {
    std::size_t pick = m, gain = 0;
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t g = 0;
      for (auto v : balls[c]) g += !covered[v];
      if (g > gain) {
        gain = g;
        pick = c;
      }
    }
    if (pick == m)
      throw ValidationError("build_fine_partition: a point escaped every ball");
    MemberSet cell;
    for (auto v : balls[pick]) {
      if (!covered[v]) {
        covered[v] = 1;
        --open;
        cell.push_back(v);
      }
    }
    cells.push_back(std::move(cell));
  }
  return FinitePartition::from_cells(m, std::move(cells), {}, "ball-difference");
}

FinitePartition cylinder_partition(const SampledSpace& space, std::size_t depth) {
  auto w = space.words_info();
  std::size_t usable = 0;
  if (w) {
    usable = w->length;
  } else if (auto pw = space.product_words_info()) {
    usable = (*pw)[0].length;  // cylinders on the first factor
  } else {
    throw UsageError("cylinder_partition: space is not a word lattice");
  }
  if (depth == 0 || depth > usable)
    throw RangeError("cylinder_partition: depth must lie in [1, " +
                     std::to_string(usable) + "]");
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<MemberSet> cells;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const StateView x = space.point(i);
    std::string key;
    for (std::size_t j = 0; j < depth; ++j) key += std::to_string(int(x[j]));
    auto [it, fresh] = ids.try_emplace(key, cells.size());
    if (fresh) {
      cells.emplace_back();
      labels.push_back(key);
    }
    cells[it->second].push_back(std::uint32_t(i));
  }
  return FinitePartition::from_cells(space.size(), std::move(cells), std::move(labels),
                                     "cylinder");
}

PointMeasure bernoulli_measure(const SampledSpace& space,
                               const std::vector<double>& symbol_probs) {
  auto w = space.words_info();
  if (!w) throw UsageError("bernoulli_measure: space is not a word lattice");
  if (symbol_probs.size() != w->alphabet)
    throw DimensionError("bernoulli_measure: needs one probability per symbol");
  double total = 0.0;
  for (double p : symbol_probs) {
    if (p < 0.0) throw ValidationError("bernoulli_measure: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("bernoulli_measure: probabilities must sum to 1");

  PointMeasure mu;
  mu.weights.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const StateView x = space.point(i);
    double p = 1.0;
    for (std::size_t j = 0; j < w->length; ++j) p *= symbol_probs[std::size_t(x[j])];
    mu.weights[i] = p;
  }
  return mu;
}

std::string partition_to_json(const FinitePartition& partition, const CellMeasure* weights) {
  nlohmann::json j;
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& c : partition.cells()) cells.push_back(c);
  if (weights) {
    if (weights->weights.size() != partition.size())
      throw DimensionError("partition_to_json: weight count mismatch");
    j["weights"] = weights->weights;
  }
  return j.dump();
}

std::pair<FinitePartition, std::optional<CellMeasure>> partition_from_json(
    const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("cells")) throw ValidationError("partition json: needs cells");
  std::vector<MemberSet> cells;
  std::uint32_t top = 0;
  for (const auto& c : j["cells"]) {
    cells.push_back(c.get<MemberSet>());
    for (auto v : cells.back()) top = std::max(top, v);
  }
  FinitePartition p = FinitePartition::from_cells(top + 1, std::move(cells));
  std::optional<CellMeasure> mu;
  if (j.contains("weights")) {
    mu = CellMeasure{j["weights"].get<std::vector<double>>()};
    if (mu->weights.size() != p.size())
      throw ValidationError("partition json: weight count mismatch");
  }
  return {std::move(p), std::move(mu)};
}

}  // namespace entlab
