#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entlab/fit.hpp"
#include "entlab/metric.hpp"
#include "entlab/space.hpp"

namespace entlab {

// Sorted, duplicate-free element indices of a SampledSpace.
using MemberSet = std::vector<std::uint32_t>;

MemberSet normalized_member(MemberSet m);
bool is_subset(const MemberSet& a, const MemberSet& b);
MemberSet intersect(const MemberSet& a, const MemberSet& b);

// A cover of a finite ground set. Members are deduplicated; the union must
// equal the ground set. Immutable after construction.
class Cover {
public:
  static Cover from_members(std::size_t ground_size, std::vector<MemberSet> members,
                            bool pre_admissible = false);
  static Cover whole_space(std::size_t ground_size);
  static Cover singletons(std::size_t ground_size);
  // Open balls of `radius` around every element, under a pairwise distance.
  static Cover balls(std::size_t ground_size,
                     const std::function<double(std::size_t, std::size_t)>& distance,
                     double radius);

  std::size_t ground_size() const { return ground_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<MemberSet>& members() const { return members_; }
  const MemberSet& member(std::size_t k) const { return members_[k]; }

  // Set when the cover is a pre-admissible cover or an iterate of one.
  bool from_pre_admissible() const { return pre_admissible_; }

  bool operator==(const Cover& o) const {
    return ground_ == o.ground_ && members_ == o.members_;
  }

private:
  Cover() = default;
  std::size_t ground_ = 0;
  std::vector<MemberSet> members_;
  bool pre_admissible_ = false;
};

// Coarsest common refinement: nonempty pairwise intersections, deduplicated.
Cover join(const Cover& a, const Cover& b);

// True iff every member of `a` lies inside some member of `b` (b precedes a
// in the refinement preorder).
bool refines(const Cover& a, const Cover& b);

// A join T^0 A v T^-1 A v ... v T^-(n-1) A over the grid, preimages taken
// through the discretized map. n must be >= 1.
Cover iterate_cover(const Cover& a, const DiscreteMap& map, std::size_t n);

// Certified interval for the least subcover cardinality. exact implies
// lower == upper. Forced members (elements covered exactly once) are resolved
// first, so disjoint families of any size stay exact; the residual search is
// exact up to 24 undetermined members and a greedy/trivial interval beyond.
struct SubcoverCount {
  std::size_t lower = 0;
  std::size_t upper = 0;
  bool exact = true;

  std::size_t value() const { return upper; }
};

SubcoverCount min_subcover_cardinality(const Cover& a,
                                       const std::optional<MemberSet>& restrict_to = {});

// Admissible means: an iterate of a pre-admissible cover, or the cover itself
// has a member whose complement lies inside the compact core.
bool is_admissible(const Cover& a, const SampledSpace& space);

// Largest radius from the dyadic grid {diam / 2^k} such that every sampled
// ball of that radius lies inside some member. Guarantees
// refines(balls(metric, result), a) on the sample.
double lebesgue_number(const Cover& a, const SampledSpace& space, const Metric& metric);

struct CoverEntropyReport {
  std::vector<std::size_t> n;
  std::vector<SubcoverCount> counts;
  std::vector<double> log_counts;       // natural log of N(A^n)
  std::vector<double> per_step;         // (1/n) log N(A^n)
  LineFit fit;                          // log N vs n over the trailing half
  double rate_nats = 0.0;
  double rate_bits = 0.0;
  std::size_t window_lo = 0, window_hi = 0;
  bool all_exact = true;
  bool admissible = false;
};

CoverEntropyReport cover_entropy_rate(const Cover& a, const DiscreteMap& map,
                                      std::size_t n_max, bool admissible_flag = false);

// {"ground_size": M, "members": [[indices]]}
std::string cover_to_json(const Cover& a);
Cover cover_from_json(const std::string& text);

}  // namespace entlab
