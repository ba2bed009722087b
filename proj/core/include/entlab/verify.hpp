#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entlab/space.hpp"
#include "entlab/system.hpp"

namespace entlab {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  std::size_t failures() const;
};

struct VerifyOptions {
  std::string fixtures_dir;          // optional cover/partition fixtures to validate
  std::size_t sandwich_instances = 50;
  bool heavy = true;                 // include the long grid cross-checks
};

// suite: covers | bowen | measures | systems | variational | all
VerifyReport run_verify(const std::string& suite, std::uint64_t seed,
                        const VerifyOptions& options = {});

// A seeded scatter of points in the unit square under the capped Euclidean
// metric, with a uniformly random self-map. Shared by the verify suites and
// the acceptance runs.
struct RandomInstance {
  SampledSpace space;
  System system;
};
RandomInstance random_point_system(std::uint64_t seed, std::size_t points);

}  // namespace entlab
