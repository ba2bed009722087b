#include "doctest.h"

#include <cmath>

#include "entlab/endomorphism.hpp"

using namespace entlab;

namespace {

// oracle: symbolic powers of a nilpotent Jordan block have rank dim - n
std::vector<std::size_t> jordan_rank_sequence(std::size_t dim) {
  std::vector<std::size_t> ranks;
  for (std::size_t n = 0; n <= dim + 1; ++n)
    ranks.push_back(dim > n ? dim - n : 0);
  return ranks;
}

}  // namespace

TEST_SUITE_BEGIN("endomorphism");

TEST_CASE("identity stabilizes immediately") {
  const RankProfile p = rank_stabilization_index({1, 0, 0, 1}, 2);
  CHECK(p.stabilization_index == 0);
  CHECK(p.ranks[0] == 2);
}

TEST_CASE("3x3 nilpotent Jordan block stabilizes at 3") {
  const std::vector<double> j3 = {0, 1, 0, 0, 0, 1, 0, 0, 0};
  const RankProfile p = rank_stabilization_index(j3, 3);
  CHECK(p.stabilization_index == 3);
  const auto oracle = jordan_rank_sequence(3);
  for (std::size_t i = 0; i < p.ranks.size(); ++i) CHECK(p.ranks[i] == oracle[i]);
}

TEST_CASE("diag(2, 0) stabilizes at 1 with ranks 2,1,1") {
  const RankProfile p = rank_stabilization_index({2, 0, 0, 0}, 2);
  CHECK(p.stabilization_index == 1);
  REQUIRE(p.ranks.size() >= 3);
  CHECK(p.ranks[0] == 2);
  CHECK(p.ranks[1] == 1);
  CHECK(p.ranks[2] == 1);
}

TEST_CASE("profiles are nonincreasing and stabilize within the dimension") {
  const std::vector<std::vector<double>> cases = {
      {0, 1, 0, 0},                    // 2x2 nilpotent
      {1, 1, 0, 1},                    // unipotent
      {2, 1, 1, 1},                    // hyperbolic
      {0, 0, 0, 1, 0, 0, 0, 1, 0},     // 3x3 nilpotent, transposed block
  };
  for (const auto& m : cases) {
    const std::size_t dim = m.size() == 4 ? 2 : 3;
    const RankProfile p = rank_stabilization_index(m, dim);
    for (std::size_t i = 1; i < p.ranks.size(); ++i) CHECK(p.ranks[i] <= p.ranks[i - 1]);
    CHECK(p.stabilization_index <= dim);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(rank_stabilization_index({1.0, 2.0}, 2), DimensionError);
  CHECK_THROWS_AS(rank_stabilization_index({}, 0), RangeError);
}

TEST_CASE("pivots straddling the tolerance are refused") {
  // second pivot 1e-9 sits inside the (tol/32, 32 tol) ambiguity band
  CHECK_THROWS_AS(rank_stabilization_index({1.0, 0.0, 0.0, 1e-9}, 2),
                  IndeterminateError);
}

TEST_CASE("entropy predictions") {
  CHECK(entropy_prediction(System::linear({3.0}, 1)).value == 0.0);
  CHECK(entropy_prediction(System::linear({2, 0, 0, 0.5}, 2)).value == 0.0);

  // oracle: characteristic polynomial x^2 - 3x + 1, root (3 + sqrt 5)/2
  const EntropyPrediction cat = entropy_prediction(System::torus({2, 1, 1, 1}, 2));
  CHECK(cat.value == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-12));
  CHECK(cat.value == doctest::Approx(0.9624).epsilon(1e-4));

  CHECK(entropy_prediction(System::torus({1, 0, 0, 1}, 2)).value == 0.0);
  CHECK_THROWS_AS(entropy_prediction(System::full_shift(2)), UsageError);

  // h(T^k) = k h(T) holds for the prediction as well
  const System cat2 = System::torus({2, 1, 1, 1}, 2).iterate(2);
  CHECK(entropy_prediction(cat2).value == doctest::Approx(2.0 * cat.value));
}

TEST_SUITE_END();
