#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "entlab/metric.hpp"
#include "entlab/state.hpp"

namespace entlab {

// Which diameter-<=1 metric a linear map is studied under. Arctan restricts a
// metric of the compactification; Window deliberately does not.
enum class LinearMetric { Arctan, Window };

// One system of the catalog. Immutable value; step() is pure.
class System {
public:
  enum class Kind {
    Identity,
    FullShift,         // alphabet m, stride s (stride s = the s-th shift power)
    RealShift,         // shift on real sequences
    FormalDerivative,  // shift composed with diagonal scaling: slot j <- (j+1) a_{j+1}
    Product,           // coordinate-wise action on a tuple of factor systems
    Linear,            // x -> A x on R^d
    Torus,             // x -> A x mod 1 on [0,1)^g, integer A
    Tabulated          // explicit map on a listed finite state set
  };

  static System identity(std::size_t dim = 1);
  static System full_shift(std::size_t alphabet, std::size_t stride = 1);
  static System real_shift(std::size_t stride = 1);
  static System formal_derivative();
  // Factor f acts on a slice of factor_dims[f] stored coordinates.
  static System product(std::vector<System> factors, std::vector<std::size_t> factor_dims);
  static System linear(std::vector<double> matrix_row_major, std::size_t dim,
                       LinearMetric metric_choice = LinearMetric::Arctan,
                       double window_halfwidth = 1.0);
  static System torus(std::vector<long long> matrix_row_major, std::size_t dim);
  // point i maps to point image[i]; states must match a listed point exactly
  static System tabulated(std::vector<State> points, std::vector<std::uint32_t> image);

  // T^k. Shift powers fold into the stride; other kinds iterate the step map.
  System iterate(std::size_t k) const;

  State step(StateView x) const;
  State orbit_point(StateView x, std::size_t j) const;  // T^j x

  Kind kind() const;
  std::size_t iterate_count() const;  // k for wrapped kinds, 1 otherwise
  std::string name() const;

  // m(n) of the product-type contract: pi_n(T x) depends only on pi_{m(n)}(x).
  // Coordinates are stored slots for sequence kinds and factor indices for
  // Product.
  std::size_t measurability_bound(std::size_t n) const;

  // The product-type metric the system is studied under by default.
  Metric canonical_metric() const;

  // Accessors for variant data; throw UsageError when the kind mismatches.
  std::size_t alphabet() const;
  std::size_t stride() const;
  const std::vector<System>& factors() const;
  const std::vector<std::size_t>& factor_dims() const;
  const std::vector<double>& matrix() const;       // Linear, row-major
  const std::vector<long long>& torus_matrix() const;
  std::size_t dim() const;                         // Linear/Torus/Identity
  LinearMetric linear_metric_choice() const;
  double window_halfwidth() const;

  // "full_shift:m=2", "full_shift:m=2,stride=2", "torus:2,1;1,1",
  // "linear:2:arctan", "linear:2:window", "real_shift", "formal_derivative",
  // "identity", "product(full_shift:m=2@8,full_shift:m=3@6)".
  static System parse(std::string_view text);

private:
  struct Impl;
  explicit System(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace entlab
