#include "entlab/endomorphism.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "entlab/error.hpp"

namespace entlab {

namespace {

// Full-pivot Gaussian elimination; the pivot magnitudes decide the rank.
// Pivots inside (tol/32, 32 tol) are treated as numerically ambiguous.
std::size_t pivot_rank(Eigen::MatrixXd m, double tol) {
  const std::size_t rows = std::size_t(m.rows());
  std::size_t rank = 0;
  for (std::size_t step = 0; step < rows; ++step) {
    std::size_t pr = step, pc = step;
    double best = 0.0;
    for (std::size_t r = step; r < rows; ++r)
      for (std::size_t c = step; c < rows; ++c)
        if (std::abs(m(r, c)) > best) {
          best = std::abs(m(r, c));
          pr = r;
          pc = c;
        }
    if (best > tol / 32.0 && best < tol * 32.0)
      throw IndeterminateError("rank: pivot " + std::to_string(best) +
                               " straddles tolerance " + std::to_string(tol));
    if (best <= tol) break;
    m.row(step).swap(m.row(pr));
    m.col(step).swap(m.col(pc));
    for (std::size_t r = step + 1; r < rows; ++r) {
      const double f = m(r, step) / m(step, step);
      m.row(r) -= f * m.row(step);
    }
    ++rank;
  }
  return rank;
}

}  // namespace

RankProfile rank_stabilization_index(const std::vector<double>& matrix_row_major,
                                     std::size_t dim) {
  if (dim == 0 || dim > 64)
    throw RangeError("rank_stabilization_index: dimension must lie in [1, 64]");
  if (matrix_row_major.size() != dim * dim)
    throw DimensionError("rank_stabilization_index: matrix size mismatch");

  Eigen::MatrixXd a(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) a(r, c) = matrix_row_major[r * dim + c];

  RankProfile profile;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(dim, dim);
  profile.ranks.push_back(dim);  // rank of A^0

  // Powers are rescaled to unit norm each step; rank is scale-invariant and
  // the rescaling keeps expanding maps from overflowing.
  for (std::size_t n = 1; n <= dim + 1; ++n) {
    power = a * power;
    const double norm = power.cwiseAbs().maxCoeff();
    if (norm > 0.0) power /= norm;
    const double tol = 1e-10 * std::max(1.0, power.cwiseAbs().maxCoeff());
    profile.ranks.push_back(pivot_rank(power, tol));
    if (profile.ranks[n] == profile.ranks[n - 1]) {
      profile.stabilization_index = n - 1;
      return profile;
    }
    if (profile.ranks[n] == 0) {
      profile.stabilization_index = n;
      profile.ranks.push_back(0);
      return profile;
    }
  }
  // ranks strictly decrease until they stabilize, so dim steps always suffice
  throw IndeterminateError("rank_stabilization_index: ranks failed to stabilize");
}

EntropyPrediction entropy_prediction(const System& system) {
  if (system.kind() == System::Kind::Linear) {
    return {0.0, "linear endomorphism of a finite-dimensional vector space"};
  }
  if (system.kind() == System::Kind::Torus) {
    const std::size_t g = system.dim();
    Eigen::MatrixXd a(g, g);
    for (std::size_t r = 0; r < g; ++r)
      for (std::size_t c = 0; c < g; ++c)
        a(r, c) = double(system.torus_matrix()[r * g + c]);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    double h = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      const double mod = std::abs(solver.eigenvalues()[i]);
      if (mod > 1.0) h += std::log(mod);
    }
    h *= double(system.iterate_count());
    return {h, "classical eigenvalue formula, cross-checked by the grid estimator"};
  }
  throw UsageError("entropy_prediction: supported for linear and torus maps only");
}

}  // namespace entlab
