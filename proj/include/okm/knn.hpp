#pragma once

#include "okm/core.hpp"

namespace okm {

/// Squared Euclidean distances between the rows of `a` and `b` through the
/// expansion ||a||^2 + ||b||^2 - 2 a.b, clamped at zero to absorb rounding.
template <typename DerivedA, typename DerivedB>
RowMatrix<typename DerivedA::Scalar> pairwise_sq_dists_block(const Eigen::MatrixBase<DerivedA>& a,
                                                             const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  require(a.cols() == b.cols(), "pairwise_sq_dists_block: dimension mismatch (" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.cols()) + ")");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a_norms = a.rowwise().squaredNorm();
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> b_norms = b.rowwise().squaredNorm().transpose();
  RowMatrix<Scalar> out = Scalar(-2) * (a * b.transpose());
  out.colwise() += a_norms;
  out.rowwise() += b_norms;
  return out.cwiseMax(Scalar(0));
}

/// Distances from each point to its K nearest points of the same dataset.
///
/// Ranking is self-inclusive: rank 1 is the point itself at distance 0, so
/// column j-1 holds d(x, NN(x, j)) and a ball of radius dists(i, K-1) around
/// x_i contains at least K points of X counting x_i. Ties between equal
/// distances are broken by the lower point index.
struct NeighborTable {
  Matrix dists;  // n x K, rows nondecreasing
  Index K = 0;

  Index size() const { return dists.rows(); }
  // Distance to the rank-th nearest neighbour (1-based, self-inclusive).
  double at(Index point, Index rank) const { return dists(point, rank - 1); }
};

struct KnnOptions {
  Index block_rows = 128;  // query rows per pairwise block
};

NeighborTable knn_table(const Dataset& data, Index K, const KnnOptions& options = {});
NeighborTable knn_table(const Matrix& points, Index K, const KnnOptions& options = {});

}  // namespace okm
