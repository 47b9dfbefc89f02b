#pragma once

#include "okm/types.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace okm {

struct Dataset {
  Matrix points;  // n x d
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<bool>> true_outliers;
  std::string name;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  // Throws ContractViolation when n < 1, d < 1, a coordinate is not finite,
  // or the label/mask lengths disagree with n.
  void validate() const;

  Index outlier_count() const;

  // Rows listed in `rows` (in that order), with labels and mask carried over.
  Dataset subset(const std::vector<Index>& rows) const;
};

struct RobustInstance {
  Dataset data;
  Index k = 1;
  Index z = 0;

  // 1 <= k <= n and 0 <= z <= n - k.
  void validate() const;
};

struct ClusteringResult {
  CenterSet centers;
  // Z(C): the z points farthest from `centers` over the full dataset.
  IndexSet outliers;
  // O: the points removed before the sub-solver ran (empty for methods
  // without an explicit removal step). Indices refer to the full dataset.
  IndexSet removed;
  // Per point: nearest center, or -1 for points in `outliers`.
  std::vector<Index> assignment;
  double robust_cost = 0.0;
  // f(X \ O, C): cost of the kept points under `centers`, no further drops.
  double removed_cost = 0.0;
  Objective objective = Objective::kmeans;
  double elapsed = 0.0;  // seconds
  std::uint64_t seed = 0;
  std::string method;
  // Scoring bounds, coreset size, evaluation scope and solver settings.
  std::vector<std::pair<std::string, std::string>> metadata;
};

struct CostEvaluation {
  double cost = 0.0;
  IndexSet outliers;
  std::vector<Index> assignment;  // -1 for dropped points
  Vector distances;               // unsquared distance to the nearest center
};

struct CsvOptions {
  bool has_labels = false;  // last column holds integer class labels
  bool has_mask = false;    // column before the labels (or last) holds 0/1 outlier flags
  bool skip_header = false;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
void save_csv(const Dataset& data, const std::filesystem::path& path);

// Column-wise (x - mean) / std with the population std. Zero-variance columns
// become zeros. Labels and mask are carried over unchanged.
Dataset normalize_zscore(const Dataset& data);

// Appends max(1, round(fraction * n)) points drawn uniformly from
// [-xi, xi]^d and marks them in `true_outliers`. Existing rows are untouched.
Dataset inject_outliers(const Dataset& data, double fraction, double xi, std::uint64_t seed);

Dataset mark_label_outliers(const Dataset& data, const std::set<int>& outlier_classes);

// The `count` classes with the fewest members (ties: smaller label first).
std::set<int> smallest_classes(const std::vector<int>& labels, std::size_t count);

// Robust cost f_z(X, C): drop the z points farthest from C (lower index
// dropped first on ties) and aggregate the rest per `objective`.
CostEvaluation evaluate_cost(const Dataset& data, const CenterSet& centers, Index z,
                             Objective objective);
CostEvaluation evaluate_cost(const Matrix& points, const CenterSet& centers, Index z,
                             Objective objective);

// k Gaussian blobs of `cluster_size` points each (std `spread`), centers at
// least `separation` apart, plus z outliers placed far outside the blobs.
// Rows are shuffled; labels hold the blob id (-1 for outliers).
RobustInstance generate_planted(Index k, Index cluster_size, Index z, double separation,
                                double spread, Index d, std::uint64_t seed);

struct PlantedSpec {
  Index k = 2;
  Index cluster_size = 9;
  Index z = 1;
  double separation = 10.0;
  double spread = 1.0;
  Index d = 2;
  std::uint64_t seed = 0;
  // Distance of each outlier from the blob centroid, as a multiple of the
  // blob extent. Values <= 0 select the default far placement (10x to 20x).
  double outlier_distance = 0.0;
  // Uniform sizes in [cluster_size, cluster_size_max] when larger than
  // cluster_size.
  Index cluster_size_max = 0;
};

RobustInstance generate_planted(const PlantedSpec& spec);

// Squared distance from every row of `points` to its nearest row of
// `centers`, with the index of that center (lowest index on ties).
template <typename DerivedP, typename DerivedC>
void nearest_center(const Eigen::MatrixBase<DerivedP>& points,
                    const Eigen::MatrixBase<DerivedC>& centers,
                    Eigen::Matrix<typename DerivedP::Scalar, Eigen::Dynamic, 1>& sq_dist,
                    std::vector<Index>& which) {
  using Scalar = typename DerivedP::Scalar;
  const Index n = points.rows();
  sq_dist.resize(n);
  which.assign(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    Index arg = 0;
    for (Index j = 0; j < centers.rows(); ++j) {
      const Scalar d2 = (points.row(i) - centers.row(j)).squaredNorm();
      if (d2 < best) {
        best = d2;
        arg = j;
      }
    }
    sq_dist(i) = best;
    which[static_cast<std::size_t>(i)] = arg;
  }
}

}  // namespace okm
