#pragma once

#include "okm/core.hpp"

#include <optional>

namespace okm {

// Defaults are recorded alongside every result.
struct SolverConfig {
  Index k = 1;
  int max_iters = 100;
  double rel_tol = 1e-6;
  int restarts = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

using Weights = std::optional<Vector>;

// Weighted k-means++ seeding. The first center is drawn with probability
// proportional to weight, later ones proportional to weight * D^2 where D is
// the distance to the nearest chosen center. Once every positive-weight
// point is covered (D^2 mass zero), the remaining centers are drawn by
// weight among points not yet chosen.
CenterSet seed_kmeanspp(const Matrix& points, const Weights& weights, Index k, std::uint64_t seed);

struct LloydResult {
  CenterSet centers;
  double cost = 0.0;  // weighted sum of squared distances under `centers`
  int iters = 0;
  std::vector<double> cost_history;  // cost after the initial assignment, then after each update
};

// Weighted Lloyd iterations from `init`. Stops once the relative cost
// decrease falls below cfg.rel_tol or after cfg.max_iters updates. A center
// that loses all its weight is moved onto the point currently farthest from
// its center.
LloydResult lloyd(const Matrix& points, const Weights& weights, const CenterSet& init, const SolverConfig& cfg);

struct KMeansSolution {
  CenterSet centers;
  double cost = 0.0;
  int iters = 0;
  int best_restart = 0;
};

// cfg.restarts independent seed_kmeanspp -> lloyd chains; chain r uses the
// seed mix_seed(cfg.seed, r). Returns the cheapest (earliest on ties).
KMeansSolution solve_kmeans(const Matrix& points, const Weights& weights, const SolverConfig& cfg);

inline KMeansSolution solve_kmeans(const Dataset& data, const Weights& weights, const SolverConfig& cfg) {
  return solve_kmeans(data.points, weights, cfg);
}

}  // namespace okm
