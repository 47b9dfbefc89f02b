#pragma once

#include "okm/robust.hpp"

namespace okm {

// Exact optimum of a tiny robust clustering instance.
//
// k-Means parts use their centroid. k-Median and k-Center parts use the best
// data point of the part as center (discrete-center convention), which keeps
// the search exact; `center_convention` records which one applied.
struct OracleResult {
  double opt_cost = 0.0;
  IndexSet opt_outliers;
  std::vector<Index> opt_partition;  // per point, -1 for outliers
  CenterSet centers;                 // one row per nonempty part
  Objective objective = Objective::kmeans;
  std::string center_convention;
  double enumeration_bound = 0.0;  // C(n, z) * k^(n - z)

  std::vector<Index> part_sizes() const;
};

inline constexpr double kOracleBudget = 1e8;

double oracle_enumeration_bound(Index n, Index k, Index z);

// Enumerates every z-subset as outliers (lexicographic order, earliest wins
// ties) and every canonical labelling of the remaining points into at most k
// parts. Throws SizeError when oracle_enumeration_bound exceeds `budget`.
OracleResult brute_force_robust(const RobustInstance& instance, Objective objective = Objective::kmeans,
                                double budget = kOracleBudget);

// Exact k-means on the given points (z = 0), as a drop-in sub-solver.
// Returns k rows; when the optimum uses fewer parts the last center repeats.
SubSolver oracle_subsolver(double budget = kOracleBudget);

struct SweepFamily {
  Index n_max = 12;
  std::vector<Index> z_values = {1, 2};
  Index k_max = 3;
  Index d_max = 3;
  // Outlier radius as a multiple of the blob extent, drawn uniformly.
  double outlier_distance_lo = 0.3;
  double outlier_distance_hi = 4.0;
  double separation_lo = 2.0;
  double separation_hi = 12.0;
  // Far outliers and wide separation: every method should be exact.
  bool easy = false;
};

struct SweepResult {
  double max_ratio_okmeans = 0.0;
  double max_ratio_okmeans2 = 0.0;
  double min_ratio = 0.0;
  int trials = 0;
  int rejected = 0;  // instances resampled because an optimal part had < c z points
  // f_z(X, C) <= f(X \ O, C) held on every run.
  bool cost_never_increased = true;
};

// Runs OKMeans and OKMeans2 with the exact sub-solver on `trials` accepted
// instances and reports the worst achieved / optimal robust k-means ratios.
SweepResult ratio_sweep(const SweepFamily& family, int trials, double c, std::uint64_t seed);

nlohmann::json to_json(const OracleResult& result);

}  // namespace okm
