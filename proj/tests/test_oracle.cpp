#include "helpers.hpp"
#include "okm/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace okm;
using okm::testing::dataset;
using okm::testing::gaussian;
using okm::testing::line;

namespace {

// Plain k^n labelling enumeration after dropping every z-subset; no pruning.
double naive_optimum(const Matrix& x, Index k, Index z) {
  const Index n = x.rows();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != z) continue;
    std::vector<Index> kept;
    for (Index i = 0; i < n; ++i)
      if (!(mask >> i & 1u)) kept.push_back(i);
    const Index m = static_cast<Index>(kept.size());
    std::vector<Index> label(static_cast<std::size_t>(m), 0);
    while (true) {
      double cost = 0.0;
      for (Index p = 0; p < k; ++p) {
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x.cols());
        Index cnt = 0;
        for (Index j = 0; j < m; ++j)
          if (label[static_cast<std::size_t>(j)] == p) sum += x.row(kept[static_cast<std::size_t>(j)]), ++cnt;
        if (cnt == 0) continue;
        const Eigen::RowVectorXd mean = sum / static_cast<double>(cnt);
        for (Index j = 0; j < m; ++j)
          if (label[static_cast<std::size_t>(j)] == p) cost += (x.row(kept[static_cast<std::size_t>(j)]) - mean).squaredNorm();
      }
      best = std::min(best, cost);
      Index pos = 0;
      while (pos < m && ++label[static_cast<std::size_t>(pos)] == k) label[static_cast<std::size_t>(pos++)] = 0;
      if (pos == m) break;
    }
  }
  return best;
}

}  // namespace

TEST(Oracle, LineExample) {
  const RobustInstance inst{dataset(line({0, 0.1, 10, 10.1, 100})), 2, 1};
  const OracleResult r = brute_force_robust(inst);
  EXPECT_NEAR(r.opt_cost, 0.01, 1e-12);
  EXPECT_EQ(r.opt_outliers, (IndexSet{4}));
  EXPECT_EQ(r.opt_partition[4], -1);
  EXPECT_EQ(r.opt_partition[0], r.opt_partition[1]);
  EXPECT_NE(r.opt_partition[0], r.opt_partition[2]);
  EXPECT_EQ(r.part_sizes(), (std::vector<Index>{2, 2}));
  EXPECT_EQ(r.center_convention, "centroid");
}

TEST(Oracle, BudgetLeavingKPointsCostsZero) {
  const Matrix x = gaussian(8, 2, 3);
  EXPECT_EQ(brute_force_robust({dataset(x), 3, 5}).opt_cost, 0.0);
}

TEST(Oracle, SingleClusterIsTotalVariance) {
  const Matrix x = gaussian(9, 3, 4);
  const double expected = (x.rowwise() - x.colwise().mean()).squaredNorm();
  EXPECT_NEAR(brute_force_robust({dataset(x), 1, 0}).opt_cost, expected, 1e-10);
}

TEST(Oracle, MatchesNaiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Index n = 5 + static_cast<Index>(seed % 4);
    const Index k = 1 + static_cast<Index>(seed % 3);
    const Index z = static_cast<Index>(seed % 3);
    const Matrix x = gaussian(n, 2, seed, 3.0);
    const double naive = naive_optimum(x, k, z);
    const OracleResult r = brute_force_robust({dataset(x), k, z});
    EXPECT_NEAR(r.opt_cost, naive, 1e-9 * std::max(1.0, naive)) << "seed " << seed;
    // The reported structure reproduces the cost.
    std::vector<Index> inliers;
    for (Index i = 0; i < n; ++i)
      if (r.opt_partition[static_cast<std::size_t>(i)] >= 0) inliers.push_back(i);
    EXPECT_NEAR(evaluate_cost(dataset(x).subset(inliers), r.centers, 0, Objective::kmeans).cost, r.opt_cost, 1e-9);
  }
}

TEST(Oracle, PermutationInvariant) {
  const Matrix x = gaussian(9, 2, 6, 2.0);
  const double base = brute_force_robust({dataset(x), 2, 2}).opt_cost;
  std::vector<Index> perm = {8, 3, 0, 5, 1, 7, 2, 6, 4};
  const double shuffled = brute_force_robust({dataset(x).subset(perm), 2, 2}).opt_cost;
  EXPECT_NEAR(base, shuffled, 1e-12);
}

TEST(Oracle, DiscreteObjectives) {
  const RobustInstance inst{dataset(line({0, 1, 2, 9, 50})), 1, 1};
  const OracleResult med = brute_force_robust(inst, Objective::kmedian);
  EXPECT_DOUBLE_EQ(med.opt_cost, 10.0);  // center 2 over {0,1,2,9}
  EXPECT_EQ(med.center_convention, "best data point of part");
  const OracleResult cen = brute_force_robust(inst, Objective::kcenter);
  EXPECT_DOUBLE_EQ(cen.opt_cost, 7.0);  // center 2, farthest kept point 9
}

TEST(Oracle, SizeGuard) {
  EXPECT_DOUBLE_EQ(oracle_enumeration_bound(5, 2, 1), 5.0 * 16.0);
  const RobustInstance big{dataset(gaussian(30, 2, 1)), 3, 2};
  try {
    brute_force_robust(big);
    FAIL();
  } catch (const SizeError& e) {
    EXPECT_GT(e.bound(), kOracleBudget);
  }
}

TEST(Oracle, SubsolverPadsCenters) {
  const Matrix x = line({1, 1, 1});
  const CenterSet c = oracle_subsolver()(x, 2);
  EXPECT_EQ(c.rows(), 2);
  EXPECT_EQ(evaluate_cost(x, c, 0, Objective::kmeans).cost, 0.0);
}

TEST(Oracle, SolveKmeansReachesOptimum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PlantedSpec spec;
    spec.k = 1 + static_cast<Index>(seed % 3);
    spec.cluster_size = 3;
    spec.cluster_size_max = 10 / spec.k;
    spec.z = 0;
    spec.separation = 3.0 + static_cast<double>(seed % 4) * 3.0;
    spec.seed = seed;
    const RobustInstance inst = generate_planted(spec);
    const double opt = brute_force_robust(inst).opt_cost;
    SolverConfig cfg;
    cfg.k = inst.k;
    cfg.restarts = 5;
    cfg.seed = seed;
    EXPECT_NEAR(solve_kmeans(inst.data, std::nullopt, cfg).cost, opt, 1e-6 * opt) << "seed " << seed;
  }
}

TEST(Sweep, EasyFamilyIsExact) {
  SweepFamily family;
  family.easy = true;
  const SweepResult r = ratio_sweep(family, 30, 3.0, 1);
  EXPECT_EQ(r.trials, 30);
  EXPECT_NEAR(r.max_ratio_okmeans, 1.0, 1e-9);
  EXPECT_NEAR(r.max_ratio_okmeans2, 1.0, 1e-9);
  EXPECT_TRUE(r.cost_never_increased);
}

TEST(Sweep, DeterministicAndBounded) {
  const SweepResult a = ratio_sweep({}, 40, 3.0, 9);
  const SweepResult b = ratio_sweep({}, 40, 3.0, 9);
  EXPECT_EQ(a.max_ratio_okmeans, b.max_ratio_okmeans);
  EXPECT_EQ(a.rejected, b.rejected);
  EXPECT_GE(a.min_ratio, 1.0 - 1e-9);
  EXPECT_LE(a.max_ratio_okmeans, 9.0);
  EXPECT_LE(a.max_ratio_okmeans2, 5.98 + 1e-9);
}
