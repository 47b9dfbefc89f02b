#include "okm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace okm {

std::vector<Index> OracleResult::part_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(centers.rows()), 0);
  for (Index p : opt_partition) {
    if (p >= 0) ++sizes[static_cast<std::size_t>(p)];
  }
  return sizes;
}

double oracle_enumeration_bound(Index n, Index k, Index z) {
  double subsets = 1.0;
  for (Index i = 0; i < z; ++i) subsets = subsets * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return std::round(subsets) * std::pow(static_cast<double>(k), static_cast<double>(n - z));
}

namespace {

// Depth-first search over canonical labellings of `kept` (restricted growth
// strings: point j joins an existing part or opens the next one).
class PartitionSearch {
 public:
  PartitionSearch(const Matrix& points, Index k, Objective objective)
      : points_(points), k_(k), objective_(objective), dims_(points.cols()) {
    if (objective_ != Objective::kmeans) {
      const Index n = points.rows();
      dist_.resize(n, n);
      for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) dist_(a, b) = (points.row(a) - points.row(b)).norm();
      }
    }
  }

  // Best labelling of `kept` with cost strictly below `bound`; returns false
  // when none exists.
  bool run(const std::vector<Index>& kept, double bound, double& cost, std::vector<Index>& labels) {
    kept_ = &kept;
    best_ = bound;
    found_ = false;
    current_.assign(kept.size(), 0);
    count_.assign(static_cast<std::size_t>(k_), 0);
    mean_ = Matrix::Zero(k_, dims_);
    m2_.assign(static_cast<std::size_t>(k_), 0.0);
    descend(0, 0, 0.0);
    if (found_) {
      cost = best_;
      labels = best_labels_;
    }
    return found_;
  }

 private:
  void descend(std::size_t depth, Index parts, double partial) {
    const auto& kept = *kept_;
    if (objective_ == Objective::kmeans && partial >= best_) return;
    if (depth == kept.size()) {
      const double cost = objective_ == Objective::kmeans ? partial : discrete_cost(parts);
      if (cost < best_) {
        best_ = cost;
        best_labels_ = current_;
        found_ = true;
      }
      return;
    }
    const Index limit = std::min(parts + 1, k_);
    for (Index p = 0; p < limit; ++p) {
      current_[depth] = p;
      if (objective_ == Objective::kmeans) {
        // Welford update; the previous state is restored on return.
        const Eigen::RowVectorXd old_mean = mean_.row(p);
        const double old_m2 = m2_[static_cast<std::size_t>(p)];
        const auto x = points_.row(kept[depth]);
        auto& cnt = count_[static_cast<std::size_t>(p)];
        ++cnt;
        const Eigen::RowVectorXd delta = x - old_mean;
        mean_.row(p) = old_mean + delta / static_cast<double>(cnt);
        const double gain = delta.dot(x - mean_.row(p));
        m2_[static_cast<std::size_t>(p)] = old_m2 + gain;
        descend(depth + 1, p == parts ? parts + 1 : parts, partial + gain);
        --cnt;
        mean_.row(p) = old_mean;
        m2_[static_cast<std::size_t>(p)] = old_m2;
      } else {
        descend(depth + 1, p == parts ? parts + 1 : parts, partial);
      }
    }
  }

  double discrete_cost(Index parts) const {
    const auto& kept = *kept_;
    double total = 0.0;
    for (Index p = 0; p < parts; ++p) {
      double part_best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < kept.size(); ++a) {
        if (current_[a] != p) continue;
        double acc = 0.0;
        for (std::size_t b = 0; b < kept.size(); ++b) {
          if (current_[b] != p) continue;
          const double d = dist_(kept[a], kept[b]);
          acc = objective_ == Objective::kmedian ? acc + d : std::max(acc, d);
        }
        part_best = std::min(part_best, acc);
      }
      total = objective_ == Objective::kmedian ? total + part_best : std::max(total, part_best);
    }
    return total;
  }

  const Matrix& points_;
  Index k_;
  Objective objective_;
  Index dims_;
  Matrix dist_;

  const std::vector<Index>* kept_ = nullptr;
  std::vector<Index> current_;
  std::vector<Index> best_labels_;
  std::vector<Index> count_;
  Matrix mean_;
  std::vector<double> m2_;
  double best_ = 0.0;
  bool found_ = false;
};

bool next_combination(std::vector<Index>& comb, Index n) {
  const Index z = static_cast<Index>(comb.size());
  for (Index i = z - 1; i >= 0; --i) {
    auto& slot = comb[static_cast<std::size_t>(i)];
    if (slot < n - z + i) {
      ++slot;
      for (Index j = i + 1; j < z; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

OracleResult brute_force_robust(const RobustInstance& instance, Objective objective, double budget) {
  instance.validate();
  const Matrix& points = instance.data.points;
  const Index n = points.rows();
  const Index k = instance.k;
  const Index z = instance.z;

  OracleResult result;
  result.objective = objective;
  result.center_convention = objective == Objective::kmeans ? "centroid" : "best data point of part";
  result.enumeration_bound = oracle_enumeration_bound(n, k, z);
  if (result.enumeration_bound > budget) {
    throw SizeError("oracle enumeration bound C(n,z)*k^(n-z) = " + std::to_string(result.enumeration_bound) +
                        " exceeds budget " + std::to_string(budget),
                    result.enumeration_bound);
  }

  PartitionSearch search(points, k, objective);
  std::vector<Index> outliers(static_cast<std::size_t>(z));
  for (Index i = 0; i < z; ++i) outliers[static_cast<std::size_t>(i)] = i;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> best_labels;
  std::vector<Index> best_kept;
  std::vector<Index> kept;
  do {
    kept.clear();
    auto it = outliers.begin();
    for (Index i = 0; i < n; ++i) {
      if (it != outliers.end() && *it == i) {
        ++it;
      } else {
        kept.push_back(i);
      }
    }
    double cost = 0.0;
    std::vector<Index> labels;
    if (search.run(kept, best, cost, labels)) {
      best = cost;
      best_labels = std::move(labels);
      best_kept = kept;
      result.opt_outliers = outliers;
    }
  } while (z > 0 && next_combination(outliers, n));

  result.opt_cost = best;
  result.opt_partition.assign(static_cast<std::size_t>(n), -1);
  Index parts = 0;
  for (std::size_t j = 0; j < best_kept.size(); ++j) {
    result.opt_partition[static_cast<std::size_t>(best_kept[j])] = best_labels[j];
    parts = std::max(parts, best_labels[j] + 1);
  }

  result.centers = CenterSet::Zero(parts, points.cols());
  for (Index p = 0; p < parts; ++p) {
    std::vector<Index> members;
    for (Index i = 0; i < n; ++i) {
      if (result.opt_partition[static_cast<std::size_t>(i)] == p) members.push_back(i);
    }
    if (objective == Objective::kmeans) {
      for (Index i : members) result.centers.row(p) += points.row(i);
      result.centers.row(p) /= static_cast<double>(members.size());
      continue;
    }
    double part_best = std::numeric_limits<double>::infinity();
    for (Index a : members) {
      double acc = 0.0;
      for (Index b : members) {
        const double d = (points.row(a) - points.row(b)).norm();
        acc = objective == Objective::kmedian ? acc + d : std::max(acc, d);
      }
      if (acc < part_best) {
        part_best = acc;
        result.centers.row(p) = points.row(a);
      }
    }
  }
  return result;
}

SubSolver oracle_subsolver(double budget) {
  return [budget](const Matrix& points, Index k) {
    RobustInstance sub;
    sub.data.points = points;
    sub.k = k;
    sub.z = 0;
    const OracleResult opt = brute_force_robust(sub, Objective::kmeans, budget);
    CenterSet centers(k, points.cols());
    for (Index p = 0; p < k; ++p) centers.row(p) = opt.centers.row(std::min(p, opt.centers.rows() - 1));
    return centers;
  };
}

SweepResult ratio_sweep(const SweepFamily& family, int trials, double c, std::uint64_t seed) {
  require(trials >= 1, "ratio_sweep needs at least one trial");
  require(c > 1.0, "ratio_sweep needs c > 1");
  require(!family.z_values.empty(), "ratio_sweep needs candidate z values");
  const SubSolver exact = oracle_subsolver();

  SweepResult out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  std::uint64_t attempt = 0;
  while (out.trials < trials) {
    std::mt19937_64 rng(mix_seed(seed, attempt++));
    if (attempt > static_cast<std::uint64_t>(trials) * 1000) {
      throw ContractViolation("ratio_sweep family rejects almost every instance");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Index z = family.z_values[std::uniform_int_distribution<std::size_t>(0, family.z_values.size() - 1)(rng)];
    const Index min_size = static_cast<Index>(std::ceil(c * static_cast<double>(z) - 1e-9));
    const Index k_fit = std::min(family.k_max, (family.n_max - z) / std::max<Index>(min_size, 1));
    if (k_fit < 1) {
      ++out.rejected;
      continue;
    }

    PlantedSpec spec;
    spec.k = std::uniform_int_distribution<Index>(1, k_fit)(rng);
    spec.z = z;
    spec.cluster_size = min_size;
    spec.cluster_size_max = (family.n_max - z) / spec.k;
    spec.d = std::uniform_int_distribution<Index>(1, family.d_max)(rng);
    spec.spread = 1.0;
    spec.seed = rng();
    if (family.easy) {
      spec.separation = 50.0;
      spec.outlier_distance = 0.0;
    } else {
      spec.separation = family.separation_lo + (family.separation_hi - family.separation_lo) * unit(rng);
      spec.outlier_distance =
          family.outlier_distance_lo + (family.outlier_distance_hi - family.outlier_distance_lo) * unit(rng);
    }
    const RobustInstance instance = generate_planted(spec);

    const OracleResult opt = brute_force_robust(instance, Objective::kmeans);
    const auto sizes = opt.part_sizes();
    const bool assumption = std::all_of(sizes.begin(), sizes.end(), [&](Index s) {
      return static_cast<double>(s) >= c * static_cast<double>(z) - 1e-9;
    });
    if (!assumption || static_cast<Index>(sizes.size()) < instance.k || !(opt.opt_cost > 0.0)) {
      ++out.rejected;
      continue;
    }

    const ClusteringResult first = run_okmeans(instance, c, exact);
    const ClusteringResult second = run_okmeans2(instance, c, exact);
    const double r1 = first.robust_cost / opt.opt_cost;
    const double r2 = second.robust_cost / opt.opt_cost;
    out.max_ratio_okmeans = std::max(out.max_ratio_okmeans, r1);
    out.max_ratio_okmeans2 = std::max(out.max_ratio_okmeans2, r2);
    out.min_ratio = std::min({out.min_ratio, r1, r2});
    out.cost_never_increased = out.cost_never_increased && first.robust_cost <= first.removed_cost &&
                               second.robust_cost <= second.removed_cost;
    ++out.trials;
  }
  return out;
}

nlohmann::json to_json(const OracleResult& result) {
  nlohmann::json centers = nlohmann::json::array();
  for (Index i = 0; i < result.centers.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < result.centers.cols(); ++j) row.push_back(result.centers(i, j));
    centers.push_back(std::move(row));
  }
  return {
      {"objective", std::string(to_string(result.objective))},
      {"opt_cost", result.opt_cost},
      {"opt_outliers", result.opt_outliers},
      {"opt_partition", result.opt_partition},
      {"centers", std::move(centers)},
      {"center_convention", result.center_convention},
      {"enumeration_bound", result.enumeration_bound},
  };
}

}  // namespace okm
