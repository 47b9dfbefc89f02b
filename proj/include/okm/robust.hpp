#pragma once

#include "okm/kmeans.hpp"
#include "okm/scoring.hpp"

#include "json.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>

namespace okm {

enum class MethodKind { okmeans, okmeans2, constant_k, kmeanspp };

struct Method {
  MethodKind kind = MethodKind::okmeans;
  double c = 3.0;  // okmeans / okmeans2
  Index K = 2;     // constant_k
  SolverConfig solver;
  Objective objective = Objective::kmeans;

  void validate() const;
  // "OKMeans(c=3)", "OKMeans2(c=3)", "ConstantK(K=2)", "KMeans++".
  std::string name() const;
  // Accepts "okmeans:3", "okmeans2:3", "constk:2", "kmeanspp".
  static Method parse(std::string_view text);
};

struct CoresetSpec {
  Index m = 0;
  std::uint64_t seed = 0;
};

struct Coreset {
  RobustInstance instance;
  std::vector<Index> source;  // row i of the coreset is row source[i] of the input
};

// Centers for the kept points. The default wraps solve_kmeans.
using SubSolver = std::function<CenterSet(const Matrix& points, Index k)>;
SubSolver kmeans_subsolver(const SolverConfig& cfg);

// Remove the z points with the largest radius to the floor((c+1)z/2)-th
// neighbour, cluster the rest, then recompute Z(C) and f_z on all of X.
ClusteringResult run_okmeans(const RobustInstance& instance, double c, const SolverConfig& cfg,
                             Objective objective = Objective::kmeans);
ClusteringResult run_okmeans(const RobustInstance& instance, double c, const SubSolver& solver,
                             Objective objective = Objective::kmeans);

// As run_okmeans, scoring by the summed distances to ranks z+1..floor(cz).
ClusteringResult run_okmeans2(const RobustInstance& instance, double c, const SolverConfig& cfg,
                              Objective objective = Objective::kmeans);
ClusteringResult run_okmeans2(const RobustInstance& instance, double c, const SubSolver& solver,
                              Objective objective = Objective::kmeans);

// Classic KNN heuristic: distance to the K-th other point.
ClusteringResult run_constant_k(const RobustInstance& instance, Index K, const SolverConfig& cfg,
                                Objective objective = Objective::kmeans);

// Outlier-unaware k-means++ / Lloyd on all points; Z(C) chosen post hoc.
ClusteringResult run_kmeanspp_baseline(const RobustInstance& instance, const SolverConfig& cfg,
                                       Objective objective = Objective::kmeans);

// m points sampled uniformly without replacement (kept in input order) with
// the budget scaled to max(1, round(z m / n)) when z >= 1.
Coreset uniform_coreset(const RobustInstance& instance, const CoresetSpec& spec);

// Runs `method` on the (optionally reduced) instance and evaluates the
// returned centers on the full input with its original z.
ClusteringResult run_pipeline(const RobustInstance& instance, const Method& method,
                              const std::optional<CoresetSpec>& coreset = std::nullopt);

// Third-party robust clustering methods plug in here; the bench harness
// looks methods up by name.
class Baseline {
 public:
  virtual ~Baseline() = default;
  virtual std::string name() const = 0;
  virtual ClusteringResult run(const RobustInstance& instance, const SolverConfig& cfg) const = 0;
};

class BaselineRegistry {
 public:
  // Registry holding the built-in KMeans++ baseline.
  static BaselineRegistry with_builtins();

  void add(std::shared_ptr<const Baseline> baseline);
  const Baseline* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::shared_ptr<const Baseline>, std::less<>> baselines_;
};

nlohmann::json to_json(const ClusteringResult& result);

}  // namespace okm
