#include "okm/robust.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <random>

namespace okm {

namespace {

using Clock = std::chrono::steady_clock;

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

std::vector<Index> complement(Index n, const IndexSet& removed) {
  std::vector<Index> kept;
  kept.reserve(static_cast<std::size_t>(n) - removed.size());
  auto it = removed.begin();
  for (Index i = 0; i < n; ++i) {
    if (it != removed.end() && *it == i) {
      ++it;
      continue;
    }
    kept.push_back(i);
  }
  return kept;
}

Matrix gather_rows(const Matrix& points, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), points.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = points.row(rows[r]);
  return out;
}

// Evaluates `centers` on the full instance and fills the result fields that
// do not depend on how the centers were obtained.
void finish(ClusteringResult& result, const RobustInstance& instance, const IndexSet& removed) {
  const Matrix& points = instance.data.points;
  const CostEvaluation eval = evaluate_cost(points, result.centers, instance.z, result.objective);
  result.outliers = eval.outliers;
  result.assignment = eval.assignment;
  result.robust_cost = eval.cost;
  result.removed = removed;
  const Matrix kept = removed.empty() ? points : gather_rows(points, complement(points.rows(), removed));
  result.removed_cost = evaluate_cost(kept, result.centers, 0, result.objective).cost;
}

struct RemovalRule {
  ScoreRule rule;
  double c = 0.0;
  Index K = 0;
};

ClusteringResult run_removal(const RobustInstance& instance, const RemovalRule& rule, const SubSolver& solver,
                             Objective objective) {
  instance.validate();
  const auto start = Clock::now();
  const Index n = instance.data.size();
  const Index z = instance.z;

  ClusteringResult result;
  result.objective = objective;
  result.metadata.emplace_back("score_rule", std::string(to_string(rule.rule)));

  IndexSet removed;
  if (z > 0) {
    const Index width = required_width(rule.rule, z, rule.c, rule.K);
    require(width <= n, "scoring needs neighbour rank " + std::to_string(width) + " but the dataset has only n=" +
                            std::to_string(n) + " points");
    const NeighborTable table = knn_table(instance.data.points, width);
    ScoreVector scores;
    switch (rule.rule) {
      case ScoreRule::vanilla_radius:
        scores = score_vanilla(table, z, rule.c);
        break;
      case ScoreRule::midrange_sum:
        scores = score_midrange_sum(table, z, rule.c);
        break;
      case ScoreRule::constant_k:
        scores = score_constant_k(table, rule.K);
        break;
    }
    removed = select_outliers(scores, z);
    result.metadata.emplace_back("rank_lo", std::to_string(scores.rank_lo));
    result.metadata.emplace_back("rank_hi", std::to_string(scores.rank_hi));
  } else {
    result.metadata.emplace_back("rank_lo", "none");
    result.metadata.emplace_back("rank_hi", "none");
  }

  const Matrix kept = removed.empty() ? instance.data.points
                                      : gather_rows(instance.data.points, complement(n, removed));
  result.centers = solver(kept, instance.k);
  finish(result, instance, removed);
  result.elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  result.metadata.emplace_back("evaluated_on", "full");
  return result;
}

void tag_solver(ClusteringResult& result, const SolverConfig& cfg) {
  result.seed = cfg.seed;
  result.metadata.emplace_back("max_iters", std::to_string(cfg.max_iters));
  result.metadata.emplace_back("rel_tol", format_real(cfg.rel_tol));
  result.metadata.emplace_back("restarts", std::to_string(cfg.restarts));
}

class KMeansPPBaseline final : public Baseline {
 public:
  std::string name() const override { return "KMeans++"; }
  ClusteringResult run(const RobustInstance& instance, const SolverConfig& cfg) const override {
    return run_kmeanspp_baseline(instance, cfg);
  }
};

}  // namespace

void Method::validate() const {
  switch (kind) {
    case MethodKind::okmeans:
    case MethodKind::okmeans2:
      require(c > 1.0, name() + ": c must exceed 1");
      break;
    case MethodKind::constant_k:
      require(K >= 1, name() + ": K must be at least 1");
      break;
    case MethodKind::kmeanspp:
      break;
  }
  solver.validate();
}

std::string Method::name() const {
  switch (kind) {
    case MethodKind::okmeans:
      return "OKMeans(c=" + format_real(c) + ")";
    case MethodKind::okmeans2:
      return "OKMeans2(c=" + format_real(c) + ")";
    case MethodKind::constant_k:
      return "ConstantK(K=" + std::to_string(K) + ")";
    case MethodKind::kmeanspp:
      return "KMeans++";
  }
  return "?";
}

Method Method::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  Method method;
  const auto number = [&](double fallback) {
    if (arg.empty()) return fallback;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    require(ec == std::errc() && ptr == arg.data() + arg.size(),
            "bad method parameter in '" + std::string(text) + "'");
    return value;
  };
  if (head == "okmeans") {
    method.kind = MethodKind::okmeans;
    method.c = number(3.0);
  } else if (head == "okmeans2") {
    method.kind = MethodKind::okmeans2;
    method.c = number(3.0);
  } else if (head == "constk") {
    method.kind = MethodKind::constant_k;
    const double K = number(2.0);
    require(K == std::floor(K), "constk needs an integer K");
    method.K = static_cast<Index>(K);
  } else if (head == "kmeanspp") {
    require(arg.empty(), "kmeanspp takes no parameter");
    method.kind = MethodKind::kmeanspp;
  } else {
    throw ContractViolation("unknown method '" + std::string(text) + "'");
  }
  return method;
}

SubSolver kmeans_subsolver(const SolverConfig& cfg) {
  return [cfg](const Matrix& points, Index k) {
    SolverConfig local = cfg;
    local.k = k;
    return solve_kmeans(points, std::nullopt, local).centers;
  };
}

ClusteringResult run_okmeans(const RobustInstance& instance, double c, const SolverConfig& cfg, Objective objective) {
  ClusteringResult result = run_okmeans(instance, c, kmeans_subsolver(cfg), objective);
  tag_solver(result, cfg);
  return result;
}

ClusteringResult run_okmeans(const RobustInstance& instance, double c, const SubSolver& solver, Objective objective) {
  require(c > 1.0, "OKMeans needs c > 1");
  ClusteringResult result = run_removal(instance, {ScoreRule::vanilla_radius, c, 0}, solver, objective);
  result.method = "OKMeans(c=" + format_real(c) + ")";
  return result;
}

ClusteringResult run_okmeans2(const RobustInstance& instance, double c, const SolverConfig& cfg, Objective objective) {
  ClusteringResult result = run_okmeans2(instance, c, kmeans_subsolver(cfg), objective);
  tag_solver(result, cfg);
  return result;
}

ClusteringResult run_okmeans2(const RobustInstance& instance, double c, const SubSolver& solver,
                              Objective objective) {
  require(c > 1.0, "OKMeans2 needs c > 1");
  ClusteringResult result = run_removal(instance, {ScoreRule::midrange_sum, c, 0}, solver, objective);
  result.method = "OKMeans2(c=" + format_real(c) + ")";
  return result;
}

ClusteringResult run_constant_k(const RobustInstance& instance, Index K, const SolverConfig& cfg,
                                Objective objective) {
  require(K >= 1, "constant-K scoring needs K >= 1");
  ClusteringResult result =
      run_removal(instance, {ScoreRule::constant_k, 0.0, K}, kmeans_subsolver(cfg), objective);
  Method m;
  m.kind = MethodKind::constant_k;
  m.K = K;
  result.method = m.name();
  tag_solver(result, cfg);
  return result;
}

ClusteringResult run_kmeanspp_baseline(const RobustInstance& instance, const SolverConfig& cfg,
                                       Objective objective) {
  instance.validate();
  const auto start = Clock::now();
  ClusteringResult result;
  result.objective = objective;
  result.centers = kmeans_subsolver(cfg)(instance.data.points, instance.k);
  finish(result, instance, {});
  result.elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  result.method = "KMeans++";
  result.metadata.emplace_back("score_rule", "none");
  result.metadata.emplace_back("evaluated_on", "full");
  tag_solver(result, cfg);
  return result;
}

Coreset uniform_coreset(const RobustInstance& instance, const CoresetSpec& spec) {
  instance.validate();
  const Index n = instance.data.size();
  require(spec.m >= 1 && spec.m <= n, "coreset size m must lie in [1, n]");

  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  std::mt19937_64 rng(spec.seed);
  for (Index i = 0; i < spec.m; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(spec.m));
  std::sort(pool.begin(), pool.end());

  Coreset out;
  out.source = pool;
  out.instance.data = instance.data.subset(pool);
  out.instance.k = instance.k;
  out.instance.z = 0;
  if (instance.z >= 1) {
    const double scaled = static_cast<double>(instance.z) * static_cast<double>(spec.m) / static_cast<double>(n);
    out.instance.z = std::max<Index>(1, std::llround(scaled));
  }
  require(out.instance.z <= spec.m - instance.k,
          "coreset of size " + std::to_string(spec.m) + " cannot hold k=" + std::to_string(instance.k) +
              " clusters with scaled budget z'=" + std::to_string(out.instance.z));
  return out;
}

namespace {

ClusteringResult run_direct(const RobustInstance& instance, const Method& method) {
  switch (method.kind) {
    case MethodKind::okmeans:
      return run_okmeans(instance, method.c, method.solver, method.objective);
    case MethodKind::okmeans2:
      return run_okmeans2(instance, method.c, method.solver, method.objective);
    case MethodKind::constant_k:
      return run_constant_k(instance, method.K, method.solver, method.objective);
    case MethodKind::kmeanspp:
      return run_kmeanspp_baseline(instance, method.solver, method.objective);
  }
  throw ContractViolation("unknown method kind");
}

}  // namespace

ClusteringResult run_pipeline(const RobustInstance& instance, const Method& method,
                              const std::optional<CoresetSpec>& coreset) {
  method.validate();
  if (!coreset) return run_direct(instance, method);

  const auto start = Clock::now();
  const Coreset reduced = uniform_coreset(instance, *coreset);
  ClusteringResult result = run_direct(reduced.instance, method);
  IndexSet removed;
  removed.reserve(result.removed.size());
  for (Index r : result.removed) removed.push_back(reduced.source[static_cast<std::size_t>(r)]);
  finish(result, instance, removed);
  result.elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  result.metadata.emplace_back("coreset_m", std::to_string(coreset->m));
  result.metadata.emplace_back("coreset_z", std::to_string(reduced.instance.z));
  result.metadata.emplace_back("coreset_seed", std::to_string(coreset->seed));
  return result;
}

BaselineRegistry BaselineRegistry::with_builtins() {
  BaselineRegistry registry;
  registry.add(std::make_shared<KMeansPPBaseline>());
  return registry;
}

void BaselineRegistry::add(std::shared_ptr<const Baseline> baseline) {
  require(baseline != nullptr, "null baseline");
  const std::string key = baseline->name();
  require(baselines_.count(key) == 0, "baseline '" + key + "' is already registered");
  baselines_.emplace(key, std::move(baseline));
}

const Baseline* BaselineRegistry::find(std::string_view name) const {
  const auto it = baselines_.find(name);
  return it == baselines_.end() ? nullptr : it->second.get();
}

std::vector<std::string> BaselineRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : baselines_) out.push_back(name);
  return out;
}

nlohmann::json to_json(const ClusteringResult& result) {
  nlohmann::json centers = nlohmann::json::array();
  for (Index i = 0; i < result.centers.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < result.centers.cols(); ++j) row.push_back(result.centers(i, j));
    centers.push_back(std::move(row));
  }
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, value] : result.metadata) meta[key] = value;
  return {
      {"method", result.method},
      {"objective", std::string(to_string(result.objective))},
      {"centers", std::move(centers)},
      {"outliers", result.outliers},
      {"removed", result.removed},
      {"robust_cost", result.robust_cost},
      {"removed_cost", result.removed_cost},
      {"elapsed_s", result.elapsed},
      {"seed", result.seed},
      {"metadata", std::move(meta)},
  };
}

}  // namespace okm
