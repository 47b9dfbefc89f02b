#include "okm/kmeans.hpp"

#include <random>

namespace okm {

void SolverConfig::validate() const {
  require(k >= 1, "solver needs k >= 1");
  require(max_iters >= 1, "solver needs max_iters >= 1");
  require(rel_tol >= 0.0, "solver needs rel_tol >= 0");
  require(restarts >= 1, "solver needs restarts >= 1");
}

namespace {

Vector resolve_weights(const Matrix& points, const Weights& weights) {
  if (!weights) return Vector::Ones(points.rows());
  require(weights->size() == points.rows(), "weight count differs from point count");
  require((weights->array() >= 0.0).all() && weights->allFinite(), "weights must be finite and nonnegative");
  require(weights->sum() > 0.0, "weights must have a positive sum");
  return *weights;
}

// Index drawn with probability mass[i] / sum(mass). Only indices with
// positive mass can be returned.
Index draw(const Vector& mass, std::mt19937_64& rng) {
  const double total = mass.sum();
  const double target = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * total;
  double running = 0.0;
  Index last_positive = -1;
  for (Index i = 0; i < mass.size(); ++i) {
    if (mass(i) <= 0.0) continue;
    running += mass(i);
    last_positive = i;
    if (running > target) return i;
  }
  return last_positive;
}

double weighted_cost(const Vector& sq, const Vector& w) { return sq.dot(w); }

}  // namespace

CenterSet seed_kmeanspp(const Matrix& points, const Weights& weights, Index k, std::uint64_t seed) {
  const Index n = points.rows();
  require(k >= 1 && k <= n, "seed_kmeanspp needs 1 <= k <= n");
  const Vector w = resolve_weights(points, weights);
  std::mt19937_64 rng(seed);

  CenterSet centers(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Index pick = draw(w, rng);
  centers.row(0) = points.row(pick);
  chosen[static_cast<std::size_t>(pick)] = true;

  Vector sq = (points.rowwise() - points.row(pick)).rowwise().squaredNorm();
  for (Index c = 1; c < k; ++c) {
    Vector mass = w.cwiseProduct(sq);
    if (!(mass.sum() > 0.0)) {
      mass = w;
      for (Index i = 0; i < n; ++i) {
        if (chosen[static_cast<std::size_t>(i)]) mass(i) = 0.0;
      }
      // Only zero-weight points remain unchosen.
      if (!(mass.sum() > 0.0)) {
        for (Index i = 0; i < n; ++i) mass(i) = chosen[static_cast<std::size_t>(i)] ? 0.0 : 1.0;
      }
    }
    pick = draw(mass, rng);
    centers.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    sq = sq.cwiseMin((points.rowwise() - points.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

LloydResult lloyd(const Matrix& points, const Weights& weights, const CenterSet& init, const SolverConfig& cfg) {
  cfg.validate();
  require(init.rows() == cfg.k, "lloyd: init has " + std::to_string(init.rows()) + " centers, expected k=" +
                                    std::to_string(cfg.k));
  require(init.cols() == points.cols(), "lloyd: init dimension differs from data dimension");
  const Vector w = resolve_weights(points, weights);
  const Index n = points.rows();
  const Index k = cfg.k;

  LloydResult result;
  result.centers = init;
  Vector sq;
  std::vector<Index> which;
  nearest_center(points, result.centers, sq, which);
  result.cost = weighted_cost(sq, w);
  result.cost_history.push_back(result.cost);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    CenterSet next = CenterSet::Zero(k, points.cols());
    Vector mass = Vector::Zero(k);
    for (Index i = 0; i < n; ++i) {
      const Index c = which[static_cast<std::size_t>(i)];
      next.row(c) += w(i) * points.row(i);
      mass(c) += w(i);
    }
    Vector residual = sq.cwiseProduct(w.cwiseSign());
    for (Index c = 0; c < k; ++c) {
      if (mass(c) > 0.0) {
        next.row(c) /= mass(c);
        continue;
      }
      Index far = 0;
      residual.maxCoeff(&far);
      next.row(c) = points.row(far);
      residual(far) = -1.0;
    }

    nearest_center(points, next, sq, which);
    const double cost = weighted_cost(sq, w);
    if (cost > result.cost + 1e-9 * std::max(1.0, result.cost)) {
      throw SolverError("lloyd cost increased from " + std::to_string(result.cost) + " to " + std::to_string(cost));
    }
    const bool converged = result.cost - cost <= cfg.rel_tol * result.cost;
    result.centers = std::move(next);
    result.cost = cost;
    result.iters = it;
    result.cost_history.push_back(cost);
    if (converged) break;
  }
  return result;
}

KMeansSolution solve_kmeans(const Matrix& points, const Weights& weights, const SolverConfig& cfg) {
  cfg.validate();
  require(cfg.k <= points.rows(), "solve_kmeans needs k <= n");
  std::vector<LloydResult> chains(static_cast<std::size_t>(cfg.restarts));
  for (int r = 0; r < cfg.restarts; ++r) {
    const CenterSet init = seed_kmeanspp(points, weights, cfg.k, mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    chains[static_cast<std::size_t>(r)] = lloyd(points, weights, init, cfg);
  }
  KMeansSolution best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    auto& chain = chains[static_cast<std::size_t>(r)];
    if (chain.cost < best.cost) {
      best.centers = std::move(chain.centers);
      best.cost = chain.cost;
      best.iters = chain.iters;
      best.best_restart = r;
    }
  }
  return best;
}

}  // namespace okm
