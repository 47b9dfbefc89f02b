#include "okm/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace okm {

namespace {

// A real rank bound such as 2.2 * 5 lands a hair under 11 in binary.
Index floor_rank(double x) { return static_cast<Index>(std::floor(x + 1e-9)); }

void require_width(const NeighborTable& table, Index needed, const char* rule) {
  require(table.K >= needed, std::string(rule) + ": neighbour table has K=" + std::to_string(table.K) +
                                 " but rank " + std::to_string(needed) + " is required (build it with K >= " +
                                 std::to_string(needed) + ")");
}

}  // namespace

std::string_view to_string(ScoreRule rule) {
  switch (rule) {
    case ScoreRule::vanilla_radius:
      return "vanilla_radius";
    case ScoreRule::midrange_sum:
      return "midrange_sum";
    case ScoreRule::constant_k:
      return "constant_k";
  }
  return "vanilla_radius";
}

Index vanilla_rank(Index z, double c) {
  require(c > 1.0, "c must exceed 1");
  require(z >= 1, "outlier scoring needs z >= 1");
  return floor_rank((c + 1.0) * static_cast<double>(z) / 2.0);
}

std::pair<Index, Index> midrange_ranks(Index z, double c) {
  require(c > 1.0, "c must exceed 1");
  require(z >= 1, "outlier scoring needs z >= 1");
  const Index hi = floor_rank(c * static_cast<double>(z));
  require(hi >= z + 1, "mid-range sum is empty: floor(c*z)=" + std::to_string(hi) + " < z+1=" +
                           std::to_string(z + 1));
  return {z + 1, hi};
}

Index constant_k_rank(Index K) {
  require(K >= 1, "constant-K scoring needs K >= 1");
  return K + 1;
}

Index required_width(ScoreRule rule, Index z, double c, Index K) {
  switch (rule) {
    case ScoreRule::vanilla_radius:
      return vanilla_rank(z, c);
    case ScoreRule::midrange_sum:
      return midrange_ranks(z, c).second;
    case ScoreRule::constant_k:
      return constant_k_rank(K);
  }
  return 0;
}

ScoreVector score_vanilla(const NeighborTable& table, Index z, double c) {
  const Index rank = vanilla_rank(z, c);
  require_width(table, rank, "score_vanilla");
  ScoreVector out;
  out.rule = ScoreRule::vanilla_radius;
  out.z = z;
  out.c = c;
  out.rank_lo = out.rank_hi = rank;
  out.scores = table.dists.col(rank - 1);
  return out;
}

ScoreVector score_midrange_sum(const NeighborTable& table, Index z, double c) {
  const auto [lo, hi] = midrange_ranks(z, c);
  require_width(table, hi, "score_midrange_sum");
  ScoreVector out;
  out.rule = ScoreRule::midrange_sum;
  out.z = z;
  out.c = c;
  out.rank_lo = lo;
  out.rank_hi = hi;
  out.scores = table.dists.middleCols(lo - 1, hi - lo + 1).rowwise().sum();
  return out;
}

ScoreVector score_constant_k(const NeighborTable& table, Index K) {
  const Index rank = constant_k_rank(K);
  require_width(table, rank, "score_constant_k");
  ScoreVector out;
  out.rule = ScoreRule::constant_k;
  out.K = K;
  out.rank_lo = out.rank_hi = rank;
  out.scores = table.dists.col(rank - 1);
  return out;
}

IndexSet select_outliers(const ScoreVector& scores, Index z) {
  const Index n = scores.size();
  require(z >= 0 && z <= n, "select_outliers needs 0 <= z <= n");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto& s = scores.scores;
  std::partial_sort(order.begin(), order.begin() + z, order.end(),
                    [&](Index a, Index b) { return s(a) > s(b) || (s(a) == s(b) && a < b); });
  IndexSet out(order.begin(), order.begin() + z);
  std::sort(out.begin(), out.end());
  return out;
}

void save_scores_csv(const ScoreVector& scores, const IndexSet& selected, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "index,score,selected\n";
  out.precision(17);
  for (Index i = 0; i < scores.size(); ++i) {
    const bool flagged = std::binary_search(selected.begin(), selected.end(), i);
    out << i << ',' << scores.scores(i) << ',' << (flagged ? 1 : 0) << '\n';
  }
}

}  // namespace okm
