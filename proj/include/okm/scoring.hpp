#pragma once

#include "okm/knn.hpp"

#include <filesystem>
#include <string>

namespace okm {

enum class ScoreRule { vanilla_radius, midrange_sum, constant_k };

std::string_view to_string(ScoreRule rule);

/// Per-point outlier scores. `rank_lo..rank_hi` are the self-inclusive
/// neighbour ranks that entered each score (a single rank for the radius
/// rules, an interval for the mid-range sum).
struct ScoreVector {
  Vector scores;
  ScoreRule rule = ScoreRule::vanilla_radius;
  Index z = 0;
  double c = 0.0;  // unused for constant_k
  Index K = 0;     // constant_k only
  Index rank_lo = 0;
  Index rank_hi = 0;

  Index size() const { return scores.size(); }
};

// Self-inclusive rank arithmetic shared by every rule.
Index vanilla_rank(Index z, double c);                     // floor((c + 1) z / 2)
std::pair<Index, Index> midrange_ranks(Index z, double c);  // [z + 1, floor(c z)]
Index constant_k_rank(Index K);                            // K + 1

// Neighbour-table width each rule needs.
Index required_width(ScoreRule rule, Index z, double c, Index K);

ScoreVector score_vanilla(const NeighborTable& table, Index z, double c);
ScoreVector score_midrange_sum(const NeighborTable& table, Index z, double c);
ScoreVector score_constant_k(const NeighborTable& table, Index K);

// The z indices with the largest scores (lower index wins ties), sorted.
IndexSet select_outliers(const ScoreVector& scores, Index z);

// index,score,selected rows under a header line.
void save_scores_csv(const ScoreVector& scores, const IndexSet& selected, const std::filesystem::path& path);

}  // namespace okm
