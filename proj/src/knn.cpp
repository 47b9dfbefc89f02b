#include "okm/knn.hpp"

#include <algorithm>

namespace okm {

namespace {

using Candidate = std::pair<double, Index>;  // (squared distance, index); lexicographic order

// Keeps the K smallest candidates seen so far as a max-heap.
void offer(std::vector<Candidate>& heap, Index K, Candidate c) {
  if (static_cast<Index>(heap.size()) < K) {
    heap.push_back(c);
    std::push_heap(heap.begin(), heap.end());
  } else if (c < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = c;
    std::push_heap(heap.begin(), heap.end());
  }
}

}  // namespace

NeighborTable knn_table(const Dataset& data, Index K, const KnnOptions& options) {
  return knn_table(data.points, K, options);
}

NeighborTable knn_table(const Matrix& points, Index K, const KnnOptions& options) {
  const Index n = points.rows();
  require(K >= 1, "knn_table needs K >= 1");
  require(K <= n, "knn_table needs K <= n; got K=" + std::to_string(K) + ", n=" + std::to_string(n));
  const Index block = std::max<Index>(1, options.block_rows);
  // Column tiles keep each distance block small enough to stay in cache.
  constexpr Index tile = 2048;

  NeighborTable table;
  table.K = K;
  table.dists.resize(n, K);

  const Index blocks = (n + block - 1) / block;
#pragma omp parallel for schedule(dynamic)
  for (Index b = 0; b < blocks; ++b) {
    const Index first = b * block;
    const Index rows = std::min(block, n - first);
    std::vector<std::vector<Candidate>> heaps(static_cast<std::size_t>(rows));
    for (auto& h : heaps) h.reserve(static_cast<std::size_t>(K));

    for (Index col = 0; col < n; col += tile) {
      const Index cols = std::min(tile, n - col);
      const Matrix sq = pairwise_sq_dists_block(points.middleRows(first, rows), points.middleRows(col, cols));
      for (Index r = 0; r < rows; ++r) {
        auto& heap = heaps[static_cast<std::size_t>(r)];
        const double* row = sq.data() + r * cols;
        Index j = 0;
        for (; j < cols && static_cast<Index>(heap.size()) < K; ++j) offer(heap, K, {row[j], col + j});
        // Cheap rejection against the current K-th distance before touching the heap.
        double worst = heap.empty() ? 0.0 : heap.front().first;
        for (; j < cols; ++j) {
          if (row[j] > worst) continue;
          offer(heap, K, {row[j], col + j});
          worst = heap.front().first;
        }
      }
    }

    // Re-measure the selected neighbours directly so exact duplicates
    // (including the point itself) come out at exactly zero.
    for (Index r = 0; r < rows; ++r) {
      const Index query = first + r;
      auto& picked = heaps[static_cast<std::size_t>(r)];
      for (auto& [d2, other] : picked) d2 = (points.row(query) - points.row(other)).squaredNorm();
      std::sort(picked.begin(), picked.end());
      for (Index j = 0; j < K; ++j) table.dists(query, j) = std::sqrt(picked[static_cast<std::size_t>(j)].first);
    }
  }
  return table;
}

}  // namespace okm
