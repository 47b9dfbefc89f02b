#include "okm/recipes.hpp"

#include <algorithm>
#include <random>

namespace okm::recipes {

namespace {

struct Blob {
  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;
  Index size;
  int label;
};

Dataset sample_blobs(const std::vector<Blob>& blobs, std::mt19937_64& rng, std::string name) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Index n = 0;
  for (const auto& b : blobs) n += b.size;
  const Index d = blobs.front().center.size();

  Dataset data;
  data.name = std::move(name);
  data.points.resize(n, d);
  data.labels.emplace();
  data.labels->reserve(static_cast<std::size_t>(n));
  Index row = 0;
  for (const auto& b : blobs) {
    for (Index i = 0; i < b.size; ++i, ++row) {
      for (Index j = 0; j < d; ++j) data.points(row, j) = b.center(j) + b.scale(j) * gauss(rng);
      data.labels->push_back(b.label);
    }
  }

  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  return data.subset(perm);
}

Eigen::RowVectorXd random_vector(Index d, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::RowVectorXd v(d);
  for (Index j = 0; j < d; ++j) v(j) = u(rng);
  return v;
}

std::vector<Blob> mixture(Index n, Index k, Index d, double box, double lo_scale, double hi_scale,
                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  std::vector<double> w(static_cast<std::size_t>(k));
  for (auto& x : w) x = weight(rng);
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<Blob> blobs;
  Index assigned = 0;
  for (Index c = 0; c < k; ++c) {
    const Index size = c + 1 == k ? n - assigned
                                  : static_cast<Index>(static_cast<double>(n) * w[static_cast<std::size_t>(c)] / total);
    assigned += size;
    blobs.push_back({random_vector(d, -box, box, rng), random_vector(d, lo_scale, hi_scale, rng), size,
                     static_cast<int>(c)});
  }
  return blobs;
}

}  // namespace

Dataset shuttle_like(std::uint64_t seed, double scale) {
  require(scale > 0.0, "shuttle_like needs a positive scale");
  std::mt19937_64 rng(seed);
  constexpr Index d = 9;
  struct ClassShape {
    int label;
    Index size;
    bool scaled;
  };
  const ClassShape classes[] = {{1, 34108, true}, {4, 6748, true}, {5, 2458, true}, {3, 132, true},
                                {2, 37, true},    {7, 11, false},  {6, 6, false}};

  std::vector<Blob> blobs;
  for (const auto& cls : classes) {
    Index size = cls.size;
    if (cls.scaled) size = std::max<Index>(37, static_cast<Index>(std::llround(static_cast<double>(size) * scale)));
    Blob b{random_vector(d, -20.0, 20.0, rng), random_vector(d, 1.0, 4.0, rng), size, cls.label};
    if (!cls.scaled) {
      // Rare classes: tight groups pushed well outside the bulk.
      Eigen::RowVectorXd dir = random_vector(d, -1.0, 1.0, rng);
      b.center = dir.normalized() * 140.0;
      b.scale = random_vector(d, 0.5, 1.5, rng);
    }
    blobs.push_back(std::move(b));
  }
  return sample_blobs(blobs, rng, "shuttle_like");
}

Dataset skin_like(std::uint64_t seed, Index n) {
  require(n >= 10, "skin_like needs n >= 10");
  std::mt19937_64 rng(seed);
  return sample_blobs(mixture(n, 10, 3, 4.0, 0.2, 0.8, rng), rng, "skin_like");
}

Dataset susy_like(std::uint64_t seed, Index n) {
  require(n >= 10, "susy_like needs n >= 10");
  std::mt19937_64 rng(seed);
  return sample_blobs(mixture(n, 10, 18, 2.0, 0.5, 1.5, rng), rng, "susy_like");
}

}  // namespace okm::recipes
