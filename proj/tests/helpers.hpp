#pragma once

#include "okm/core.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <string>
#include <unistd.h>

namespace okm::testing {

inline Matrix line(std::initializer_list<double> xs) {
  Matrix m(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

inline Dataset dataset(const Matrix& points) {
  Dataset d;
  d.points = points;
  return d;
}

inline Matrix gaussian(Index n, Index d, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

// Scratch file under the system temp dir, removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& stem, const std::string& contents = {}) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("okm_" + stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    if (!contents.empty()) {
      std::ofstream(path_, std::ios::binary) << contents;
    }
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace okm::testing
