#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace okm {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Matrix = RowMatrix<double>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Sorted ascending, no duplicates.
using IndexSet = std::vector<Index>;

// k x d, one center per row.
using CenterSet = Matrix;

enum class Objective { kmeans, kmedian, kcenter };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

// A precondition of an operation was not met by the caller.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, long row, long column)
      : std::runtime_error(message), row_(row), column_(column) {}

  // 1-based; 0 when the error is not tied to a cell.
  long row() const noexcept { return row_; }
  long column() const noexcept { return column_; }

 private:
  long row_;
  long column_;
};

// Numeric routine failed to produce a result satisfying its postcondition.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive search would exceed its enumeration budget.
class SizeError : public std::runtime_error {
 public:
  SizeError(const std::string& message, double bound)
      : std::runtime_error(message), bound_(bound) {}

  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

// splitmix64 step; used to derive independent PRNG streams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace okm
