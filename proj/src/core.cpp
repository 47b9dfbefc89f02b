#include "okm/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace okm {

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::kmeans:
      return "kmeans";
    case Objective::kmedian:
      return "kmedian";
    case Objective::kcenter:
      return "kcenter";
  }
  return "kmeans";
}

Objective parse_objective(std::string_view text) {
  if (text == "kmeans") return Objective::kmeans;
  if (text == "kmedian") return Objective::kmedian;
  if (text == "kcenter") return Objective::kcenter;
  throw ContractViolation("unknown objective '" + std::string(text) + "'");
}

void Dataset::validate() const {
  require(points.rows() >= 1, "dataset '" + name + "' has no points");
  require(points.cols() >= 1, "dataset '" + name + "' has zero dimensions");
  require(points.allFinite(), "dataset '" + name + "' has non-finite coordinates");
  if (labels) require(static_cast<Index>(labels->size()) == size(), "label count differs from n");
  if (true_outliers) {
    require(static_cast<Index>(true_outliers->size()) == size(), "outlier mask length differs from n");
  }
}

Index Dataset::outlier_count() const {
  if (!true_outliers) return 0;
  return std::count(true_outliers->begin(), true_outliers->end(), true);
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Dataset out;
  out.name = name;
  out.points.resize(static_cast<Index>(rows.size()), dim());
  for (std::size_t r = 0; r < rows.size(); ++r) out.points.row(static_cast<Index>(r)) = points.row(rows[r]);
  if (labels) {
    out.labels.emplace();
    out.labels->reserve(rows.size());
    for (Index r : rows) out.labels->push_back((*labels)[static_cast<std::size_t>(r)]);
  }
  if (true_outliers) {
    out.true_outliers.emplace();
    out.true_outliers->reserve(rows.size());
    for (Index r : rows) out.true_outliers->push_back((*true_outliers)[static_cast<std::size_t>(r)]);
  }
  return out;
}

void RobustInstance::validate() const {
  data.validate();
  const Index n = data.size();
  require(k >= 1 && k <= n, "k must lie in [1, n]; got k=" + std::to_string(k) + ", n=" + std::to_string(n));
  require(z >= 0 && z <= n - k,
          "z must lie in [0, n - k]; got z=" + std::to_string(z) + ", n=" + std::to_string(n) +
              ", k=" + std::to_string(k));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, long row, long col) {
  cell = trim(cell);
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("non-numeric cell '" + std::string(cell) + "' at row " + std::to_string(row) +
                         " col " + std::to_string(col),
                     row, col);
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);

  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  long data_row = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.skip_header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    ++data_row;
    std::vector<double> values;
    std::string_view rest(line);
    long col = 0;
    while (true) {
      ++col;
      const auto comma = rest.find(',');
      values.push_back(parse_cell(rest.substr(0, comma), data_row, col));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows.empty()) {
      arity = values.size();
    } else if (values.size() != arity) {
      throw ParseError("ragged row " + std::to_string(data_row) + ": expected " + std::to_string(arity) +
                           " columns, found " + std::to_string(values.size()),
                       data_row, static_cast<long>(std::min(values.size(), arity) + 1));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("empty file '" + path.string() + "'", 0, 0);

  const std::size_t extra = (options.has_labels ? 1 : 0) + (options.has_mask ? 1 : 0);
  if (arity <= extra) {
    throw ParseError("no feature columns left after labels/mask in '" + path.string() + "'", 1,
                     static_cast<long>(arity));
  }
  const std::size_t d = arity - extra;

  Dataset data;
  data.name = path.stem().string();
  data.points.resize(static_cast<Index>(rows.size()), static_cast<Index>(d));
  if (options.has_labels) data.labels.emplace(rows.size());
  if (options.has_mask) data.true_outliers.emplace(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) data.points(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    if (options.has_mask) {
      const double flag = rows[r][d];
      if (flag != 0.0 && flag != 1.0) {
        throw ParseError("outlier flag must be 0 or 1 at row " + std::to_string(r + 1), static_cast<long>(r + 1),
                         static_cast<long>(d + 1));
      }
      (*data.true_outliers)[r] = flag == 1.0;
    }
    if (options.has_labels) {
      const double label = rows[r][arity - 1];
      if (label != std::floor(label)) {
        throw ParseError("label must be an integer at row " + std::to_string(r + 1), static_cast<long>(r + 1),
                         static_cast<long>(arity));
      }
      (*data.labels)[r] = static_cast<int>(label);
    }
  }
  return data;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  char buf[64];
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) {
      if (j > 0) out << ',';
      const auto res = std::to_chars(buf, buf + sizeof(buf), data.points(i, j));
      out.write(buf, res.ptr - buf);
    }
    if (data.true_outliers) out << ',' << ((*data.true_outliers)[static_cast<std::size_t>(i)] ? 1 : 0);
    if (data.labels) out << ',' << (*data.labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

Dataset normalize_zscore(const Dataset& data) {
  require(data.size() >= 2, "normalize_zscore needs at least 2 points");
  Dataset out = data;
  const double n = static_cast<double>(data.size());
  for (Index j = 0; j < data.dim(); ++j) {
    auto col = out.points.col(j);
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    // Rounding noise on a constant column is treated as zero variance.
    if (sd == 0.0 || sd <= 1e-12 * std::abs(mean)) {
      col.setZero();
    } else {
      col /= sd;
    }
  }
  return out;
}

Dataset inject_outliers(const Dataset& data, double fraction, double xi, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, "injection fraction must lie in (0, 1)");
  require(xi > 0.0, "hypercube half-width xi must be positive");
  const Index n = data.size();
  const Index extra = std::max<Index>(1, std::llround(fraction * static_cast<double>(n)));

  Dataset out;
  out.name = data.name;
  out.points.resize(n + extra, data.dim());
  out.points.topRows(n) = data.points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-xi, xi);
  for (Index i = n; i < n + extra; ++i) {
    for (Index j = 0; j < data.dim(); ++j) out.points(i, j) = coord(rng);
  }

  out.true_outliers = data.true_outliers.value_or(std::vector<bool>(static_cast<std::size_t>(n), false));
  out.true_outliers->resize(static_cast<std::size_t>(n + extra), true);
  if (data.labels) {
    out.labels = data.labels;
    out.labels->resize(static_cast<std::size_t>(n + extra), -1);
  }
  return out;
}

Dataset mark_label_outliers(const Dataset& data, const std::set<int>& outlier_classes) {
  require(data.labels.has_value(), "mark_label_outliers needs class labels");
  Dataset out = data;
  out.true_outliers.emplace(data.labels->size());
  for (std::size_t i = 0; i < data.labels->size(); ++i) {
    (*out.true_outliers)[i] = outlier_classes.count((*data.labels)[i]) > 0;
  }
  return out;
}

std::set<int> smallest_classes(const std::vector<int>& labels, std::size_t count) {
  std::map<int, std::size_t> sizes;
  for (int l : labels) ++sizes[l];
  std::vector<std::pair<std::size_t, int>> order;
  for (const auto& [label, size] : sizes) order.emplace_back(size, label);
  std::sort(order.begin(), order.end());
  std::set<int> out;
  for (std::size_t i = 0; i < std::min(count, order.size()); ++i) out.insert(order[i].second);
  return out;
}

CostEvaluation evaluate_cost(const Dataset& data, const CenterSet& centers, Index z, Objective objective) {
  return evaluate_cost(data.points, centers, z, objective);
}

CostEvaluation evaluate_cost(const Matrix& points, const CenterSet& centers, Index z, Objective objective) {
  require(centers.rows() >= 1, "evaluate_cost needs at least one center");
  require(centers.cols() == points.cols(), "center dimension differs from data dimension");
  const Index n = points.rows();
  require(z >= 0 && z <= n - 1, "evaluate_cost needs 0 <= z <= n - 1");

  Vector sq;
  std::vector<Index> which;
  nearest_center(points, centers, sq, which);

  // Farthest first; among equal distances the lower index comes first.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return sq(a) > sq(b); });

  CostEvaluation eval;
  eval.outliers.assign(order.begin(), order.begin() + z);
  std::sort(eval.outliers.begin(), eval.outliers.end());
  eval.assignment = which;
  for (Index i : eval.outliers) eval.assignment[static_cast<std::size_t>(i)] = -1;
  eval.distances = sq.cwiseSqrt();

  // Kept points are summed in ascending order of distance, so the total is
  // a monotone function of the multiset of kept distances.
  double total = 0.0;
  for (auto it = order.rbegin(); it != order.rend() - z; ++it) {
    const Index i = *it;
    switch (objective) {
      case Objective::kmeans:
        total += sq(i);
        break;
      case Objective::kmedian:
        total += eval.distances(i);
        break;
      case Objective::kcenter:
        total = std::max(total, eval.distances(i));
        break;
    }
  }
  eval.cost = total;
  return eval;
}

RobustInstance generate_planted(Index k, Index cluster_size, Index z, double separation, double spread, Index d,
                                std::uint64_t seed) {
  PlantedSpec spec;
  spec.k = k;
  spec.cluster_size = cluster_size;
  spec.z = z;
  spec.separation = separation;
  spec.spread = spread;
  spec.d = d;
  spec.seed = seed;
  return generate_planted(spec);
}

RobustInstance generate_planted(const PlantedSpec& spec) {
  require(spec.k >= 1 && spec.cluster_size >= 1 && spec.d >= 1 && spec.z >= 0, "invalid planted-instance sizes");
  require(spec.separation > spec.spread && spec.spread >= 0.0, "planted instance needs separation > spread >= 0");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Blob centers: rejection sampling in a box, falling back to a line.
  const double box = spec.separation * static_cast<double>(spec.k);
  Matrix blob_centers = Matrix::Zero(spec.k, spec.d);
  bool placed = false;
  for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
    for (Index i = 0; i < spec.k; ++i) {
      for (Index j = 0; j < spec.d; ++j) blob_centers(i, j) = box * unit(rng);
    }
    placed = true;
    for (Index a = 0; a < spec.k && placed; ++a) {
      for (Index b = a + 1; b < spec.k && placed; ++b) {
        placed = (blob_centers.row(a) - blob_centers.row(b)).norm() >= spec.separation;
      }
    }
  }
  if (!placed) {
    blob_centers.setZero();
    for (Index i = 0; i < spec.k; ++i) blob_centers(i, 0) = spec.separation * static_cast<double>(i);
  }

  std::vector<Index> sizes(static_cast<std::size_t>(spec.k), spec.cluster_size);
  if (spec.cluster_size_max > spec.cluster_size) {
    std::uniform_int_distribution<Index> pick(spec.cluster_size, spec.cluster_size_max);
    for (auto& s : sizes) s = pick(rng);
  }
  const Index inliers = std::accumulate(sizes.begin(), sizes.end(), Index{0});
  const Index n = inliers + spec.z;

  Matrix points(n, spec.d);
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  Index row = 0;
  for (Index c = 0; c < spec.k; ++c) {
    for (Index s = 0; s < sizes[static_cast<std::size_t>(c)]; ++s, ++row) {
      for (Index j = 0; j < spec.d; ++j) points(row, j) = blob_centers(c, j) + spec.spread * gauss(rng);
      labels[static_cast<std::size_t>(row)] = static_cast<int>(c);
    }
  }

  const Eigen::RowVectorXd centroid = points.topRows(inliers).colwise().mean();
  double extent = 0.0;
  for (Index i = 0; i < inliers; ++i) extent = std::max(extent, (points.row(i) - centroid).norm());
  extent = std::max(extent + spec.spread, spec.separation);

  for (Index o = 0; o < spec.z; ++o, ++row) {
    Eigen::RowVectorXd dir(spec.d);
    do {
      for (Index j = 0; j < spec.d; ++j) dir(j) = gauss(rng);
    } while (dir.norm() < 1e-12);
    dir.normalize();
    const double radius = spec.outlier_distance > 0.0 ? spec.outlier_distance * extent * (0.5 + unit(rng))
                                                      : extent * (10.0 + 10.0 * unit(rng));
    points.row(row) = centroid + radius * dir;
  }

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);

  RobustInstance instance;
  instance.k = spec.k;
  instance.z = spec.z;
  instance.data.name = "planted";
  instance.data.points.resize(n, spec.d);
  instance.data.labels.emplace(static_cast<std::size_t>(n));
  instance.data.true_outliers.emplace(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index src = perm[static_cast<std::size_t>(i)];
    instance.data.points.row(i) = points.row(src);
    (*instance.data.labels)[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(src)];
    (*instance.data.true_outliers)[static_cast<std::size_t>(i)] = src >= inliers;
  }
  return instance;
}

}  // namespace okm
