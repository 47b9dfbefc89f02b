#include "okm/bench.hpp"

#include "okm/recipes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

namespace okm::bench {

namespace {

constexpr const char* kTimingNote = "time covers scoring, solving and evaluation; dataset ingestion is excluded";
constexpr const char* kRecallNote = "recall is measured on the final z-farthest set Z(C) over the full dataset";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ContractViolation("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ContractViolation("config key '" + std::string(key) + "': expected true/false, got '" + std::string(value) +
                          "'");
}

std::vector<std::uint64_t> parse_seeds(std::string_view value) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(value)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_number<std::uint64_t>("seeds", item));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>("seeds", trim(std::string_view(item).substr(0, dots)));
    const auto hi = parse_number<std::uint64_t>("seeds", trim(std::string_view(item).substr(dots + 2)));
    require(lo <= hi, "seeds: empty range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

void set_key(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  auto& ds = cfg.dataset;
  if (key == "name") {
    cfg.name = value;
  } else if (key == "dataset") {
    ds.source = value;
  } else if (key == "csv.has_labels") {
    ds.csv.has_labels = parse_bool(key, value);
  } else if (key == "csv.has_mask") {
    ds.csv.has_mask = parse_bool(key, value);
  } else if (key == "csv.skip_header") {
    ds.csv.skip_header = parse_bool(key, value);
  } else if (key == "normalize") {
    ds.normalize = parse_bool(key, value);
  } else if (key == "inject.fraction") {
    ds.inject_fraction = parse_number<double>(key, value);
  } else if (key == "inject.xi") {
    ds.inject_xi = parse_number<double>(key, value);
  } else if (key == "outlier_classes") {
    ds.outlier_classes = value;
  } else if (key == "data_seed") {
    ds.seed = parse_number<std::uint64_t>(key, value);
  } else if (key.rfind("recipe.", 0) == 0 || key.rfind("planted.", 0) == 0) {
    ds.params[std::string(key)] = value;
  } else if (key == "k") {
    cfg.k = parse_number<Index>(key, value);
  } else if (key == "z") {
    if (value == "auto") {
      cfg.z.reset();
    } else {
      cfg.z = parse_number<Index>(key, value);
    }
  } else if (key == "objective") {
    cfg.objective = parse_objective(value);
  } else if (key == "methods") {
    cfg.methods = split_list(value);
  } else if (key == "coreset") {
    cfg.coreset = parse_number<Index>(key, value);
  } else if (key.rfind("coreset.", 0) == 0) {
    cfg.coreset_by_method[std::string(key.substr(8))] = parse_number<Index>(key, value);
  } else if (key == "seeds") {
    cfg.seeds = parse_seeds(value);
  } else if (key == "solver.max_iters") {
    cfg.max_iters = parse_number<int>(key, value);
  } else if (key == "solver.rel_tol") {
    cfg.rel_tol = parse_number<double>(key, value);
  } else if (key == "solver.restarts") {
    cfg.restarts = parse_number<int>(key, value);
  } else if (key == "timing") {
    cfg.timing = parse_bool(key, value);
  } else if (key == "format") {
    cfg.format = parse_format(value);
  } else if (key == "output") {
    cfg.output = value;
  } else if (key == "workers") {
    cfg.workers = parse_number<int>(key, value);
  } else {
    throw ContractViolation("unknown config key '" + std::string(key) + "'");
  }
}

double param_real(const DatasetSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : parse_number<double>(key, it->second);
}

Index param_index(const DatasetSpec& spec, const std::string& key, Index fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : parse_number<Index>(key, it->second);
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};

// Population statistics over values sorted first, so the result does not
// depend on completion order.
Summary summarize(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

std::string fmt_cost(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", x);
  return buf;
}

std::string fmt_fixed(const std::optional<double>& x, const char* missing) {
  if (!x) return missing;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

int resolve_workers(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("OKM_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 1;
}

struct RunRecord {
  double cost = 0.0;
  std::optional<double> recall;
  double elapsed = 0.0;
  std::string error;
};

}  // namespace

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  if (text == "markdown" || text == "md") return ReportFormat::markdown;
  throw ContractViolation("unknown report format '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  require(!seeds.empty(), "config needs at least one seed");
  require(!methods.empty(), "config needs at least one method");
  require(k >= 1, "config needs k >= 1");
  if (z) require(*z >= 0, "config needs z >= 0");
  require(max_iters >= 1 && restarts >= 1 && rel_tol >= 0.0, "invalid solver settings");
  require(coreset >= 0, "coreset size must be nonnegative");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    view = trim(view.substr(0, view.find('#')));
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value", line_no, 0);
    }
    set_key(cfg, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path.string() + "'", 0, 0);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string_view::npos, "override '" + std::string(assignment) + "' is not key=value");
  set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string example_config() {
  return R"(# Experiment configuration: one "key = value" per line, '#' starts a comment.
# Any key can be overridden on the command line with --set key=value.

name = shuttle_like

# Data source: recipe:shuttle_like | recipe:skin_like | recipe:susy_like |
# recipe:planted | path/to/file.csv
dataset = recipe:shuttle_like
recipe.scale = 1.0          # shuttle_like: multiplier on the large classes
# recipe.n = 24000          # skin_like / susy_like: number of points
# planted.k, planted.cluster_size, planted.z, planted.separation,
# planted.spread, planted.d configure recipe:planted

# CSV ingestion (ignored for recipes)
csv.has_labels = false      # last column holds integer class labels
csv.has_mask = false        # column before the labels holds 0/1 outlier flags
csv.skip_header = false

normalize = true            # z-score every column before injection
# inject.fraction = 0.01    # append this fraction of uniform hypercube outliers
# inject.xi = 5             # hypercube half-width
outlier_classes = smallest:2   # or a comma list of labels
data_seed = 0

k = 10
z = auto                    # auto: number of ground-truth outliers
objective = kmeans          # kmeans | kmedian | kcenter (evaluation only)

# okmeans:<c> | okmeans2:<c> | constk:<K> | kmeanspp | registered baseline name
methods = okmeans:3, okmeans2:3, kmeanspp
coreset = 0                 # uniform coreset size for all methods, 0 = none
# coreset.kmeanspp = 10000  # per-method override

seeds = 0..9
solver.max_iters = 100
solver.rel_tol = 1e-6
solver.restarts = 3

timing = true               # false prints "-" in time columns
format = markdown           # csv | json | markdown
output =                    # empty: stdout
workers = 0                 # 0: OKM_WORKERS environment variable, else 1
)";
}

Index coreset_size(const ExperimentConfig& config, const std::string& method) {
  const auto it = config.coreset_by_method.find(method);
  return it == config.coreset_by_method.end() ? config.coreset : it->second;
}

Dataset build_dataset(const DatasetSpec& spec) {
  Dataset data;
  if (spec.source.rfind("recipe:", 0) == 0) {
    const std::string recipe = spec.source.substr(7);
    if (recipe == "shuttle_like") {
      data = recipes::shuttle_like(spec.seed, param_real(spec, "recipe.scale", 1.0));
    } else if (recipe == "skin_like") {
      data = recipes::skin_like(spec.seed, param_index(spec, "recipe.n", 24000));
    } else if (recipe == "susy_like") {
      data = recipes::susy_like(spec.seed, param_index(spec, "recipe.n", 20000));
    } else if (recipe == "planted") {
      PlantedSpec p;
      p.k = param_index(spec, "planted.k", 3);
      p.cluster_size = param_index(spec, "planted.cluster_size", 50);
      p.z = param_index(spec, "planted.z", 5);
      p.separation = param_real(spec, "planted.separation", 20.0);
      p.spread = param_real(spec, "planted.spread", 1.0);
      p.d = param_index(spec, "planted.d", 2);
      p.outlier_distance = param_real(spec, "planted.outlier_distance", 0.0);
      p.seed = spec.seed;
      data = generate_planted(p).data;
    } else {
      throw ContractViolation("unknown recipe '" + recipe + "'");
    }
  } else {
    data = load_csv(spec.source, spec.csv);
  }
  data.validate();

  if (spec.normalize) data = normalize_zscore(data);
  if (spec.inject_fraction > 0.0) data = inject_outliers(data, spec.inject_fraction, spec.inject_xi, spec.seed);
  if (!spec.outlier_classes.empty()) data = apply_outlier_classes(data, spec.outlier_classes);
  return data;
}

Dataset apply_outlier_classes(const Dataset& data, std::string_view classes_spec) {
  require(data.labels.has_value(), "outlier_classes needs labelled data");
  std::set<int> classes;
  const std::string spec(classes_spec);
  if (spec.rfind("smallest:", 0) == 0) {
    const auto count = parse_number<std::size_t>("outlier_classes", std::string_view(spec).substr(9));
    // Injected points carry label -1 and are not a class of the source data.
    std::vector<int> source_labels;
    for (std::size_t i = 0; i < data.labels->size(); ++i) {
      const bool injected = (*data.labels)[i] == -1 && data.true_outliers && (*data.true_outliers)[i];
      if (!injected) source_labels.push_back((*data.labels)[i]);
    }
    classes = smallest_classes(source_labels, count);
  } else {
    for (const auto& item : split_list(spec)) classes.insert(parse_number<int>("outlier_classes", item));
  }
  const std::vector<bool> before = data.true_outliers.value_or(std::vector<bool>(data.labels->size(), false));
  Dataset out = mark_label_outliers(data, classes);
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i]) (*out.true_outliers)[i] = true;
  }
  return out;
}

std::optional<double> recall(const IndexSet& selected, const std::optional<std::vector<bool>>& truth) {
  if (!truth) return std::nullopt;
  const auto total = std::count(truth->begin(), truth->end(), true);
  if (total == 0) return std::nullopt;
  std::size_t hit = 0;
  for (Index i : selected) {
    if ((*truth)[static_cast<std::size_t>(i)]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& config, const BaselineRegistry& registry) {
  config.validate();
  RobustInstance instance;
  instance.data = build_dataset(config.dataset);
  instance.k = config.k;
  instance.z = config.z.value_or(instance.data.outlier_count());
  instance.validate();

  struct Job {
    std::size_t method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    for (auto seed : config.seeds) jobs.push_back({m, seed});
  }

  const auto run_one = [&](const Job& job) {
    RunRecord record;
    const std::string& spec = config.methods[job.method];
    try {
      SolverConfig solver;
      solver.k = config.k;
      solver.max_iters = config.max_iters;
      solver.rel_tol = config.rel_tol;
      solver.restarts = config.restarts;
      solver.seed = job.seed;
      ClusteringResult result;
      if (const Baseline* external = registry.find(spec)) {
        result = external->run(instance, solver);
      } else {
        Method method = Method::parse(spec);
        method.solver = solver;
        method.objective = config.objective;
        std::optional<CoresetSpec> coreset;
        if (const Index m = coreset_size(config, spec); m > 0) {
          coreset = CoresetSpec{m, mix_seed(job.seed, 0xC0)};
        }
        result = run_pipeline(instance, method, coreset);
      }
      record.cost = result.robust_cost;
      record.recall = recall(result.outliers, instance.data.true_outliers);
      record.elapsed = result.elapsed;
    } catch (const std::exception& e) {
      record.error = e.what();
    }
    return record;
  };

  std::vector<RunRecord> records(jobs.size());
  const std::size_t workers = static_cast<std::size_t>(resolve_workers(config.workers));
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) records[j] = run_one(jobs[j]);
  } else {
    for (std::size_t first = 0; first < jobs.size(); first += workers) {
      std::vector<std::future<RunRecord>> batch;
      const std::size_t last = std::min(jobs.size(), first + workers);
      for (std::size_t j = first; j < last; ++j) batch.push_back(std::async(std::launch::async, run_one, jobs[j]));
      for (std::size_t j = first; j < last; ++j) records[j] = batch[j - first].get();
    }
  }

  std::vector<ReportRow> rows;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    ReportRow row;
    const std::string& spec = config.methods[m];
    if (registry.find(spec) != nullptr) {
      row.method = spec;
    } else {
      try {
        row.method = Method::parse(spec).name();
      } catch (const std::exception&) {
        row.method = spec;
      }
    }
    row.dataset = config.name;
    std::vector<double> costs;
    std::vector<double> recalls;
    std::vector<double> times;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].method != m) continue;
      const RunRecord& r = records[j];
      if (!r.error.empty()) {
        row.status = "failed: " + r.error;
        break;
      }
      costs.push_back(r.cost);
      if (r.recall) recalls.push_back(*r.recall);
      times.push_back(r.elapsed);
    }
    if (row.status == "ok") {
      row.n_seeds = static_cast<int>(costs.size());
      row.cost_best = *std::min_element(costs.begin(), costs.end());
      const Summary cost = summarize(costs);
      row.cost_mean = cost.mean;
      row.cost_std = cost.std;
      if (!recalls.empty()) {
        const Summary rec = summarize(recalls);
        row.recall_mean = rec.mean;
        row.recall_std = rec.std;
      }
      if (config.timing) {
        const Summary t = summarize(times);
        row.time_mean_s = t.mean;
        row.time_std_s = t.std;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::csv: {
      out << "method,dataset,cost_best,cost_mean,cost_std,recall_mean,recall_std,time_mean_s,time_std_s,n_seeds,"
             "status\n";
      for (const auto& r : rows) {
        out << csv_field(r.method) << ',' << csv_field(r.dataset) << ',' << fmt_cost(r.cost_best) << ','
            << fmt_cost(r.cost_mean) << ',' << fmt_cost(r.cost_std) << ',' << fmt_fixed(r.recall_mean, "NA") << ','
            << fmt_fixed(r.recall_std, "NA") << ',' << fmt_fixed(r.time_mean_s, "-") << ','
            << fmt_fixed(r.time_std_s, "-") << ',' << r.n_seeds << ',' << csv_field(r.status) << '\n';
      }
      break;
    }
    case ReportFormat::json: {
      nlohmann::ordered_json doc;
      doc["timing_scope"] = kTimingNote;
      doc["recall_source"] = kRecallNote;
      doc["rows"] = nlohmann::ordered_json::array();
      const auto opt = [](const std::optional<double>& x) {
        return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
      };
      for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["method"] = r.method;
        row["dataset"] = r.dataset;
        row["cost_best"] = r.cost_best;
        row["cost_mean"] = r.cost_mean;
        row["cost_std"] = r.cost_std;
        row["recall_mean"] = opt(r.recall_mean);
        row["recall_std"] = opt(r.recall_std);
        row["time_mean_s"] = opt(r.time_mean_s);
        row["time_std_s"] = opt(r.time_std_s);
        row["n_seeds"] = r.n_seeds;
        row["status"] = r.status;
        doc["rows"].push_back(std::move(row));
      }
      out << doc.dump(2) << '\n';
      break;
    }
    case ReportFormat::markdown: {
      out << "> " << kTimingNote << "; " << kRecallNote << ".\n\n";
      out << "| method | dataset | cost best | cost mean | cost std | recall mean | recall std | time mean (s) | "
             "time std (s) | seeds | status |\n";
      out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
      for (const auto& r : rows) {
        out << "| " << r.method << " | " << r.dataset << " | " << fmt_cost(r.cost_best) << " | "
            << fmt_cost(r.cost_mean) << " | " << fmt_cost(r.cost_std) << " | " << fmt_fixed(r.recall_mean, "NA")
            << " | " << fmt_fixed(r.recall_std, "NA") << " | " << fmt_fixed(r.time_mean_s, "-") << " | "
            << fmt_fixed(r.time_std_s, "-") << " | " << r.n_seeds << " | " << r.status << " |\n";
      }
      break;
    }
  }
  return out.str();
}

std::vector<ReportRow> rows_from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  const auto opt = [](const nlohmann::json& x) -> std::optional<double> {
    if (x.is_null()) return std::nullopt;
    return x.get<double>();
  };
  std::vector<ReportRow> rows;
  for (const auto& j : doc.at("rows")) {
    ReportRow r;
    r.method = j.at("method").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.cost_best = j.at("cost_best").get<double>();
    r.cost_mean = j.at("cost_mean").get<double>();
    r.cost_std = j.at("cost_std").get<double>();
    r.recall_mean = opt(j.at("recall_mean"));
    r.recall_std = opt(j.at("recall_std"));
    r.time_mean_s = opt(j.at("time_mean_s"));
    r.time_std_s = opt(j.at("time_std_s"));
    r.n_seeds = j.at("n_seeds").get<int>();
    r.status = j.at("status").get<std::string>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace okm::bench
