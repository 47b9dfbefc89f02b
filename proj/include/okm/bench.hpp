#pragma once

#include "okm/robust.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace okm::bench {

enum class ReportFormat { csv, json, markdown };

ReportFormat parse_format(std::string_view text);

struct DatasetSpec {
  // "recipe:<name>" (shuttle_like, skin_like, susy_like, planted) or a CSV path.
  std::string source = "recipe:planted";
  CsvOptions csv;
  bool normalize = false;
  double inject_fraction = 0.0;  // 0 disables injection
  double inject_xi = 5.0;
  // Empty: no label-derived outliers. "smallest:N" or a comma list of labels.
  std::string outlier_classes;
  std::uint64_t seed = 0;
  // recipe.* and planted.* parameters, kept verbatim.
  std::map<std::string, std::string> params;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DatasetSpec dataset;
  std::vector<std::string> methods;  // "okmeans:3", "kmeanspp", or a registered baseline name
  Index coreset = 0;                  // uniform coreset size for every method; 0 disables
  std::map<std::string, Index> coreset_by_method;  // per-method override, 0 disables
  std::vector<std::uint64_t> seeds = {0};
  Index k = 1;
  std::optional<Index> z;  // unset: number of ground-truth outliers
  Objective objective = Objective::kmeans;
  int max_iters = 100;
  double rel_tol = 1e-6;
  int restarts = 3;
  bool timing = true;  // false writes "-" for time columns (byte-stable reports)
  ReportFormat format = ReportFormat::markdown;
  std::string output;  // empty: stdout
  int workers = 0;  // 0: OKM_WORKERS from the environment, else 1

  void validate() const;
};

// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Applies one "key=value" override on top of an existing config.
void apply_override(ExperimentConfig& config, std::string_view assignment);

// The annotated example shipped as configs/example.cfg.
std::string example_config();

struct ReportRow {
  std::string method;
  std::string dataset;
  double cost_best = 0.0;
  double cost_mean = 0.0;
  double cost_std = 0.0;
  std::optional<double> recall_mean;
  std::optional<double> recall_std;
  std::optional<double> time_mean_s;
  std::optional<double> time_std_s;
  int n_seeds = 0;
  std::string status = "ok";  // or the failure reason
};

// Coreset size applied to `method` (0 when none).
Index coreset_size(const ExperimentConfig& config, const std::string& method);

// Marks label-derived outliers ("smallest:N" or a comma list of labels) on
// top of any existing mask.
Dataset apply_outlier_classes(const Dataset& data, std::string_view classes_spec);

// Dataset after ingestion, normalisation, injection and label marking.
Dataset build_dataset(const DatasetSpec& spec);

// One pipeline per (method, seed). Rows follow the method order of the
// config; a method whose pipeline throws reports the error in `status`.
std::vector<ReportRow> run_experiment(const ExperimentConfig& config,
                                      const BaselineRegistry& registry = BaselineRegistry::with_builtins());

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format);
std::vector<ReportRow> rows_from_json(std::string_view text);

// |selected ∩ truth| / |truth|; nullopt when the mask is absent or empty.
std::optional<double> recall(const IndexSet& selected, const std::optional<std::vector<bool>>& truth);

}  // namespace okm::bench
