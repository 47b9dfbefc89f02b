// Command-line harness: experiments, ratio tables, oracle sweeps and dataset
// preparation.

#include "okm/bench.hpp"
#include "okm/oracle.hpp"
#include "okm/theory.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::vector<double> parse_reals(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

int fail(const char* kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust k-means with KNN outlier removal"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment config and emit a report");
  std::string config_path;
  std::vector<std::string> overrides;
  std::string run_format;
  std::string run_output;
  run->add_option("config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", overrides, "Override a config key (key=value), repeatable");
  run->add_option("--format", run_format, "csv | json | markdown");
  run->add_option("--output,-o", run_output, "Report path (default: config 'output' or stdout)");

  // theory
  auto* theory = app.add_subcommand("theory", "Approximation-ratio table as CSV");
  std::string c_list = "2,3,4,5,10";
  double tol = 1e-12;
  std::string theory_output;
  theory->add_option("--c-list", c_list, "Comma-separated c values")->capture_default_str();
  theory->add_option("--tol", tol, "Residual tolerance of the root finder")->capture_default_str();
  theory->add_option("--output,-o", theory_output, "CSV path (default stdout)");

  // oracle-sweep
  auto* sweep = app.add_subcommand("oracle-sweep", "Worst achieved/optimal ratios against the exact oracle");
  int trials = 200;
  double sweep_c = 3.0;
  std::uint64_t sweep_seed = 0;
  okm::SweepFamily family;
  sweep->add_option("--trials", trials)->capture_default_str();
  sweep->add_option("--c", sweep_c)->capture_default_str();
  sweep->add_option("--seed", sweep_seed)->capture_default_str();
  sweep->add_option("--n-max", family.n_max)->capture_default_str();
  sweep->add_option("--k-max", family.k_max)->capture_default_str();
  sweep->add_flag("--easy", family.easy, "Far outliers and wide separation");

  // inject
  auto* inject = app.add_subcommand("inject", "Prepare a dataset: normalise, inject or mark outliers");
  std::string in_path;
  std::string out_path;
  okm::CsvOptions csv;
  bool normalize = false;
  double fraction = 0.0;
  double xi = 5.0;
  std::uint64_t inject_seed = 0;
  std::string classes;
  inject->add_option("--input,-i", in_path)->required()->check(CLI::ExistingFile);
  inject->add_option("--output,-o", out_path)->required();
  inject->add_flag("--labels", csv.has_labels, "Last input column holds class labels");
  inject->add_flag("--mask", csv.has_mask, "Input carries a 0/1 outlier column before the labels");
  inject->add_flag("--skip-header", csv.skip_header);
  inject->add_flag("--normalize", normalize, "z-score every column first");
  inject->add_option("--fraction", fraction, "Fraction of hypercube outliers to append");
  inject->add_option("--xi", xi, "Hypercube half-width")->capture_default_str();
  inject->add_option("--seed", inject_seed)->capture_default_str();
  inject->add_option("--outlier-classes", classes, "smallest:N or comma list of labels");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Run one method on a CSV and print the result as JSON");
  std::string cl_input;
  std::string cl_method = "okmeans:3";
  okm::Index cl_k = 1;
  okm::Index cl_z = 0;
  okm::Index cl_coreset = 0;
  std::uint64_t cl_seed = 0;
  okm::CsvOptions cl_csv;
  std::string cl_output;
  cluster->add_option("--input,-i", cl_input)->required()->check(CLI::ExistingFile);
  cluster->add_option("--method", cl_method, "okmeans:<c> | okmeans2:<c> | constk:<K> | kmeanspp")
      ->capture_default_str();
  cluster->add_option("--k", cl_k)->required();
  cluster->add_option("--z", cl_z)->required();
  cluster->add_option("--coreset", cl_coreset, "Uniform coreset size, 0 = none")->capture_default_str();
  cluster->add_option("--seed", cl_seed)->capture_default_str();
  cluster->add_flag("--labels", cl_csv.has_labels);
  cluster->add_flag("--mask", cl_csv.has_mask);
  cluster->add_flag("--skip-header", cl_csv.skip_header);
  cluster->add_option("--output,-o", cl_output, "JSON path (default stdout)");

  // scores
  auto* scores = app.add_subcommand("scores", "Export per-point outlier scores as CSV");
  std::string sc_input;
  std::string sc_rule = "vanilla";
  okm::Index sc_z = 1;
  double sc_c = 3.0;
  okm::Index sc_K = 2;
  std::string sc_output;
  okm::CsvOptions sc_csv;
  scores->add_option("--input,-i", sc_input)->required()->check(CLI::ExistingFile);
  scores->add_option("--rule", sc_rule, "vanilla | midrange | constk")->capture_default_str();
  scores->add_option("--z", sc_z)->capture_default_str();
  scores->add_option("--c", sc_c)->capture_default_str();
  scores->add_option("--K", sc_K)->capture_default_str();
  scores->add_flag("--labels", sc_csv.has_labels);
  scores->add_flag("--mask", sc_csv.has_mask);
  scores->add_flag("--skip-header", sc_csv.skip_header);
  scores->add_option("--output,-o", sc_output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), 64);
  }

  try {
    if (*run) {
      auto config = okm::bench::load_config(config_path);
      for (const auto& o : overrides) okm::bench::apply_override(config, o);
      if (!run_format.empty()) config.format = okm::bench::parse_format(run_format);
      if (!run_output.empty()) config.output = run_output;
      const auto rows = okm::bench::run_experiment(config);
      write_text(config.output, okm::bench::emit_report(rows, config.format));
    } else if (*theory) {
      const auto start = std::chrono::steady_clock::now();
      const auto table = okm::theory::ratio_table(parse_reals(c_list), tol);
      write_text(theory_output, table.to_csv());
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cerr << "theory table: " << table.rows.size() << " rows in " << secs << " s\n";
    } else if (*sweep) {
      const auto result = okm::ratio_sweep(family, trials, sweep_c, sweep_seed);
      std::cout << nlohmann::json{{"c", sweep_c},
                                  {"trials", result.trials},
                                  {"rejected", result.rejected},
                                  {"max_ratio_okmeans", result.max_ratio_okmeans},
                                  {"max_ratio_okmeans2", result.max_ratio_okmeans2},
                                  {"min_ratio", result.min_ratio},
                                  {"cost_never_increased", result.cost_never_increased}}
                       .dump(2)
                << '\n';
    } else if (*inject) {
      okm::Dataset data = okm::load_csv(in_path, csv);
      data.validate();
      if (normalize) data = okm::normalize_zscore(data);
      if (fraction > 0.0) data = okm::inject_outliers(data, fraction, xi, inject_seed);
      if (!classes.empty()) data = okm::bench::apply_outlier_classes(data, classes);
      okm::save_csv(data, out_path);
      std::cerr << "wrote " << data.size() << " x " << data.dim() << " points, " << data.outlier_count()
                << " marked outliers\n";
    } else if (*cluster) {
      okm::RobustInstance instance;
      instance.data = okm::load_csv(cl_input, cl_csv);
      instance.k = cl_k;
      instance.z = cl_z;
      okm::Method method = okm::Method::parse(cl_method);
      method.solver.k = cl_k;
      method.solver.seed = cl_seed;
      std::optional<okm::CoresetSpec> coreset;
      if (cl_coreset > 0) coreset = okm::CoresetSpec{cl_coreset, cl_seed};
      const auto result = okm::run_pipeline(instance, method, coreset);
      write_text(cl_output, okm::to_json(result).dump(2) + "\n");
    } else if (*scores) {
      const okm::Dataset data = okm::load_csv(sc_input, sc_csv);
      okm::ScoreRule rule = okm::ScoreRule::vanilla_radius;
      if (sc_rule == "midrange") {
        rule = okm::ScoreRule::midrange_sum;
      } else if (sc_rule == "constk") {
        rule = okm::ScoreRule::constant_k;
      } else if (sc_rule != "vanilla") {
        throw okm::ContractViolation("unknown rule '" + sc_rule + "'");
      }
      const auto table = okm::knn_table(data, okm::required_width(rule, sc_z, sc_c, sc_K));
      const okm::ScoreVector sv = rule == okm::ScoreRule::vanilla_radius ? okm::score_vanilla(table, sc_z, sc_c)
                                  : rule == okm::ScoreRule::midrange_sum ? okm::score_midrange_sum(table, sc_z, sc_c)
                                                                         : okm::score_constant_k(table, sc_K);
      okm::save_scores_csv(sv, okm::select_outliers(sv, sc_z), sc_output);
    }
  } catch (const okm::ParseError& e) {
    return fail("parse_error", e.what(), 3);
  } catch (const okm::ContractViolation& e) {
    return fail("contract_violation", e.what(), 2);
  } catch (const okm::SizeError& e) {
    return fail("size_error", e.what(), 5);
  } catch (const okm::SolverError& e) {
    return fail("solver_error", e.what(), 4);
  } catch (const std::exception& e) {
    return fail("error", e.what(), 1);
  }
  return 0;
}
