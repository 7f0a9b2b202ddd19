// quantbench command line: bench, transform and sweep.
//
// Exit codes: 0 success, 1 error, 2 results written but some cells failed
// (bench --allow-partial).

#include <quantbench/quantbench.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
namespace qb = quantbench;

namespace {

constexpr const char* kConfigKeys = R"(Config keys (JSON, or TOML for a .toml file):
  dataset             path to the CSV file (required)
  target_column       name of the binary label column (required)
  test_fraction       held-out share of rows, default 0.1
  split_seed          seed for the stratified split, default 0
  techniques          subset of ["QuantileTransform", "RoundQuantize", "KBinsDiscretize"]
  precisions          subset of ["F64", "F32", "I32"]; F64 is the baseline column
  n_quantiles         quantile transform knots, default 100
  n_bins              equal-width bins, default 10
  decimals            decimals kept by RoundQuantize, default 4
  round_mode          "decimals" (round to `decimals`) or "levels" (n_levels grid)
  n_levels            levels for round_mode "levels", default 4096
  timing_repetitions  odd number of timed fits per cell, default 11
  lr.l2_strength      L2 penalty, default 1.0
  lr.learning_rate    gradient descent step, default 0.1
  lr.max_iters        iteration cap, default 1000
  lr.tolerance        stop when max |gradient| falls below this, default 1e-6
  lr.seed             recorded with the model, default 0
  lr.cap_step         limit the step to 1/L of the loss, default true
The environment variable QUANTBENCH_SEED overrides split_seed.)";

struct Overrides {
  std::optional<std::string> dataset;
  std::optional<std::string> target;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repetitions;
};

qb::ExperimentConfig load_config(const std::string& path, const Overrides& o) {
  qb::json j = qb::read_config_document(path);
  if (!j.is_object()) throw qb::ConfigError("<root>", "expected an object");
  if (o.dataset) j["dataset"] = *o.dataset;
  if (o.target) j["target_column"] = *o.target;
  if (const char* env = std::getenv("QUANTBENCH_SEED"); env && *env) {
    try {
      j["split_seed"] = std::stoull(env);
    } catch (const std::exception&) {
      throw qb::ConfigError("QUANTBENCH_SEED", "not an unsigned integer: '" + std::string(env) + "'");
    }
  }
  if (o.seed) j["split_seed"] = *o.seed;
  if (o.repetitions) j["timing_repetitions"] = *o.repetitions;
  return qb::config_from_json(j);
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--dataset", o.dataset, "Override the dataset key");
  cmd->add_option("--target", o.target, "Override the target_column key");
  cmd->add_option("--seed", o.seed, "Override split_seed (wins over QUANTBENCH_SEED)");
  cmd->add_option("--repetitions", o.repetitions, "Override timing_repetitions");
}

int run_bench(const std::string& config_path, const Overrides& o, const fs::path& out, bool allow_partial,
              const std::string& title) {
  const auto cfg = load_config(config_path, o);
  const auto results = qb::run_grid(cfg, {.allow_partial = allow_partial});
  fs::create_directories(out);
  qb::write_results(results, cfg, out / "results.csv", qb::ResultFormat::Csv);
  qb::write_results(results, cfg, out / "results.json", qb::ResultFormat::Json);
  const std::string table = qb::render_table(results, title.empty() ? fs::path(cfg.dataset).stem().string() : title);
  qb::write_text_file(out / "table.txt", table);
  qb::write_text_file(out / "comparison.csv", qb::comparison_to_csv(results));
  qb::write_text_file(out / "comparison.svg", qb::render_comparison_svg(results));
  std::cout << table;

  int failed = 0;
  for (const auto& r : results) {
    if (r.ok()) continue;
    ++failed;
    std::cerr << "error: " << r.error << "\n";
  }
  return failed ? 2 : 0;
}

int run_transform(const std::string& technique_name, const fs::path& in, const fs::path& out,
                  std::optional<std::string> params_out, std::size_t n_quantiles, std::size_t n_bins, int decimals,
                  const std::string& round_mode, std::size_t n_levels) {
  const auto technique = qb::parse_technique(technique_name);
  const auto table = qb::read_numeric_csv(in);
  if (table.rows_dropped) std::cerr << "note: dropped " << table.rows_dropped << " rows with missing values\n";
  qb::Matrix result;
  qb::json params;
  switch (technique) {
    case qb::Technique::QuantileTransform: {
      const auto p = qb::fit_quantile(table.x, n_quantiles);
      result = qb::apply_quantile(p, table.x);
      params = qb::to_document(p);
      break;
    }
    case qb::Technique::RoundQuantize: {
      const auto p = qb::fit_levels(table.x, n_levels, decimals);
      result = qb::parse_round_mode(round_mode) == qb::RoundMode::Decimals ? qb::round_quantize(table.x, decimals)
                                                                           : qb::level_quantize(p, table.x);
      params = qb::to_document(p);
      params["round_mode"] = round_mode;
      break;
    }
    case qb::Technique::KBinsDiscretize: {
      const auto p = qb::fit_bins(table.x, n_bins);
      result = qb::apply_bins(p, table.x);
      params = qb::to_document(p);
      break;
    }
    case qb::Technique::None:
      throw qb::ParameterError("transform needs one of qt, round, kbins");
  }
  qb::write_text_file(out, qb::matrix_to_csv(table.header, result));
  const fs::path params_path = params_out ? fs::path(*params_out) : fs::path(out.string() + ".params.json");
  qb::write_text_file(params_path, params.dump(2) + "\n");
  return 0;
}

int run_sweep(const std::string& config_path, const Overrides& o, const std::vector<std::size_t>& grid,
              const fs::path& out) {
  const auto cfg = load_config(config_path, o);
  const auto data = qb::load_and_split(cfg);
  const auto points = qb::run_quantile_sweep(data, cfg, grid);
  fs::create_directories(out);
  const auto text = qb::sweep_to_csv(points);
  qb::write_text_file(out / "sweep_qt.csv", text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark input quantization and storage precision for logistic regression"};
  app.set_version_flag("--version", std::string(qb::kToolkitVersion));
  app.require_subcommand(1);

  Overrides overrides;

  auto* bench = app.add_subcommand("bench", "Run the technique x precision grid and write results");
  std::string config_path;
  std::string out_dir = ".";
  std::string title;
  bool allow_partial = false;
  bench->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", out_dir, "Output directory")->capture_default_str();
  bench->add_option("--title", title, "Table title (default: dataset file stem)");
  bench->add_flag("--allow-partial", allow_partial, "Record failing cells as errors instead of aborting");
  add_overrides(bench, overrides);
  bench->footer(kConfigKeys);

  auto* transform = app.add_subcommand("transform", "Fit a transform on a numeric CSV and write the result");
  std::string technique;
  std::string in_path, out_path;
  std::optional<std::string> params_out;
  std::size_t n_quantiles = qb::kDefaultQuantiles, n_bins = qb::kDefaultBins, n_levels = qb::kDefaultLevels;
  int decimals = qb::kDefaultDecimals;
  std::string round_mode = "decimals";
  transform->add_option("--technique", technique, "qt, round or kbins")->required();
  transform->add_option("--in", in_path, "Numeric CSV with a header row")->required()->check(CLI::ExistingFile);
  transform->add_option("--out", out_path, "Transformed CSV")->required();
  transform->add_option("--params-out", params_out, "Fitted parameters JSON (default: <out>.params.json)");
  transform->add_option("--n-quantiles", n_quantiles, "Quantile knots")->capture_default_str();
  transform->add_option("--n-bins", n_bins, "Equal-width bins")->capture_default_str();
  transform->add_option("--decimals", decimals, "Decimals kept by round")->capture_default_str();
  transform->add_option("--round-mode", round_mode, "decimals or levels")->capture_default_str();
  transform->add_option("--n-levels", n_levels, "Levels for --round-mode levels")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Quantile-transform accuracy across n_quantiles values");
  std::vector<std::size_t> grid{10, 50, 100, 500, 1000};
  std::string sweep_out = ".";
  sweep->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--quantiles", grid, "Comma-separated n_quantiles values")->delimiter(',')->capture_default_str();
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();
  add_overrides(sweep, overrides);
  sweep->footer(kConfigKeys);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*bench) return run_bench(config_path, overrides, out_dir, allow_partial, title);
    if (*transform)
      return run_transform(technique, in_path, out_path, params_out, n_quantiles, n_bins, decimals, round_mode, n_levels);
    if (*sweep) return run_sweep(config_path, overrides, grid, sweep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
