#pragma once

// Experiment vocabulary shared by the runner, persistence and reporting.

#include <quantbench/core.hpp>
#include <quantbench/model.hpp>
#include <quantbench/transforms.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quantbench {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

enum class Technique { None, QuantileTransform, RoundQuantize, KBinsDiscretize };

constexpr std::string_view to_string(Technique t) noexcept {
  switch (t) {
    case Technique::None: return "None";
    case Technique::QuantileTransform: return "QuantileTransform";
    case Technique::RoundQuantize: return "RoundQuantize";
    case Technique::KBinsDiscretize: return "KBinsDiscretize";
  }
  return "?";
}

/// Column label used in tables and result files.
constexpr std::string_view display_name(Technique t) noexcept {
  switch (t) {
    case Technique::None: return "Baseline";
    case Technique::QuantileTransform: return "QuantileTransformer";
    case Technique::RoundQuantize: return "Round";
    case Technique::KBinsDiscretize: return "KBinsDiscretizer";
  }
  return "?";
}

/// Short name used by the CLI and in file names.
constexpr std::string_view short_name(Technique t) noexcept {
  switch (t) {
    case Technique::None: return "none";
    case Technique::QuantileTransform: return "qt";
    case Technique::RoundQuantize: return "round";
    case Technique::KBinsDiscretize: return "kbins";
  }
  return "?";
}

inline Technique parse_technique(std::string_view s) {
  for (auto t : {Technique::None, Technique::QuantileTransform, Technique::RoundQuantize,
                 Technique::KBinsDiscretize}) {
    if (s == to_string(t) || s == display_name(t) || s == short_name(t)) return t;
  }
  if (s == "QuantileTransformer" || s == "quantile") return Technique::QuantileTransform;
  if (s == "Numpy.round" || s == "numpy.round") return Technique::RoundQuantize;
  if (s == "baseline") return Technique::None;
  throw ParameterError("unknown technique '" + std::string(s) + "'");
}

/// How the RoundQuantize technique reduces precision: decimal rounding of the
/// value, or rounding onto n_levels evenly spaced levels of the fitted range.
enum class RoundMode { Decimals, Levels };

constexpr std::string_view to_string(RoundMode m) noexcept {
  return m == RoundMode::Decimals ? "decimals" : "levels";
}

inline RoundMode parse_round_mode(std::string_view s) {
  if (s == "decimals") return RoundMode::Decimals;
  if (s == "levels") return RoundMode::Levels;
  throw ParameterError("unknown round_mode '" + std::string(s) + "'");
}

struct ExperimentConfig {
  std::string dataset;
  std::string target_column;
  double test_fraction = 0.10;
  std::uint64_t split_seed = 0;
  std::vector<Technique> techniques{Technique::QuantileTransform, Technique::RoundQuantize,
                                    Technique::KBinsDiscretize};
  std::vector<Precision> precisions{Precision::F64, Precision::F32, Precision::I32};
  std::size_t n_quantiles = kDefaultQuantiles;
  std::size_t n_bins = kDefaultBins;
  int decimals = kDefaultDecimals;
  std::size_t n_levels = kDefaultLevels;
  RoundMode round_mode = RoundMode::Decimals;
  std::size_t timing_repetitions = 11;
  LRConfig lr;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError naming the first invalid field.
inline void validate(const ExperimentConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("dataset", "missing");
  if (cfg.target_column.empty()) throw ConfigError("target_column", "missing");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw ConfigError("test_fraction", "must lie in (0, 1)");
  if (cfg.timing_repetitions < 1 || cfg.timing_repetitions % 2 == 0)
    throw ConfigError("timing_repetitions", "must be odd and >= 1");
  if (cfg.n_quantiles < 2) throw ConfigError("n_quantiles", "must be >= 2");
  if (cfg.n_bins < 2) throw ConfigError("n_bins", "must be >= 2");
  if (cfg.n_levels < 2) throw ConfigError("n_levels", "must be >= 2");
  if (cfg.decimals < 0) throw ConfigError("decimals", "must be >= 0");
  if (!(cfg.lr.learning_rate > 0.0)) throw ConfigError("lr.learning_rate", "must be > 0");
  if (cfg.lr.max_iters < 1) throw ConfigError("lr.max_iters", "must be >= 1");
  if (!(cfg.lr.l2_strength >= 0.0)) throw ConfigError("lr.l2_strength", "must be >= 0");
  if (!(cfg.lr.tolerance >= 0.0)) throw ConfigError("lr.tolerance", "must be >= 0");
  if (cfg.precisions.empty()) throw ConfigError("precisions", "empty");
}

/// One (technique, precision) cell of the results table.
struct BenchResult {
  Technique technique = Technique::None;
  Precision precision = Precision::F64;
  double accuracy = 0.0;
  double fit_time_s = 0.0;  // median
  double fit_time_min_s = 0.0;
  double fit_time_max_s = 0.0;
  double time_reduction_pct = 0.0;  // versus the baseline cell
  std::size_t iterations_run = 0;
  bool converged = false;
  std::string error;  // non-empty for a failed cell kept under allow_partial

  bool ok() const noexcept { return error.empty(); }
  bool is_baseline() const noexcept { return technique == Technique::None; }
  friend bool operator==(const BenchResult&, const BenchResult&) = default;
};

/// 100 * (1 - fit_time / baseline_fit_time).
constexpr double time_reduction_pct(double fit_time_s, double baseline_fit_time_s) noexcept {
  return 100.0 * (1.0 - fit_time_s / baseline_fit_time_s);
}

}  // namespace quantbench
