#pragma once

// JSON documents for fitted transforms, trained models, experiment configs
// and benchmark results. Each top-level document carries a "format" tag and
// a "version"; doubles are written in shortest round-trip form, so a
// write/read cycle is bit-exact.

#include <quantbench/experiment.hpp>

#include <nlohmann/json.hpp>

#include <string>

namespace quantbench {

using json = nlohmann::json;

inline constexpr int kDocumentVersion = 1;

namespace detail {

inline json envelope(std::string_view format) {
  return json{{"format", format}, {"version", kDocumentVersion}};
}

inline void check_envelope(const json& j, std::string_view format) {
  if (!j.is_object()) throw DataError("expected a JSON object for " + std::string(format));
  if (j.value("format", std::string{}) != format) {
    throw DataError("expected document format '" + std::string(format) + "'");
  }
  if (j.value("version", 0) != kDocumentVersion) {
    throw DataError("unsupported " + std::string(format) + " version");
  }
}

inline json ranges_to_json(const std::vector<ColumnRange>& r) {
  json mins = json::array();
  json maxs = json::array();
  for (const auto& c : r) {
    mins.push_back(c.min);
    maxs.push_back(c.max);
  }
  return json{{"p_min", mins}, {"p_max", maxs}};
}

inline std::vector<ColumnRange> ranges_from_json(const json& j) {
  const auto mins = j.at("p_min").get<std::vector<double>>();
  const auto maxs = j.at("p_max").get<std::vector<double>>();
  if (mins.size() != maxs.size()) throw DataError("p_min and p_max lengths differ");
  std::vector<ColumnRange> out(mins.size());
  for (std::size_t i = 0; i < mins.size(); ++i) out[i] = {mins[i], maxs[i]};
  return out;
}

}  // namespace detail

// --- fitted transforms ------------------------------------------------------

inline json to_document(const ScalerParams& p) {
  auto j = detail::envelope("quantbench.scaler");
  j["mean"] = p.mean;
  j["std"] = p.std;
  return j;
}

inline json to_document(const QuantileParams& p) {
  auto j = detail::envelope("quantbench.quantile");
  j["n_quantiles"] = p.n_quantiles;
  j["quantiles"] = p.quantiles;
  j["ranges"] = detail::ranges_to_json(p.ranges);
  return j;
}

inline json to_document(const RoundParams& p) {
  auto j = detail::envelope("quantbench.round");
  j["decimals"] = p.decimals;
  j["n_levels"] = p.n_levels;
  j["ranges"] = detail::ranges_to_json(p.ranges);
  return j;
}

inline json to_document(const BinsParams& p) {
  auto j = detail::envelope("quantbench.kbins");
  j["n_bins"] = p.n_bins;
  j["ranges"] = detail::ranges_to_json(p.ranges);
  return j;
}

template <class T>
T from_document(const json& j);

template <>
inline ScalerParams from_document<ScalerParams>(const json& j) {
  detail::check_envelope(j, "quantbench.scaler");
  ScalerParams p{j.at("mean").get<std::vector<double>>(), j.at("std").get<std::vector<double>>()};
  if (p.mean.size() != p.std.size()) throw DataError("scaler mean/std lengths differ");
  return p;
}

template <>
inline QuantileParams from_document<QuantileParams>(const json& j) {
  detail::check_envelope(j, "quantbench.quantile");
  QuantileParams p;
  p.n_quantiles = j.at("n_quantiles").get<std::size_t>();
  p.quantiles = j.at("quantiles").get<std::vector<std::vector<double>>>();
  p.ranges = detail::ranges_from_json(j.at("ranges"));
  if (p.quantiles.size() != p.ranges.size()) throw DataError("quantile column count mismatch");
  for (const auto& q : p.quantiles) {
    if (q.size() != p.n_quantiles) throw DataError("quantile vector length differs from n_quantiles");
  }
  return p;
}

template <>
inline RoundParams from_document<RoundParams>(const json& j) {
  detail::check_envelope(j, "quantbench.round");
  return RoundParams{j.at("decimals").get<int>(), j.at("n_levels").get<std::size_t>(),
                     detail::ranges_from_json(j.at("ranges"))};
}

template <>
inline BinsParams from_document<BinsParams>(const json& j) {
  detail::check_envelope(j, "quantbench.kbins");
  return BinsParams{j.at("n_bins").get<std::size_t>(), detail::ranges_from_json(j.at("ranges"))};
}

// --- model -----------------------------------------------------------------

inline json to_json_value(const LRConfig& c) {
  return json{{"l2_strength", c.l2_strength}, {"learning_rate", c.learning_rate}, {"max_iters", c.max_iters},
              {"tolerance", c.tolerance},     {"seed", c.seed},                   {"cap_step", c.cap_step}};
}

namespace detail {

template <class T>
T get_key(const json& obj, const std::string& key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace detail

/// Strict: unknown keys are rejected by name.
inline LRConfig lr_config_from_json(const json& j, const std::string& prefix = "lr") {
  if (!j.is_object()) throw ConfigError(prefix, "expected an object");
  LRConfig c;
  for (const auto& [key, value] : j.items()) {
    const std::string path = prefix + "." + key;
    if (key == "l2_strength") c.l2_strength = detail::get_key<double>(j, key, path);
    else if (key == "learning_rate") c.learning_rate = detail::get_key<double>(j, key, path);
    else if (key == "max_iters") c.max_iters = detail::get_key<std::size_t>(j, key, path);
    else if (key == "tolerance") c.tolerance = detail::get_key<double>(j, key, path);
    else if (key == "seed") c.seed = detail::get_key<std::uint64_t>(j, key, path);
    else if (key == "cap_step") c.cap_step = detail::get_key<bool>(j, key, path);
    else throw ConfigError(path, "unknown key");
  }
  return c;
}

inline json to_document(const LRModel& m) {
  auto j = detail::envelope("quantbench.lr_model");
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["compute_precision"] = to_string(m.compute_precision);
  j["iterations_run"] = m.iterations_run;
  j["final_loss"] = m.final_loss;
  j["final_gradient_norm"] = m.final_gradient_norm;
  j["step_size"] = m.step_size;
  j["converged"] = m.converged;
  j["config"] = to_json_value(m.config);
  return j;
}

template <>
inline LRModel from_document<LRModel>(const json& j) {
  detail::check_envelope(j, "quantbench.lr_model");
  LRModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.compute_precision = parse_precision(j.at("compute_precision").get<std::string>());
  m.iterations_run = j.at("iterations_run").get<std::size_t>();
  m.final_loss = j.at("final_loss").get<double>();
  m.final_gradient_norm = j.at("final_gradient_norm").get<double>();
  m.step_size = j.at("step_size").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.config = lr_config_from_json(j.at("config"), "config");
  return m;
}

// --- experiment config -----------------------------------------------------

inline json to_json_value(const ExperimentConfig& c) {
  json techniques = json::array();
  for (auto t : c.techniques) techniques.push_back(to_string(t));
  json precisions = json::array();
  for (auto p : c.precisions) precisions.push_back(to_string(p));
  return json{{"dataset", c.dataset},
              {"target_column", c.target_column},
              {"test_fraction", c.test_fraction},
              {"split_seed", c.split_seed},
              {"techniques", techniques},
              {"precisions", precisions},
              {"n_quantiles", c.n_quantiles},
              {"n_bins", c.n_bins},
              {"decimals", c.decimals},
              {"n_levels", c.n_levels},
              {"round_mode", to_string(c.round_mode)},
              {"timing_repetitions", c.timing_repetitions},
              {"lr", to_json_value(c.lr)}};
}

/// Parses and validates an experiment config. Keys mirror ExperimentConfig
/// field names; unknown or mistyped keys raise ConfigError naming the key.
inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  ExperimentConfig c;
  if (!j.contains("dataset")) throw ConfigError("dataset", "missing");
  if (!j.contains("target_column")) throw ConfigError("target_column", "missing");
  for (const auto& [key, value] : j.items()) {
    using detail::get_key;
    try {
      if (key == "dataset") c.dataset = get_key<std::string>(j, key, key);
      else if (key == "target_column") c.target_column = get_key<std::string>(j, key, key);
      else if (key == "test_fraction") c.test_fraction = get_key<double>(j, key, key);
      else if (key == "split_seed") c.split_seed = get_key<std::uint64_t>(j, key, key);
      else if (key == "techniques") {
        c.techniques.clear();
        for (const auto& s : get_key<std::vector<std::string>>(j, key, key)) {
          const auto t = parse_technique(s);
          if (t != Technique::None) c.techniques.push_back(t);
        }
      } else if (key == "precisions") {
        c.precisions.clear();
        for (const auto& s : get_key<std::vector<std::string>>(j, key, key)) c.precisions.push_back(parse_precision(s));
      } else if (key == "n_quantiles") c.n_quantiles = get_key<std::size_t>(j, key, key);
      else if (key == "n_bins") c.n_bins = get_key<std::size_t>(j, key, key);
      else if (key == "decimals") c.decimals = get_key<int>(j, key, key);
      else if (key == "n_levels") c.n_levels = get_key<std::size_t>(j, key, key);
      else if (key == "round_mode") c.round_mode = parse_round_mode(get_key<std::string>(j, key, key));
      else if (key == "timing_repetitions") c.timing_repetitions = get_key<std::size_t>(j, key, key);
      else if (key == "lr") c.lr = lr_config_from_json(value);
      else throw ConfigError(key, "unknown key");
    } catch (const ParameterError& e) {
      throw ConfigError(key, e.what());
    }
  }
  validate(c);
  return c;
}

// --- results -----------------------------------------------------------------

inline json to_json_value(const BenchResult& r) {
  return json{{"technique", to_string(r.technique)},
              {"precision", to_string(r.precision)},
              {"accuracy", r.accuracy},
              {"fit_time_s", r.fit_time_s},
              {"fit_time_min_s", r.fit_time_min_s},
              {"fit_time_max_s", r.fit_time_max_s},
              {"time_reduction_pct", r.time_reduction_pct},
              {"iterations_run", r.iterations_run},
              {"converged", r.converged},
              {"error", r.error}};
}

inline BenchResult bench_result_from_json(const json& j) {
  BenchResult r;
  r.technique = parse_technique(j.at("technique").get<std::string>());
  r.precision = parse_precision(j.at("precision").get<std::string>());
  r.accuracy = j.at("accuracy").get<double>();
  r.fit_time_s = j.at("fit_time_s").get<double>();
  r.fit_time_min_s = j.at("fit_time_min_s").get<double>();
  r.fit_time_max_s = j.at("fit_time_max_s").get<double>();
  r.time_reduction_pct = j.at("time_reduction_pct").get<double>();
  r.iterations_run = j.at("iterations_run").get<std::size_t>();
  r.converged = j.at("converged").get<bool>();
  r.error = j.value("error", std::string{});
  return r;
}

inline json results_document(const std::vector<BenchResult>& results, const ExperimentConfig& cfg) {
  auto j = detail::envelope("quantbench.results");
  j["toolkit_version"] = kToolkitVersion;
  j["config"] = to_json_value(cfg);
  json arr = json::array();
  for (const auto& r : results) arr.push_back(to_json_value(r));
  j["results"] = std::move(arr);
  return j;
}

inline std::vector<BenchResult> results_from_document(const json& j) {
  detail::check_envelope(j, "quantbench.results");
  std::vector<BenchResult> out;
  for (const auto& r : j.at("results")) out.push_back(bench_result_from_json(r));
  return out;
}

}  // namespace quantbench
