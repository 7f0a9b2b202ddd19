#pragma once

// Dataset ingestion (RFC-4180 CSV) and persistence of configs, matrices and
// results.

#include <quantbench/serialize.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace quantbench {

struct DatasetSchema {
  std::vector<std::string> feature_columns;
  std::string target_column;
  std::size_t rows_loaded = 0;
  std::size_t rows_dropped = 0;
  std::array<std::string, 2> label_names;  // raw target value mapped to 0 and 1
};

struct Dataset {
  Matrix x;
  LabelVector y;
  DatasetSchema schema;
};

namespace csv {

using Record = std::vector<std::string>;

/// Splits a whole CSV document into records. Quoted fields may contain
/// commas, doubled quotes and line breaks; CRLF and LF both end a record.
inline std::vector<Record> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<Record> records;
  Record rec;
  std::string field;
  bool in_quotes = false;
  bool record_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        record_started = true;
        break;
      case ',':
        rec.push_back(std::move(field));
        field.clear();
        record_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (record_started || !field.empty()) {
          rec.push_back(std::move(field));
          records.push_back(std::move(rec));
        }
        rec.clear();
        field.clear();
        record_started = false;
        break;
      default:
        field.push_back(c);
        record_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field");
  if (record_started || !field.empty()) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline bool is_missing(std::string_view token) {
  token = trim(token);
  return token.empty() || token == "?" || token == "NA" || token == "NaN";
}

/// Finite double covering the whole token, or nullopt.
inline std::optional<double> parse_number(std::string_view token) {
  token = trim(token);
  if (token.starts_with('+')) token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace csv

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Loads a labelled table. Every non-target column becomes an F64 feature;
/// rows holding a missing marker ("", "?", "NA", "NaN") or an unparseable
/// token are dropped and counted. The target must take exactly two distinct
/// values, mapped to {0, 1} in sorted order (numeric order when both parse
/// as numbers).
inline Dataset load_csv(const std::filesystem::path& path, const std::string& target_column) {
  if (!std::filesystem::exists(path)) throw IoError("dataset '" + path.string() + "' does not exist");
  const auto records = csv::parse(read_text_file(path));
  if (records.empty()) throw DataError("'" + path.string() + "' has no header row");
  const auto& header = records.front();
  const auto target_it = std::find_if(header.begin(), header.end(),
                                      [&](const std::string& h) { return csv::trim(h) == target_column; });
  if (target_it == header.end()) {
    throw DataError("target column '" + target_column + "' not found in '" + path.string() + "'");
  }
  const auto target_idx = static_cast<std::size_t>(target_it - header.begin());

  Dataset ds;
  ds.schema.target_column = target_column;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != target_idx) ds.schema.feature_columns.emplace_back(csv::trim(header[j]));
  }
  const std::size_t n_features = ds.schema.feature_columns.size();

  std::vector<double> values;
  std::vector<std::string> raw_targets;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    bool keep = rec.size() == header.size() && !csv::is_missing(rec[target_idx]);
    std::vector<double> row;
    row.reserve(n_features);
    for (std::size_t j = 0; keep && j < rec.size(); ++j) {
      if (j == target_idx) continue;
      const auto v = csv::is_missing(rec[j]) ? std::nullopt : csv::parse_number(rec[j]);
      if (!v) keep = false;
      else row.push_back(*v);
    }
    if (!keep) {
      ++ds.schema.rows_dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    raw_targets.emplace_back(csv::trim(rec[target_idx]));
  }
  if (raw_targets.empty()) throw DataError("no rows of '" + path.string() + "' survived missing-value filtering");

  std::vector<std::string> distinct = raw_targets;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != 2) {
    throw LabelError("target column '" + target_column + "' has " + std::to_string(distinct.size()) +
                     " distinct values, expected 2");
  }
  const auto a = csv::parse_number(distinct[0]);
  const auto b = csv::parse_number(distinct[1]);
  if (a && b && *b < *a) std::swap(distinct[0], distinct[1]);
  ds.schema.label_names = {distinct[0], distinct[1]};

  std::vector<std::uint8_t> labels(raw_targets.size());
  for (std::size_t i = 0; i < raw_targets.size(); ++i) labels[i] = raw_targets[i] == distinct[1] ? 1 : 0;

  ds.schema.rows_loaded = raw_targets.size();
  ds.x = Matrix(raw_targets.size(), n_features, std::move(values));
  ds.y = LabelVector(std::move(labels));
  return ds;
}

struct NumericTable {
  std::vector<std::string> header;
  Matrix x;
  std::size_t rows_dropped = 0;
};

/// Loads an all-numeric table with the same missing-row policy as load_csv.
inline NumericTable read_numeric_csv(const std::filesystem::path& path) {
  const auto records = csv::parse(read_text_file(path));
  if (records.empty()) throw DataError("'" + path.string() + "' has no header row");
  NumericTable t;
  for (const auto& h : records.front()) t.header.emplace_back(csv::trim(h));
  std::vector<double> values;
  std::size_t rows = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    bool keep = rec.size() == t.header.size();
    std::vector<double> row;
    for (std::size_t j = 0; keep && j < rec.size(); ++j) {
      const auto v = csv::is_missing(rec[j]) ? std::nullopt : csv::parse_number(rec[j]);
      if (!v) keep = false;
      else row.push_back(*v);
    }
    if (!keep) {
      ++t.rows_dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw DataError("no rows of '" + path.string() + "' survived missing-value filtering");
  t.x = Matrix(rows, t.header.size(), std::move(values));
  return t;
}

inline std::string matrix_to_csv(const std::vector<std::string>& header, const Matrix& x) {
  if (header.size() != x.cols()) throw ShapeError("header width differs from matrix width");
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += csv::quote(header[j]);
  }
  out += '\n';
  x.visit([&](auto v) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < x.cols(); ++j) {
        if (j) out += ',';
        const auto e = v[i * x.cols() + j];
        if constexpr (std::is_integral_v<decltype(e)>) out += std::to_string(e);
        else out += format_double(static_cast<double>(e));
      }
      out += '\n';
    }
  });
  return out;
}

// --- config ------------------------------------------------------------------

namespace detail {

inline json toml_value(std::string_view raw, const std::string& key) {
  raw = csv::trim(raw);
  if (raw.empty()) throw ConfigError(key, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') throw ConfigError(key, "unterminated string");
    return std::string(raw.substr(1, raw.size() - 2));
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ConfigError(key, "unterminated array");
    json arr = json::array();
    std::string_view body = raw.substr(1, raw.size() - 2);
    while (!csv::trim(body).empty()) {
      const auto comma = body.find(',');
      const auto item = csv::trim(body.substr(0, comma));
      if (!item.empty()) arr.push_back(toml_value(item, key));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    return arr;
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  std::string digits;
  for (char c : raw)
    if (c != '_') digits.push_back(c);
  if (digits.find_first_of(".eE") == std::string::npos) {
    std::int64_t i = 0;
    const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (ec == std::errc{} && p == digits.data() + digits.size()) {
      if (i >= 0) return static_cast<std::uint64_t>(i);
      return i;
    }
  }
  if (const auto d = csv::parse_number(digits)) return *d;
  throw ConfigError(key, "cannot parse value '" + std::string(raw) + "'");
}

// The TOML subset a config needs: comments, `key = value` pairs with strings,
// numbers, booleans and single-line arrays, and one level of [table] headers.
inline json parse_toml(std::string_view text) {
  json root = json::object();
  json* table = &root;
  std::string table_name;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    std::string_view s = line;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') in_string = !in_string;
      if (s[i] == '#' && !in_string) {
        s = s.substr(0, i);
        break;
      }
    }
    s = csv::trim(s);
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(std::string(s), "malformed table header");
      table_name = std::string(csv::trim(s.substr(1, s.size() - 2)));
      root[table_name] = json::object();
      table = &root[table_name];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(s), "expected key = value");
    const std::string key(csv::trim(s.substr(0, eq)));
    const std::string path = table_name.empty() ? key : table_name + "." + key;
    (*table)[key] = toml_value(s.substr(eq + 1), path);
  }
  return root;
}

}  // namespace detail

/// Parses a JSON (or, for a .toml extension, TOML) config file without
/// interpreting its keys.
inline json read_config_document(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".toml") return detail::parse_toml(text);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
}

inline ExperimentConfig read_config(const std::filesystem::path& path) {
  return config_from_json(read_config_document(path));
}

// --- results -----------------------------------------------------------------

enum class ResultFormat { Csv, Json };

inline constexpr std::string_view kResultsCsvHeader =
    "technique,precision,accuracy_pct,fit_time_s,fit_time_min_s,fit_time_max_s,time_reduction_pct,"
    "iterations_run,converged,error";

/// Accuracy as a percentage with two decimals, times in seconds with four.
inline std::string results_to_csv(const std::vector<BenchResult>& results) {
  std::string out(kResultsCsvHeader);
  out += '\n';
  for (const auto& r : results) {
    out += csv::quote(display_name(r.technique));
    out += ',';
    out += to_string(r.precision);
    out += ',';
    if (r.ok()) {
      out += format_fixed(100.0 * r.accuracy, 2) + ',' + format_fixed(r.fit_time_s, 4) + ',' +
             format_fixed(r.fit_time_min_s, 4) + ',' + format_fixed(r.fit_time_max_s, 4) + ',' +
             format_fixed(r.time_reduction_pct, 1) + ',' + std::to_string(r.iterations_run) + ',' +
             (r.converged ? "true" : "false") + ',';
    } else {
      out += ",,,,,,,";
    }
    out += csv::quote(r.error);
    out += '\n';
  }
  return out;
}

inline void write_results(const std::vector<BenchResult>& results, const ExperimentConfig& cfg,
                          const std::filesystem::path& path, ResultFormat format) {
  if (format == ResultFormat::Csv) write_text_file(path, results_to_csv(results));
  else write_text_file(path, results_document(results, cfg).dump(2) + "\n");
}

inline std::vector<BenchResult> read_results_json(const std::filesystem::path& path) {
  try {
    return results_from_document(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw DataError("malformed results file '" + path.string() + "': " + e.what());
  }
}

}  // namespace quantbench
