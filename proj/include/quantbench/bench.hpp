#pragma once

// Experiment runner: split -> scale -> quantize -> cast -> timed fit -> score,
// across the technique x precision grid. Cells run strictly one after another
// on the calling thread; nothing here spawns threads.

#include <quantbench/io.hpp>
#include <quantbench/model.hpp>
#include <quantbench/random.hpp>
#include <quantbench/transforms.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

namespace quantbench {

/// A stage failure inside one grid cell.
class CellError : public Error {
 public:
  CellError(Technique technique, Precision precision, std::string stage, const std::string& what)
      : Error("cell (" + std::string(display_name(technique)) + ", " + std::string(to_string(precision)) +
              ") failed at " + stage + ": " + what),
        technique_(technique),
        precision_(precision),
        stage_(std::move(stage)) {}

  Technique technique() const noexcept { return technique_; }
  Precision precision() const noexcept { return precision_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  Technique technique_;
  Precision precision_;
  std::string stage_;
};

// ---------------------------------------------------------------------------
// Split

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified shuffled split. The test set holds ceil(n * test_fraction) rows,
/// allotted to the classes by largest remainder so each class's share is
/// within one row of proportional. Rows are drawn per class (class 0 first)
/// by Fisher-Yates over xoshiro256**(seed); both index lists are then
/// shuffled with the same generator.
inline SplitIndices stratified_split(const LabelVector& y, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ParameterError("test_fraction must lie in (0, 1)");
  const std::size_t n = y.size();
  const auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * test_fraction - 1e-9));
  if (n_test == 0 || n_test >= n) {
    throw InsufficientDataError("cannot split " + std::to_string(n) + " rows with test_fraction " +
                                std::to_string(test_fraction));
  }

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[y[i]].push_back(i);

  std::array<std::size_t, 2> quota{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(n_test) * static_cast<double>(by_class[c].size()) / static_cast<double>(n);
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  while (assigned < n_test) {
    // larger remainder first; ties go to the larger class, then class 0
    int pick = 0;
    if (remainder[1] > remainder[0] ||
        (remainder[1] == remainder[0] && by_class[1].size() > by_class[0].size()))
      pick = 1;
    ++quota[pick];
    remainder[pick] = -1.0;
    ++assigned;
  }

  Xoshiro256StarStar rng(seed);
  SplitIndices out;
  for (int c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    if (quota[c] >= idx.size()) {
      throw StratificationError("class " + std::to_string(c) + " has " + std::to_string(idx.size()) +
                                " rows, none left for training");
    }
    shuffle<std::size_t>(idx, rng);
    out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]), idx.end());
  }
  shuffle<std::size_t>(out.train, rng);
  shuffle<std::size_t>(out.test, rng);
  return out;
}

struct TrainTest {
  Matrix x_train;
  Matrix x_test;
  LabelVector y_train;
  LabelVector y_test;
};

inline TrainTest split(const Matrix& x, const LabelVector& y, double test_fraction, std::uint64_t seed) {
  if (x.rows() != y.size()) throw ShapeError("matrix rows and label count differ");
  const auto idx = stratified_split(y, test_fraction, seed);
  return {x.select_rows(idx.train), x.select_rows(idx.test), y.select(idx.train), y.select(idx.test)};
}

/// Accuracy of always predicting the more frequent label.
inline double majority_rate(const LabelVector& y) {
  if (y.empty()) throw ShapeError("majority rate of an empty label vector");
  const auto ones = y.count_ones();
  return static_cast<double>(std::max(ones, y.size() - ones)) / static_cast<double>(y.size());
}

// ---------------------------------------------------------------------------
// Timing

struct TimingStats {
  double median_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
  std::vector<double> samples_s;
};

/// One discarded warm-up call, then `repetitions` timed calls on the steady
/// clock.
template <class F>
TimingStats time_fit(F&& fn, std::size_t repetitions) {
  if (repetitions < 1 || repetitions % 2 == 0) throw ParameterError("repetitions must be odd and >= 1");
  using clock = std::chrono::steady_clock;
  fn();
  TimingStats t;
  t.samples_s.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto start = clock::now();
    fn();
    const auto stop = clock::now();
    const double s = std::chrono::duration<double>(stop - start).count();
    if (!(s > 0.0)) throw ClockError("non-positive duration measured on repetition " + std::to_string(r));
    t.samples_s.push_back(s);
  }
  auto sorted = t.samples_s;
  std::sort(sorted.begin(), sorted.end());
  t.median_s = sorted[sorted.size() / 2];
  t.min_s = sorted.front();
  t.max_s = sorted.back();
  return t;
}

// ---------------------------------------------------------------------------
// Cells

using FittedTechnique = std::variant<std::monostate, QuantileParams, RoundParams, BinsParams>;

/// Everything fitted for one cell plus the matrices handed to the trainer.
struct PreparedCell {
  ScalerParams scaler;
  FittedTechnique transform;
  Matrix x_train;
  Matrix x_test;
};

/// Scale, quantize and cast. Every parameter is fitted on the training rows.
inline PreparedCell prepare_cell(const TrainTest& data, const ExperimentConfig& cfg, Technique technique,
                                 Precision precision) {
  std::string stage = "scale";
  try {
    PreparedCell cell;
    cell.scaler = fit_scaler(data.x_train);
    Matrix train = apply_scaler(cell.scaler, data.x_train);
    Matrix test = apply_scaler(cell.scaler, data.x_test);

    stage = "transform";
    switch (technique) {
      case Technique::None:
        break;
      case Technique::QuantileTransform: {
        auto p = fit_quantile(train, cfg.n_quantiles);
        train = apply_quantile(p, train);
        test = apply_quantile(p, test);
        cell.transform = std::move(p);
        break;
      }
      case Technique::RoundQuantize: {
        auto p = fit_levels(train, cfg.n_levels, cfg.decimals);
        if (cfg.round_mode == RoundMode::Decimals) {
          train = round_quantize(train, p.decimals);
          test = round_quantize(test, p.decimals);
        } else {
          train = level_quantize(p, train);
          test = level_quantize(p, test);
        }
        cell.transform = std::move(p);
        break;
      }
      case Technique::KBinsDiscretize: {
        auto p = fit_bins(train, cfg.n_bins);
        train = apply_bins(p, train);
        test = apply_bins(p, test);
        cell.transform = std::move(p);
        break;
      }
    }

    stage = "cast";
    cell.x_train = cast(train, precision);
    cell.x_test = cast(test, precision);
    return cell;
  } catch (const CellError&) {
    throw;
  } catch (const Error& e) {
    throw CellError(technique, precision, stage, e.what());
  }
}

/// Runs one cell on an existing split. The timed region covers the LR fit only.
inline BenchResult run_cell(const TrainTest& data, const ExperimentConfig& cfg, Technique technique,
                            Precision precision) {
  const PreparedCell cell = prepare_cell(data, cfg, technique, precision);
  std::string stage = "fit";
  try {
    LRModel model;
    const auto timing = time_fit([&] { model = fit(cell.x_train, data.y_train, cfg.lr); }, cfg.timing_repetitions);
    stage = "score";
    BenchResult r;
    r.technique = technique;
    r.precision = precision;
    r.accuracy = accuracy(predict(model, cell.x_test), data.y_test);
    r.fit_time_s = timing.median_s;
    r.fit_time_min_s = timing.min_s;
    r.fit_time_max_s = timing.max_s;
    r.iterations_run = model.iterations_run;
    r.converged = model.converged;
    return r;
  } catch (const Error& e) {
    throw CellError(technique, precision, stage, e.what());
  }
}

inline TrainTest load_and_split(const ExperimentConfig& cfg) {
  validate(cfg);
  const Dataset ds = load_csv(cfg.dataset, cfg.target_column);
  return split(ds.x, ds.y, cfg.test_fraction, cfg.split_seed);
}

/// Loads the dataset, splits it and runs a single cell.
inline BenchResult run_cell(const ExperimentConfig& cfg, Technique technique, Precision precision) {
  TrainTest data;
  try {
    data = load_and_split(cfg);
  } catch (const Error& e) {
    throw CellError(technique, precision, "load", e.what());
  }
  return run_cell(data, cfg, technique, precision);
}

struct GridOptions {
  bool allow_partial = false;
};

/// Precisions a technique cell runs at: the configured list minus F64, which
/// stands for the baseline column.
inline std::vector<Precision> technique_precisions(const ExperimentConfig& cfg) {
  std::vector<Precision> out;
  for (auto p : cfg.precisions)
    if (p != Precision::F64 && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  return out;
}

/// Baseline (None, F64) first, then technique-major, precision-minor cells.
/// With allow_partial a failing technique cell is recorded with its error and
/// the grid continues; the baseline must always succeed.
inline std::vector<BenchResult> run_grid(const TrainTest& data, const ExperimentConfig& cfg,
                                         const GridOptions& opts = {}) {
  std::vector<BenchResult> results;
  results.push_back(run_cell(data, cfg, Technique::None, Precision::F64));
  const double baseline = results.front().fit_time_s;
  for (auto t : cfg.techniques) {
    if (t == Technique::None) continue;
    for (auto p : technique_precisions(cfg)) {
      try {
        auto r = run_cell(data, cfg, t, p);
        r.time_reduction_pct = time_reduction_pct(r.fit_time_s, baseline);
        results.push_back(std::move(r));
      } catch (const CellError& e) {
        if (!opts.allow_partial) throw;
        BenchResult failed;
        failed.technique = t;
        failed.precision = p;
        failed.error = e.what();
        results.push_back(std::move(failed));
      }
    }
  }
  return results;
}

inline std::vector<BenchResult> run_grid(const ExperimentConfig& cfg, const GridOptions& opts = {}) {
  TrainTest data;
  try {
    data = load_and_split(cfg);
  } catch (const Error& e) {
    throw CellError(Technique::None, Precision::F64, "load", e.what());
  }
  return run_grid(data, cfg, opts);
}

// ---------------------------------------------------------------------------
// Quantile sweep

struct SweepPoint {
  std::size_t n_quantiles = 0;
  Precision precision = Precision::F64;
  double accuracy = 0.0;
};

/// Quantile-transform accuracy for each n_quantiles at every configured
/// precision (F64 meaning the transform without a cast).
inline std::vector<SweepPoint> run_quantile_sweep(const TrainTest& data, ExperimentConfig cfg,
                                                  const std::vector<std::size_t>& n_quantiles) {
  if (n_quantiles.empty()) throw ParameterError("empty quantile grid");
  cfg.timing_repetitions = 1;
  std::vector<SweepPoint> out;
  for (auto nq : n_quantiles) {
    cfg.n_quantiles = nq;
    for (auto p : cfg.precisions) {
      const auto r = run_cell(data, cfg, Technique::QuantileTransform, p);
      out.push_back({nq, p, r.accuracy});
    }
  }
  return out;
}

}  // namespace quantbench
