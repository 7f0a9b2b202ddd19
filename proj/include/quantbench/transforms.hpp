#pragma once

// Fit/apply pairs for standard scaling, the empirical-CDF quantile transform,
// decimal and level rounding, and uniform k-bins discretization. Fitted
// parameters are plain value types; every apply is pure.

#include <quantbench/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace quantbench {

inline constexpr std::size_t kDefaultQuantiles = 100;
inline constexpr std::size_t kDefaultBins = 10;
inline constexpr int kDefaultDecimals = 4;
inline constexpr std::size_t kDefaultLevels = std::size_t{1} << 12;

struct ScalerParams {
  std::vector<double> mean;
  std::vector<double> std;  // population

  std::size_t cols() const noexcept { return mean.size(); }
  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

struct QuantileParams {
  std::size_t n_quantiles = 0;
  std::vector<std::vector<double>> quantiles;  // per column, non-decreasing
  std::vector<ColumnRange> ranges;

  std::size_t cols() const noexcept { return quantiles.size(); }
  friend bool operator==(const QuantileParams&, const QuantileParams&) = default;
};

struct RoundParams {
  int decimals = kDefaultDecimals;
  std::size_t n_levels = kDefaultLevels;
  std::vector<ColumnRange> ranges;

  std::size_t cols() const noexcept { return ranges.size(); }
  friend bool operator==(const RoundParams&, const RoundParams&) = default;
};

struct BinsParams {
  std::size_t n_bins = kDefaultBins;
  std::vector<ColumnRange> ranges;

  std::size_t cols() const noexcept { return ranges.size(); }
  friend bool operator==(const BinsParams&, const BinsParams&) = default;
};

namespace detail {

inline void require_cols(std::size_t fitted, const Matrix& x, const char* what) {
  if (fitted != x.cols()) {
    throw ShapeError(std::string(what) + " fitted on " + std::to_string(fitted) + " columns, got " +
                     std::to_string(x.cols()));
  }
}

// Applies f(value, column) to every element, producing an F64 matrix.
template <class F>
Matrix map_to_f64(const Matrix& x, F&& f) {
  return x.visit([&](auto v) {
    std::vector<double> out(v.size());
    const std::size_t cols = x.cols();
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        out[i * cols + j] = f(static_cast<double>(v[i * cols + j]), j);
      }
    }
    return Matrix(x.rows(), cols, std::move(out));
  });
}

inline std::vector<double> column(const Matrix& x, std::size_t j) {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = x(i, j);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Standard scaling

inline ScalerParams fit_scaler(const Matrix& x_train) {
  if (x_train.rows() == 0 || x_train.cols() == 0) throw ShapeError("fit_scaler on an empty matrix");
  const auto n = static_cast<double>(x_train.rows());
  ScalerParams p{std::vector<double>(x_train.cols(), 0.0), std::vector<double>(x_train.cols(), 0.0)};
  for (std::size_t i = 0; i < x_train.rows(); ++i)
    for (std::size_t j = 0; j < x_train.cols(); ++j) p.mean[j] += x_train(i, j);
  for (auto& m : p.mean) m /= n;
  for (std::size_t i = 0; i < x_train.rows(); ++i) {
    for (std::size_t j = 0; j < x_train.cols(); ++j) {
      const double d = x_train(i, j) - p.mean[j];
      p.std[j] += d * d;
    }
  }
  for (auto& s : p.std) s = std::sqrt(s / n);
  return p;
}

/// (x - mean) / std per column; zero-variance columns become all zeros.
inline Matrix apply_scaler(const ScalerParams& p, const Matrix& x) {
  detail::require_cols(p.cols(), x, "scaler");
  return detail::map_to_f64(x, [&](double v, std::size_t j) {
    return p.std[j] > 0.0 ? (v - p.mean[j]) / p.std[j] : 0.0;
  });
}

// ---------------------------------------------------------------------------
// Quantile transform (uniform output)

/// Empirical quantiles at n_quantiles evenly spaced levels in [0, 1], linear
/// interpolation between order statistics. n_quantiles is clamped to the row
/// count.
inline QuantileParams fit_quantile(const Matrix& x_train, std::size_t n_quantiles = kDefaultQuantiles) {
  if (n_quantiles < 2) throw ParameterError("n_quantiles must be >= 2");
  if (x_train.rows() < 2) throw InsufficientDataError("quantile transform needs at least 2 rows");
  const std::size_t nq = std::min(n_quantiles, x_train.rows());
  QuantileParams p;
  p.n_quantiles = nq;
  p.quantiles.reserve(x_train.cols());
  p.ranges.reserve(x_train.cols());
  for (std::size_t j = 0; j < x_train.cols(); ++j) {
    auto col = detail::column(x_train, j);
    std::sort(col.begin(), col.end());
    const double last = static_cast<double>(col.size() - 1);
    std::vector<double> q(nq);
    for (std::size_t k = 0; k < nq; ++k) {
      const double h = last * static_cast<double>(k) / static_cast<double>(nq - 1);
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const std::size_t hi = std::min(lo + 1, col.size() - 1);
      const double frac = h - static_cast<double>(lo);
      q[k] = frac == 0.0 ? col[lo] : col[lo] + frac * (col[hi] - col[lo]);
    }
    q.front() = col.front();
    q.back() = col.back();
    p.ranges.push_back({q.front(), q.back()});
    p.quantiles.push_back(std::move(q));
  }
  return p;
}

namespace detail {

// Position of v on the CDF defined by q. Interior ties map to the midpoint of
// their probability range; the fitted endpoints map exactly to 0 and 1.
inline double quantile_cdf(const std::vector<double>& q, double v) {
  if (v <= q.front()) return 0.0;
  if (v >= q.back()) return 1.0;
  const double denom = static_cast<double>(q.size() - 1);
  const auto lo = std::lower_bound(q.begin(), q.end(), v);
  const auto hi = std::upper_bound(lo, q.end(), v);
  const auto k_lo = static_cast<std::size_t>(lo - q.begin());
  const auto k_hi = static_cast<std::size_t>(hi - q.begin());
  if (k_lo < k_hi) return 0.5 * static_cast<double>(k_lo + k_hi - 1) / denom;
  const double left = q[k_lo - 1];
  const double right = q[k_lo];
  return (static_cast<double>(k_lo - 1) + (v - left) / (right - left)) / denom;
}

}  // namespace detail

inline Matrix apply_quantile(const QuantileParams& p, const Matrix& x) {
  detail::require_cols(p.cols(), x, "quantile transform");
  return detail::map_to_f64(x, [&](double v, std::size_t j) { return detail::quantile_cdf(p.quantiles[j], v); });
}

// ---------------------------------------------------------------------------
// Rounding

/// Round to `decimals` places, half-to-even on the scaled value (numpy.round
/// semantics). Precision is preserved.
inline Matrix round_quantize(const Matrix& x, int decimals = kDefaultDecimals) {
  if (decimals < 0) throw ParameterError("decimals must be >= 0");
  if (!is_floating(x.precision())) throw ParameterError("round_quantize needs a floating matrix");
  return x.visit([&](auto v) {
    using T = typename decltype(v)::value_type;
    std::vector<T> out(v.size());
    if constexpr (std::is_floating_point_v<T>) {
      const T scale = static_cast<T>(std::pow(10.0, decimals));
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::nearbyint(v[i] * scale) / scale;
    }
    return Matrix(x.rows(), x.cols(), std::move(out));
  });
}

inline RoundParams fit_levels(const Matrix& x_train, std::size_t n_levels = kDefaultLevels,
                              int decimals = kDefaultDecimals) {
  if (n_levels < 2) throw ParameterError("n_levels must be >= 2");
  if (decimals < 0) throw ParameterError("decimals must be >= 0");
  return RoundParams{decimals, n_levels, column_min_max(x_train)};
}

/// Round((x - P_min) * (n_levels - 1) / (P_max - P_min)) per column, clamped
/// to [0, n_levels - 1]. Constant columns map to level 0.
inline Matrix level_quantize(const RoundParams& p, const Matrix& x) {
  detail::require_cols(p.cols(), x, "level quantizer");
  const double top = static_cast<double>(p.n_levels - 1);
  return detail::map_to_f64(x, [&](double v, std::size_t j) {
    const auto& r = p.ranges[j];
    if (!(r.max > r.min)) return 0.0;
    const double level = std::nearbyint((v - r.min) * top / (r.max - r.min));
    return std::clamp(level, 0.0, top);
  });
}

// ---------------------------------------------------------------------------
// Uniform k-bins

inline BinsParams fit_bins(const Matrix& x_train, std::size_t n_bins = kDefaultBins) {
  if (n_bins < 2) throw ParameterError("n_bins must be >= 2");
  return BinsParams{n_bins, column_min_max(x_train)};
}

/// Floor(n_bins * (x - P_min) / (P_max - P_min)) per column. The top edge
/// belongs to the last bin and out-of-range values clamp to the end bins.
inline Matrix apply_bins(const BinsParams& p, const Matrix& x) {
  detail::require_cols(p.cols(), x, "k-bins discretizer");
  const double top = static_cast<double>(p.n_bins - 1);
  return detail::map_to_f64(x, [&](double v, std::size_t j) {
    const auto& r = p.ranges[j];
    if (!(r.max > r.min)) return 0.0;
    const double bin = std::floor(static_cast<double>(p.n_bins) * (v - r.min) / (r.max - r.min));
    return std::clamp(bin, 0.0, top);
  });
}

}  // namespace quantbench
