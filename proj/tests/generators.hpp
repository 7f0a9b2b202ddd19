#pragma once

// Seeded matrix generators for property-style tests.

#include <quantbench/core.hpp>
#include <quantbench/random.hpp>

#include <cmath>
#include <vector>

namespace gen {

using quantbench::Matrix;
using quantbench::Xoshiro256StarStar;

/// Uniform values in [lo, hi).
inline Matrix uniform(Xoshiro256StarStar& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return Matrix(rows, cols, std::move(v));
}

/// Standard normal values (Box-Muller).
inline Matrix gaussian(Xoshiro256StarStar& rng, std::size_t rows, std::size_t cols) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    x = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  return Matrix(rows, cols, std::move(v));
}

/// Random shape up to max_rows x max_cols (at least 2 rows). Roughly a third
/// of the columns draw from a handful of integers so ties and constant
/// columns occur.
inline Matrix small_with_ties(Xoshiro256StarStar& rng, std::size_t max_rows, std::size_t max_cols) {
  const std::size_t rows = 2 + rng.below(max_rows - 1);
  const std::size_t cols = 1 + rng.below(max_cols);
  std::vector<double> v(rows * cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const auto kind = rng.below(3);
    for (std::size_t i = 0; i < rows; ++i) {
      v[i * cols + j] = kind == 0 ? static_cast<double>(rng.below(3)) : -5.0 + 10.0 * rng.uniform();
    }
  }
  return Matrix(rows, cols, std::move(v));
}

}  // namespace gen
