#pragma once

// Precision-tagged row-major matrix and the bit-depth cast.

#include <quantbench/errors.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace quantbench {

enum class Precision { F64, F32, I32 };

constexpr std::size_t byte_width(Precision p) noexcept {
  return p == Precision::F64 ? 8 : 4;
}

constexpr bool is_floating(Precision p) noexcept { return p != Precision::I32; }

constexpr std::string_view to_string(Precision p) noexcept {
  switch (p) {
    case Precision::F64: return "F64";
    case Precision::F32: return "F32";
    case Precision::I32: return "I32";
  }
  return "?";
}

/// Accepts the canonical tags plus the numpy dtype spellings.
inline Precision parse_precision(std::string_view s) {
  if (s == "F64" || s == "f64" || s == "float64") return Precision::F64;
  if (s == "F32" || s == "f32" || s == "float32") return Precision::F32;
  if (s == "I32" || s == "i32" || s == "int32") return Precision::I32;
  throw ParameterError("unknown precision '" + std::string(s) + "'");
}

template <class T>
inline constexpr bool is_element_v =
    std::is_same_v<T, double> || std::is_same_v<T, float> || std::is_same_v<T, std::int32_t>;

template <class T>
  requires is_element_v<T>
constexpr Precision precision_of() noexcept {
  if constexpr (std::is_same_v<T, double>) return Precision::F64;
  else if constexpr (std::is_same_v<T, float>) return Precision::F32;
  else return Precision::I32;
}

class Matrix {
 public:
  using Storage = std::variant<std::vector<double>, std::vector<float>, std::vector<std::int32_t>>;

  Matrix() = default;

  template <class T>
    requires is_element_v<T>
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows_ * cols_ != size_of(data_)) {
      throw ShapeError("matrix buffer holds " + std::to_string(size_of(data_)) +
                       " elements, expected " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  /// F64 matrix from nested rows; all rows must have equal length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<double> flat;
    std::size_t cols = rows.size() ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols) throw ShapeError("ragged rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return Matrix(rows.size(), cols, std::move(flat));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  bool empty() const noexcept { return size() == 0; }
  Precision precision() const noexcept { return static_cast<Precision>(data_.index()); }

  /// Typed view of the buffer; T must match precision().
  template <class T>
    requires is_element_v<T>
  std::span<const T> values() const {
    const auto* v = std::get_if<std::vector<T>>(&data_);
    if (!v) {
      throw ParameterError("matrix holds " + std::string(to_string(precision())) + ", requested " +
                           std::string(to_string(precision_of<T>())));
    }
    return *v;
  }

  /// Element widened to double.
  double operator()(std::size_t r, std::size_t c) const {
    return std::visit([&](const auto& v) { return static_cast<double>(v[r * cols_ + c]); }, data_);
  }

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit([&](const auto& v) -> decltype(auto) {
      using T = typename std::decay_t<decltype(v)>::value_type;
      return f(std::span<const T>(v));
    }, data_);
  }

  /// Copy of the selected rows, in the given order.
  Matrix select_rows(std::span<const std::size_t> idx) const {
    return std::visit([&](const auto& v) {
      using T = typename std::decay_t<decltype(v)>::value_type;
      std::vector<T> out;
      out.reserve(idx.size() * cols_);
      for (std::size_t r : idx) {
        if (r >= rows_) throw ShapeError("row index " + std::to_string(r) + " out of range");
        out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                   v.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
      }
      return Matrix(idx.size(), cols_, std::move(out));
    }, data_);
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  static std::size_t size_of(const Storage& s) {
    return std::visit([](const auto& v) { return v.size(); }, s);
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Storage data_{std::vector<double>{}};
};

/// Binary class labels, each 0 or 1.
class LabelVector {
 public:
  LabelVector() = default;

  explicit LabelVector(std::vector<std::uint8_t> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] > 1) {
        throw LabelError("label " + std::to_string(values_[i]) + " at index " + std::to_string(i) +
                         " is not 0 or 1");
      }
    }
  }

  LabelVector(std::initializer_list<int> values) {
    values_.reserve(values.size());
    std::size_t i = 0;
    for (int v : values) {
      if (v != 0 && v != 1) {
        throw LabelError("label " + std::to_string(v) + " at index " + std::to_string(i) +
                         " is not 0 or 1");
      }
      values_.push_back(static_cast<std::uint8_t>(v));
      ++i;
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::uint8_t> values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  LabelVector select(std::span<const std::size_t> idx) const {
    std::vector<std::uint8_t> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(values_.at(i));
    return LabelVector(std::move(out));
  }

  std::size_t count_ones() const noexcept {
    std::size_t n = 0;
    for (auto v : values_) n += v;
    return n;
  }

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<std::uint8_t> values_;
};

namespace detail {

template <class To, class From>
To convert_element(From v, std::size_t idx, std::size_t cols) {
  if constexpr (std::is_same_v<To, std::int32_t> && !std::is_same_v<From, std::int32_t>) {
    // astype(int32): truncation toward zero, with NaN/inf and overflow rejected
    const double d = static_cast<double>(v);
    if (!std::isfinite(d)) throw RangeError("non-finite value cannot be cast to I32", idx / cols, idx % cols);
    if (!(d > -2147483649.0 && d < 2147483648.0)) {
      throw RangeError("value " + std::to_string(d) + " outside I32 range", idx / cols, idx % cols);
    }
    return static_cast<std::int32_t>(d);
  } else if constexpr (std::is_same_v<To, float> && std::is_same_v<From, double>) {
    const float f = static_cast<float>(v);
    if (std::isinf(f) && std::isfinite(v)) {
      throw RangeError("value " + std::to_string(v) + " overflows F32", idx / cols, idx % cols);
    }
    return f;
  } else {
    return static_cast<To>(v);
  }
}

}  // namespace detail

/// Element-wise precision change. Float to F32 rounds to nearest-even; any
/// float to I32 truncates toward zero. Throws RangeError on NaN/inf or values
/// outside the I32 range.
inline Matrix cast(const Matrix& m, Precision target) {
  if (m.precision() == target) return m;
  return m.visit([&](auto src) {
    auto convert = [&]<class To>() {
      std::vector<To> out(src.size());
      for (std::size_t i = 0; i < src.size(); ++i) {
        out[i] = detail::convert_element<To>(src[i], i, m.cols() ? m.cols() : 1);
      }
      return Matrix(m.rows(), m.cols(), std::move(out));
    };
    switch (target) {
      case Precision::F64: return convert.template operator()<double>();
      case Precision::F32: return convert.template operator()<float>();
      case Precision::I32: return convert.template operator()<std::int32_t>();
    }
    return m;
  });
}

struct ColumnRange {
  double min;
  double max;

  double span() const noexcept { return max - min; }
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

/// Per-column (P_min, P_max).
inline std::vector<ColumnRange> column_min_max(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw ShapeError("column_min_max of an empty matrix");
  return m.visit([&](auto v) {
    std::vector<ColumnRange> out(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] = {static_cast<double>(v[j]), static_cast<double>(v[j])};
    for (std::size_t i = 1; i < m.rows(); ++i) {
      const auto* row = v.data() + i * m.cols();
      for (std::size_t j = 0; j < m.cols(); ++j) {
        const double x = static_cast<double>(row[j]);
        if (x < out[j].min) out[j].min = x;
        if (x > out[j].max) out[j].max = x;
      }
    }
    return out;
  });
}

}  // namespace quantbench
