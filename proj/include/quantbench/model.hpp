#pragma once

// Binary logistic regression trained by full-batch gradient descent.
//
// Arithmetic runs in the precision of the training matrix: F64 data trains in
// double, F32 data in float, and I32 data is widened element-wise to float at
// multiply time so storage stays at 4 bytes and compute at 32 bits.
//
// Objective (bias unregularized):
//   mean_i [softplus(z_i) - y_i z_i] + l2 / (2 n) * |w|^2,   z_i = w.x_i + b

#include <quantbench/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <type_traits>
#include <vector>

namespace quantbench {

struct LRConfig {
  double l2_strength = 1.0;
  double learning_rate = 0.1;
  std::size_t max_iters = 1000;
  double tolerance = 1e-6;  // on the gradient infinity-norm
  std::uint64_t seed = 0;   // reserved; initialization is all zeros
  // Clamp the step to 1/L, L the smoothness constant of the objective on the
  // training data, so fixed-step descent stays stable on unscaled features.
  bool cap_step = true;

  friend bool operator==(const LRConfig&, const LRConfig&) = default;
};

struct LRModel {
  std::vector<double> weights;
  double bias = 0.0;
  Precision compute_precision = Precision::F64;
  std::size_t iterations_run = 0;
  double final_loss = 0.0;
  double final_gradient_norm = 0.0;
  double step_size = 0.0;
  bool converged = false;
  LRConfig config;

  friend bool operator==(const LRModel&, const LRModel&) = default;
};

/// Logistic function, branch-stable: exp is only ever taken of a non-positive
/// argument, so nothing overflows.
template <class T>
  requires std::is_floating_point_v<T>
T sigmoid(T z) noexcept {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

/// log(1 + e^z) without overflow.
template <class T>
  requires std::is_floating_point_v<T>
T softplus(T z) noexcept {
  return std::max(z, T(0)) + std::log1p(std::exp(-std::abs(z)));
}

namespace detail {

template <class T, class S>
T widen(S v) noexcept {
  return static_cast<T>(v);
}

// Eight independent accumulators combined in a fixed order: deterministic, and
// lets the compiler vectorize the reduction.
template <class T, class S>
T dot(const S* x, const T* w, std::size_t n) noexcept {
  T acc[8] = {};
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8)
    for (std::size_t k = 0; k < 8; ++k) acc[k] += widen<T>(x[j + k]) * w[j + k];
  T s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  for (; j < n; ++j) s += widen<T>(x[j]) * w[j];
  return s;
}

template <class T>
using compute_t = std::conditional_t<std::is_same_v<T, double>, double, float>;

// Fills grad_w / grad_b with the objective gradient at (w, b); returns the
// objective value when want_loss is set, otherwise 0.
template <class T, class S>
T evaluate(std::span<const S> x, std::size_t rows, std::size_t cols, std::span<const std::uint8_t> y,
           std::span<const T> w, T b, T l2, bool want_loss, std::span<T> grad_w, T& grad_b,
           std::vector<T>& residual) {
  const T inv_n = T(1) / static_cast<T>(rows);
  residual.resize(rows);
  T loss = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const T z = dot<T, S>(x.data() + i * cols, w.data(), cols) + b;
    const T yi = static_cast<T>(y[i]);
    residual[i] = sigmoid(z) - yi;
    if (want_loss) loss += softplus(z) - yi * z;
  }
  std::fill(grad_w.begin(), grad_w.end(), T(0));
  T gb = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const T r = residual[i];
    const S* row = x.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) grad_w[j] += r * widen<T>(row[j]);
    gb += r;
  }
  const T reg = l2 * inv_n;
  T wsq = 0;
  for (std::size_t j = 0; j < cols; ++j) {
    grad_w[j] = grad_w[j] * inv_n + reg * w[j];
    wsq += w[j] * w[j];
  }
  grad_b = gb * inv_n;
  if (!want_loss) return T(0);
  return loss * inv_n + T(0.5) * reg * wsq;
}

// Smoothness constant of the objective: 0.25 * lambda_max([X 1]^T [X 1] / n)
// + l2 / n, with lambda_max from a fixed number of power iterations.
template <class S>
double lipschitz_bound(std::span<const S> x, std::size_t rows, std::size_t cols, double l2) {
  const std::size_t d = cols + 1;
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> av(d);
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    std::fill(av.begin(), av.end(), 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const S* row = x.data() + i * cols;
      double xv = v[cols];
      for (std::size_t j = 0; j < cols; ++j) xv += static_cast<double>(row[j]) * v[j];
      for (std::size_t j = 0; j < cols; ++j) av[j] += xv * static_cast<double>(row[j]);
      av[cols] += xv;
    }
    double norm = 0.0;
    for (double a : av) norm += a * a;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    lambda = norm / static_cast<double>(rows);
    for (std::size_t j = 0; j < d; ++j) v[j] = av[j] / norm;
  }
  return 0.25 * lambda + l2 / static_cast<double>(rows);
}

template <class T>
T inf_norm(std::span<const T> g, T gb) noexcept {
  T m = std::abs(gb);
  for (T v : g) m = std::max(m, std::abs(v));
  return m;
}

inline void validate_training_input(const Matrix& x, const LabelVector& y, const LRConfig& cfg) {
  if (x.rows() != y.size()) {
    throw ShapeError("matrix has " + std::to_string(x.rows()) + " rows but " + std::to_string(y.size()) +
                     " labels");
  }
  if (x.rows() == 0) throw ShapeError("cannot fit on an empty matrix");
  if (!(cfg.learning_rate > 0.0)) throw ParameterError("learning_rate must be > 0");
  if (cfg.max_iters < 1) throw ParameterError("max_iters must be >= 1");
  if (!(cfg.l2_strength >= 0.0)) throw ParameterError("l2_strength must be >= 0");
  if (!(cfg.tolerance >= 0.0)) throw ParameterError("tolerance must be >= 0");
  x.visit([&](auto v) {
    using S = typename decltype(v)::value_type;
    if constexpr (std::is_floating_point_v<S>) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isnan(v[i])) {
          throw DataError("NaN at row " + std::to_string(i / x.cols()) + ", col " +
                          std::to_string(i % x.cols()));
        }
      }
    }
  });
}

}  // namespace detail

/// Per-iteration hook: (iteration index, objective before that update).
using FitObserver = std::function<void(std::size_t, double)>;

/// Objective value and gradient at (weights, bias), computed in F64.
struct ObjectiveValue {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

inline ObjectiveValue logistic_objective(const Matrix& x, const LabelVector& y, std::span<const double> weights,
                                         double bias, double l2_strength) {
  if (x.rows() != y.size()) throw ShapeError("row/label count mismatch");
  if (weights.size() != x.cols()) throw ShapeError("weight length does not match feature count");
  const Matrix xd = cast(x, Precision::F64);
  ObjectiveValue out;
  out.grad_w.resize(x.cols());
  std::vector<double> residual;
  out.loss = detail::evaluate<double, double>(xd.values<double>(), x.rows(), x.cols(), y.values(), weights,
                                              bias, l2_strength, true, out.grad_w, out.grad_b, residual);
  return out;
}

namespace detail {

template <class T, class S>
LRModel fit_impl(std::span<const S> x, std::size_t rows, std::size_t cols, const LabelVector& y,
                 const LRConfig& cfg, const FitObserver& observer) {
  std::vector<T> w(cols, T(0));
  std::vector<T> grad(cols);
  std::vector<T> residual(rows);
  T b = 0;
  T grad_b = 0;
  const T l2 = static_cast<T>(cfg.l2_strength);
  const T tol = static_cast<T>(cfg.tolerance);

  double step = cfg.learning_rate;
  if (cfg.cap_step) step = std::min(step, 1.0 / lipschitz_bound<S>(x, rows, cols, cfg.l2_strength));
  const T lr = static_cast<T>(step);

  LRModel model;
  model.compute_precision = precision_of<T>();
  model.config = cfg;
  model.step_size = step;

  std::size_t it = 0;
  T gnorm = 0;
  for (; it < cfg.max_iters; ++it) {
    const T loss = evaluate<T, S>(x, rows, cols, y.values(), w, b, l2, static_cast<bool>(observer), grad,
                                  grad_b, residual);
    if (observer) observer(it, static_cast<double>(loss));
    gnorm = inf_norm<T>(grad, grad_b);
    if (gnorm <= tol) {
      model.converged = true;
      break;
    }
    for (std::size_t j = 0; j < cols; ++j) w[j] -= lr * grad[j];
    b -= lr * grad_b;
  }
  const T loss = evaluate<T, S>(x, rows, cols, y.values(), w, b, l2, true, grad, grad_b, residual);
  if (!model.converged) {
    gnorm = inf_norm<T>(grad, grad_b);
    model.converged = gnorm <= tol;
  }
  model.iterations_run = it;
  model.final_loss = std::max(0.0, static_cast<double>(loss));
  model.final_gradient_norm = static_cast<double>(gnorm);
  model.weights.assign(w.begin(), w.end());
  model.bias = static_cast<double>(b);
  return model;
}

}  // namespace detail

/// Trains from zero initialization. Single-threaded and deterministic.
inline LRModel fit(const Matrix& x, const LabelVector& y, const LRConfig& cfg = {},
                   const FitObserver& observer = {}) {
  detail::validate_training_input(x, y, cfg);
  return x.visit([&](auto v) {
    using S = typename decltype(v)::value_type;
    return detail::fit_impl<detail::compute_t<S>, S>(v, x.rows(), x.cols(), y, cfg, observer);
  });
}

/// P(y = 1 | x) per row, computed in the model's precision.
inline std::vector<double> predict_proba(const LRModel& model, const Matrix& x) {
  if (x.cols() != model.weights.size()) {
    throw ShapeError("model expects " + std::to_string(model.weights.size()) + " features, got " +
                     std::to_string(x.cols()));
  }
  auto run = [&]<class T>() {
    const std::vector<T> w(model.weights.begin(), model.weights.end());
    const T b = static_cast<T>(model.bias);
    return x.visit([&](auto v) {
      using S = typename decltype(v)::value_type;
      std::vector<double> out(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i) {
        out[i] = static_cast<double>(sigmoid(detail::dot<T, S>(v.data() + i * x.cols(), w.data(), x.cols()) + b));
      }
      return out;
    });
  };
  if (model.compute_precision == Precision::F64) return run.template operator()<double>();
  return run.template operator()<float>();
}

/// Threshold at 0.5 (ties go to class 1).
inline LabelVector predict(const LRModel& model, const Matrix& x) {
  const auto p = predict_proba(model, x);
  std::vector<std::uint8_t> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= 0.5 ? 1 : 0;
  return LabelVector(std::move(out));
}

inline double accuracy(const LabelVector& pred, const LabelVector& truth) {
  if (pred.size() != truth.size()) {
    throw ShapeError("accuracy of " + std::to_string(pred.size()) + " predictions against " +
                     std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) throw ShapeError("accuracy of empty label vectors");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += pred[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace quantbench
