#include <quantbench/model.hpp>
#include <quantbench/serialize.hpp>

#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace quantbench;

namespace {

struct Problem {
  Matrix x;
  LabelVector y;
};

// Labels drawn from a logistic model with known weights so both classes mix.
Problem gaussian_problem(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  Xoshiro256StarStar rng(seed);
  Matrix x = gen::gaussian(rng, rows, cols);
  std::vector<std::uint8_t> y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double z = 0.3;
    for (std::size_t j = 0; j < cols; ++j) z += (j % 2 ? -1.0 : 1.5) * x(i, j);
    y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
  }
  return {std::move(x), LabelVector(std::move(y))};
}

// Regularized objective minimized by Newton's method in long double with a
// dense Gauss-Jordan solve: an optimizer independent of gradient descent.
long double newton_optimum_loss(const Matrix& x, const LabelVector& y, double l2) {
  const std::size_t n = x.rows(), d = x.cols() + 1;  // last coordinate is the bias
  std::vector<long double> theta(d, 0.0L);
  auto feature = [&](std::size_t i, std::size_t j) -> long double { return j + 1 == d ? 1.0L : x(i, j); };
  auto loss = [&]() {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      long double z = 0.0L;
      for (std::size_t j = 0; j < d; ++j) z += theta[j] * feature(i, j);
      s += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0L) - y[i] * z;
    }
    long double reg = 0.0L;
    for (std::size_t j = 0; j + 1 < d; ++j) reg += theta[j] * theta[j];
    return s / n + 0.5L * l2 / n * reg;
  };
  for (int it = 0; it < 50; ++it) {
    std::vector<long double> g(d, 0.0L);
    std::vector<std::vector<long double>> h(d, std::vector<long double>(d + 1, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
      long double z = 0.0L;
      for (std::size_t j = 0; j < d; ++j) z += theta[j] * feature(i, j);
      const long double p = 1.0L / (1.0L + std::exp(-z));
      for (std::size_t a = 0; a < d; ++a) {
        g[a] += (p - y[i]) * feature(i, a) / n;
        for (std::size_t b = 0; b < d; ++b) h[a][b] += p * (1 - p) * feature(i, a) * feature(i, b) / n;
      }
    }
    for (std::size_t j = 0; j + 1 < d; ++j) {
      g[j] += l2 / n * theta[j];
      h[j][j] += l2 / n;
    }
    for (std::size_t a = 0; a < d; ++a) h[a][d] = g[a];
    for (std::size_t c = 0; c < d; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < d; ++r)
        if (std::abs(h[r][c]) > std::abs(h[piv][c])) piv = r;
      std::swap(h[c], h[piv]);
      for (std::size_t r = 0; r < d; ++r) {
        if (r == c) continue;
        const long double f = h[r][c] / h[c][c];
        for (std::size_t k = c; k <= d; ++k) h[r][k] -= f * h[c][k];
      }
    }
    for (std::size_t a = 0; a < d; ++a) theta[a] -= h[a][d] / h[a][a];
  }
  return loss();
}

}  // namespace

TEST(Sigmoid, SymmetryPoint) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(0.0f), 0.5f);
}

TEST(Sigmoid, Antisymmetry) {
  Xoshiro256StarStar rng(41);
  for (int i = 0; i < 1000; ++i) {
    const double z = -30.0 + 60.0 * rng.uniform();
    EXPECT_NEAR(sigmoid(-z), 1.0 - sigmoid(z), 1e-15);
  }
}

TEST(Sigmoid, LargeArgumentsMatchExtendedPrecisionWithoutOverflow) {
  const long double reference = 1.0L / (1.0L + std::exp(-40.0L));
  EXPECT_LE(std::abs(sigmoid(40.0) - 1.0), 1e-18);
  EXPECT_NEAR(static_cast<double>(sigmoid(40.0)), static_cast<double>(reference), 1e-18);
  EXPECT_EQ(sigmoid(40.0), 1.0);
  const long double tiny = 1.0L / (1.0L + std::exp(40.0L));
  EXPECT_NEAR(sigmoid(-40.0) / static_cast<double>(tiny), 1.0, 1e-14);
  EXPECT_TRUE(std::isfinite(sigmoid(-710.0)));
  EXPECT_GT(sigmoid(-710.0), 0.0);
  for (double z : {1e4, 1e300}) {
    EXPECT_EQ(sigmoid(z), 1.0);
    EXPECT_EQ(sigmoid(-z), 0.0);
    EXPECT_FALSE(std::isnan(sigmoid(z)));
  }
  EXPECT_EQ(sigmoid(100.0f), 1.0f);
  EXPECT_GE(sigmoid(-100.0f), 0.0f);
}

TEST(Fit, SeparableOneFeatureProblem) {
  std::vector<double> xs;
  std::vector<std::uint8_t> ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(-1.0);
    ys.push_back(0);
    xs.push_back(1.0);
    ys.push_back(1);
  }
  const Matrix x(20, 1, std::move(xs));
  const LabelVector y(std::move(ys));
  const LRModel m = fit(x, y);
  EXPECT_GT(m.weights[0], 0.0);
  EXPECT_EQ(accuracy(predict(m, x), y), 1.0);
  EXPECT_EQ(m.compute_precision, Precision::F64);
}

TEST(Fit, SingleClassDrivesBiasUp) {
  Xoshiro256StarStar rng(42);
  Matrix raw = gen::gaussian(rng, 30, 2);
  std::vector<double> centered(raw.values<double>().begin(), raw.values<double>().end());
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 30; ++i) mean += centered[i * 2 + j];
    mean /= 30.0;
    for (std::size_t i = 0; i < 30; ++i) centered[i * 2 + j] -= mean;
  }
  const Matrix x(30, 2, std::move(centered));
  const LabelVector y(std::vector<std::uint8_t>(30, 1));
  LRConfig cfg;
  cfg.l2_strength = 0.0;
  cfg.max_iters = 200;
  std::vector<double> biases;
  for (std::size_t iters : {1, 10, 50, 200}) {
    cfg.max_iters = iters;
    const LRModel m = fit(x, y, cfg);
    biases.push_back(m.bias);
    for (double w : m.weights) EXPECT_NEAR(w, 0.0, 1e-12);
    for (auto p : predict(m, x)) EXPECT_EQ(p, 1);
  }
  EXPECT_GT(biases.front(), 0.0);
  for (std::size_t i = 1; i < biases.size(); ++i) EXPECT_GT(biases[i], biases[i - 1]);
}

TEST(Fit, FinalLossMatchesIndependentNewtonOptimum) {
  const auto prob = gaussian_problem(43, 40, 3);
  const LRModel m = fit(prob.x, prob.y);
  const long double reference = newton_optimum_loss(prob.x, prob.y, 1.0);
  EXPECT_NEAR(m.final_loss, static_cast<double>(reference), 1e-4);
}

TEST(Fit, DeterministicAndRecordsConfig) {
  const auto prob = gaussian_problem(44, 60, 4);
  LRConfig cfg;
  cfg.max_iters = 300;
  const LRModel a = fit(prob.x, prob.y, cfg);
  const LRModel b = fit(prob.x, prob.y, cfg);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.config, cfg);
  EXPECT_EQ(a.weights.size(), 4u);
  EXPECT_GE(a.final_loss, 0.0);
}

TEST(Fit, ComputesInStoragePrecision) {
  const auto prob = gaussian_problem(45, 50, 3);
  EXPECT_EQ(fit(cast(prob.x, Precision::F32), prob.y).compute_precision, Precision::F32);
  const Matrix ints = cast(prob.x, Precision::I32);
  const LRModel mi = fit(ints, prob.y);
  EXPECT_EQ(mi.compute_precision, Precision::F32);
  // integer storage trains the same as its float32 widening
  EXPECT_EQ(mi.weights, fit(cast(ints, Precision::F32), prob.y).weights);
}

TEST(Fit, Errors) {
  const Matrix x = Matrix::from_rows({{1}, {2}});
  EXPECT_THROW(fit(x, LabelVector{0, 1, 1}), ShapeError);
  EXPECT_THROW(fit(Matrix::from_rows({{1}, {std::numeric_limits<double>::quiet_NaN()}}), LabelVector{0, 1}), DataError);
  LRConfig bad;
  bad.learning_rate = 0.0;
  EXPECT_THROW(fit(x, LabelVector{0, 1}, bad), ParameterError);
  bad = {};
  bad.max_iters = 0;
  EXPECT_THROW(fit(x, LabelVector{0, 1}, bad), ParameterError);
}

TEST(Objective, AnalyticGradientMatchesCentralDifferences) {
  const auto prob = gaussian_problem(46, 35, 4);
  Xoshiro256StarStar rng(47);
  for (int point = 0; point < 20; ++point) {
    std::vector<double> w(4);
    for (auto& v : w) v = -2.0 + 4.0 * rng.uniform();
    const double b = -1.0 + 2.0 * rng.uniform();
    const double l2 = 0.5 + rng.uniform();
    const auto obj = logistic_objective(prob.x, prob.y, w, b, l2);
    const double h = 1e-6;
    std::vector<double> numeric(5);
    for (std::size_t k = 0; k < 5; ++k) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (k < 4) {
        wp[k] += h;
        wm[k] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      numeric[k] = (logistic_objective(prob.x, prob.y, wp, bp, l2).loss -
                    logistic_objective(prob.x, prob.y, wm, bm, l2).loss) / (2 * h);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const double analytic = k < 4 ? obj.grad_w[k] : obj.grad_b;
      num += (analytic - numeric[k]) * (analytic - numeric[k]);
      den += analytic * analytic;
    }
    EXPECT_LE(std::sqrt(num / den), 1e-5) << "point " << point;
  }
}

TEST(Fit, LossNeverIncreasesWithLipschitzStep) {
  const auto prob = gaussian_problem(48, 80, 5);
  LRConfig cfg;
  cfg.learning_rate = 1e9;  // capped to 1/L
  cfg.max_iters = 400;
  std::vector<double> losses;
  const LRModel m = fit(prob.x, prob.y, cfg, [&](std::size_t, double loss) { losses.push_back(loss); });
  EXPECT_LT(m.step_size, 1e9);
  ASSERT_GT(losses.size(), 10u);
  for (std::size_t i = 1; i < losses.size(); ++i) EXPECT_LE(losses[i], losses[i - 1] + 1e-15);
}

TEST(Fit, StepCapKeepsUnscaledFeaturesStable) {
  auto prob = gaussian_problem(49, 100, 3);
  std::vector<double> big(prob.x.values<double>().begin(), prob.x.values<double>().end());
  for (auto& v : big) v = 50.0 + 40.0 * v;
  const Matrix x(100, 3, std::move(big));
  LRConfig cfg;
  cfg.max_iters = 200;
  std::vector<double> losses;
  fit(x, prob.y, cfg, [&](std::size_t, double loss) { losses.push_back(loss); });
  for (std::size_t i = 1; i < losses.size(); ++i) EXPECT_LE(losses[i], losses[i - 1] + 1e-12);
}

TEST(Predict, ZeroModelGivesHalf) {
  LRModel m;
  m.weights = {0.0, 0.0};
  for (double p : predict_proba(m, Matrix::from_rows({{1, 2}, {-3, 4}}))) EXPECT_EQ(p, 0.5);
  EXPECT_EQ(predict(m, Matrix::from_rows({{1, 2}})), LabelVector{1});
}

TEST(Predict, NegatedModelComplementsProbabilities) {
  Xoshiro256StarStar rng(50);
  const Matrix x = gen::gaussian(rng, 20, 3);
  LRModel m;
  m.weights = {0.7, -1.2, 0.3};
  m.bias = 0.4;
  LRModel neg = m;
  for (auto& w : neg.weights) w = -w;
  neg.bias = -m.bias;
  const auto p = predict_proba(m, x);
  const auto q = predict_proba(neg, x);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(q[i], 1.0 - p[i], 1e-15);
}

TEST(Predict, MatchesHandRolledDotProduct) {
  Xoshiro256StarStar rng(51);
  const Matrix x = gen::gaussian(rng, 25, 6);
  LRModel m;
  for (int j = 0; j < 6; ++j) m.weights.push_back(-1.0 + 2.0 * rng.uniform());
  m.bias = 0.25;
  const auto p = predict_proba(m, x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    long double z = m.bias;
    for (std::size_t j = 0; j < 6; ++j) z += static_cast<long double>(m.weights[j]) * x(i, j);
    const double ref = static_cast<double>(1.0L / (1.0L + std::exp(-z)));
    EXPECT_NEAR(p[i], ref, 8 * std::numeric_limits<double>::epsilon());
  }
  m.compute_precision = Precision::F32;
  const auto pf = predict_proba(m, cast(x, Precision::F32));
  for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_NEAR(pf[i], p[i], 64 * std::numeric_limits<float>::epsilon());
}

TEST(Predict, ThresholdOnLogitEqualsThresholdOnProbability) {
  Xoshiro256StarStar rng(52);
  const Matrix x = gen::gaussian(rng, 200, 2);
  LRModel m;
  m.weights = {1.3, -0.8};
  m.bias = -0.1;
  const auto pred = predict(m, x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double z = m.weights[0] * x(i, 0) + m.weights[1] * x(i, 1) + m.bias;
    EXPECT_EQ(pred[i], z >= 0.0 ? 1 : 0);
  }
  EXPECT_THROW(predict(m, Matrix::from_rows({{1, 2, 3}})), ShapeError);
}

TEST(Accuracy, ExamplesAndErrors) {
  const LabelVector truth{0, 1, 1, 0, 1, 0, 0, 1, 1, 1};
  EXPECT_EQ(accuracy(truth, truth), 1.0);
  std::vector<std::uint8_t> flipped;
  for (auto v : truth) flipped.push_back(1 - v);
  EXPECT_EQ(accuracy(LabelVector(flipped), truth), 0.0);
  EXPECT_THROW(accuracy(LabelVector{0}, truth), ShapeError);
}

TEST(ModelDocument, RoundTripBitExact) {
  const auto prob = gaussian_problem(53, 40, 3);
  const LRModel m = fit(cast(prob.x, Precision::F32), prob.y);
  const auto doc = to_document(m);
  EXPECT_EQ(doc.at("compute_precision"), "F32");
  EXPECT_EQ(from_document<LRModel>(json::parse(doc.dump())), m);
}
