/* Copyright 2026 The f1thresh Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "f1thresh/errors.hpp"
#include "f1thresh/surrogate.hpp"
#include "support/generators.hpp"
#include "support/properties.hpp"

namespace f1thresh {
namespace {

constexpr MetricSpec kMicro{MetricKind::kMicroF1, EmptyClassScore::kOne};
constexpr MetricSpec kMacro{MetricKind::kMacroF1, EmptyClassScore::kOne};

RealMatrix real(std::size_t n, std::size_t c, std::vector<double> v) { return RealMatrix(n, c, std::move(v)); }

TEST(Sigmoid, Values) {
  EXPECT_EQ(sigmoid(0.0, Slope(1.0)), 0.5);
  EXPECT_EQ(sigmoid(0.0, Slope(1234.5)), 0.5);
  // 1 / (1 + e^-5) to 40 digits: 0.99330714907571514444...
  EXPECT_NEAR(sigmoid(0.1, Slope(50.0)), 0.9933071490757151444, 4e-16);
}

TEST(Sigmoid, SaturatesWithoutNaN) {
  const double big = std::numeric_limits<double>::max();
  EXPECT_EQ(sigmoid(big, Slope(50.0)), 1.0);
  EXPECT_EQ(sigmoid(-big, Slope(50.0)), 0.0);
  EXPECT_EQ(sigmoid(1e6, Slope(1e6)), 1.0);
  EXPECT_EQ(sigmoid(-1e6, Slope(1e6)), 0.0);
  EXPECT_FALSE(std::isnan(sigmoid(-800.0, Slope(1.0))));
}

TEST(Slope, RejectsNonPositive) {
  EXPECT_THROW(Slope(0.0), std::invalid_argument);
  EXPECT_THROW(Slope(-1.0), std::invalid_argument);
  EXPECT_THROW(Slope(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(SurrogateDerivative, PeakIsQuarterSlope) {
  EXPECT_EQ(surrogate_derivative(0.0, Slope(50.0)), 12.5);
  EXPECT_EQ(surrogate_derivative(0.0, Slope(20.0)), 5.0);
  EXPECT_EQ(surrogate_derivative(0.0, Slope(100.0)), 25.0);
}

TEST(SurrogateDerivative, MatchesHighPrecisionValue) {
  // 50 s (1 - s), s = 1/(1 + e^-5): 0.33240283353950774570...
  EXPECT_NEAR(surrogate_derivative(0.1, Slope(50.0)), 0.3324028335395077457, 1e-15);
}

TEST(SurrogateDerivative, EvenAndBounded) {
  Xoshiro256 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(-2.0, 2.0);
    const Slope a(rng.uniform(0.5, 200.0));
    ASSERT_EQ(surrogate_derivative(x, a), surrogate_derivative(-x, a));
    ASSERT_LE(surrogate_derivative(x, a), a.value() / 4.0);
    ASSERT_GE(surrogate_derivative(x, a), 0.0);
    ASSERT_NEAR(surrogate_derivative(x, a), a.value() * sigmoid(x, a) * sigmoid(-x, a), 1e-12 * a.value());
  }
}

TEST(PredictionGradient, MicroExample) {
  const LabelMatrix y(2, 2, {1, 0, 1, 1});
  const RealMatrix g = f1_grad_wrt_pred(real(2, 2, {1, 0, 0, 1}), y, kMicro);
  // T = 2, S = 5: 2(5 - 2)/25 where y = 1, -4/25 where y = 0.
  EXPECT_DOUBLE_EQ(g(0, 0), 0.24);
  EXPECT_DOUBLE_EQ(g(0, 1), -0.16);
  EXPECT_DOUBLE_EQ(g(1, 0), 0.24);
  EXPECT_DOUBLE_EQ(g(1, 1), 0.24);
}

TEST(PredictionGradient, SignsFollowTruthOnAllTwoByTwo) {
  for (std::uint32_t ym = 0; ym < 16; ++ym) {
    for (std::uint32_t pm = 0; pm < 16; ++pm) {
      std::vector<std::uint8_t> y(4);
      std::vector<double> p(4);
      for (int k = 0; k < 4; ++k) {
        y[k] = (ym >> k) & 1u;
        p[k] = (pm >> k) & 1u;
      }
      if (ym == 0 && pm == 0) continue;
      for (const auto& metric : {kMicro, kMacro}) {
        const RealMatrix g = f1_grad_wrt_pred(real(2, 2, p), LabelMatrix(2, 2, y), metric);
        for (int k = 0; k < 4; ++k) {
          if (y[k]) {
            ASSERT_GE(g.values()[k], 0.0);
          } else {
            ASSERT_LE(g.values()[k], 0.0);
          }
        }
      }
    }
  }
}

TEST(PredictionGradient, SingleClassMacroEqualsMicro) {
  Xoshiro256 rng(2);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(10);
    const LabelMatrix y = testing::random_labels(rng, n, 1, 0.5);
    std::vector<double> p(n);
    for (auto& v : p) v = rng.uniform(0.01, 1.0);
    const RealMatrix yh(n, 1, p);
    ASSERT_EQ(f1_grad_wrt_pred(yh, y, kMacro), f1_grad_wrt_pred(yh, y, kMicro));
  }
}

TEST(PredictionGradient, DegenerateMicroAndEmptyMacroClass) {
  const LabelMatrix zeros(2, 2, {0, 0, 0, 0});
  EXPECT_THROW(f1_grad_wrt_pred(real(2, 2, {0, 0, 0, 0}), zeros, kMicro), DegenerateError);
  // Class 1 has no truth and no predictions: its entries are 0.
  const RealMatrix g = f1_grad_wrt_pred(real(2, 2, {1, 0, 0, 0}), LabelMatrix(2, 2, {1, 0, 1, 0}), kMacro);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(1, 1), 0.0);
  EXPECT_GT(g(1, 0), 0.0);
}

TEST(ThresholdGradient, SaturatesFarFromThresholds) {
  Xoshiro256 rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(30), c = 1 + rng.below(6);
    std::vector<double> p(n * c);
    for (auto& v : p) v = rng.below(2) ? rng.uniform(0.0, 0.2) : rng.uniform(0.8, 1.0);
    const ScoreMatrix scores(n, c, p);
    const LabelMatrix y = testing::random_labels(rng, n, c, 0.5);
    try {
      // |p - t| >= 0.3 here, and >= 0.5 in the quoted bound; both are tiny.
      const GradientVector g = sgl_threshold_grad(scores, ThresholdVector(c, 0.5), y, Slope(50.0), kMicro);
      for (const double v : g) ASSERT_LT(std::abs(v), 1e-4);
    } catch (const DegenerateError&) {
    }
  }
  const ScoreMatrix far(2, 1, {0.0, 1.0});
  const GradientVector g = sgl_threshold_grad(far, ThresholdVector(1, 0.5), LabelMatrix(2, 1, {0, 1}), Slope(50.0),
                                              kMicro);
  EXPECT_LT(std::abs(g[0]), 1e-6);
}

TEST(ThresholdGradient, TooHighThresholdGetsNegativeGradient) {
  // One positive at 0.4 with t = 0.5: predicted 0, so dF1/dt < 0.
  const GradientVector g = sgl_threshold_grad(ScoreMatrix(1, 1, {0.4}), ThresholdVector(1, 0.5),
                                              LabelMatrix(1, 1, {1}), Slope(50.0), kMicro);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_LT(g[0], 0.0);
  // S = 1, T = 0: dF1/dyhat = 2, times -sig'(-0.1).
  EXPECT_NEAR(g[0], -2.0 * 0.3324028335395077457, 1e-14);
}

TEST(ThresholdGradient, DoublingSlopeRescalesEachSummand) {
  // One row per class, so each coordinate is a single summand.
  Xoshiro256 rng(4);
  for (int i = 0; i < 200; ++i) {
    const std::size_t c = 1 + rng.below(8);
    const ScoreMatrix scores = testing::random_scores(rng, 1, c);
    const LabelMatrix y = testing::random_labels(rng, 1, c, 0.6);
    const ThresholdVector t = testing::random_thresholds(rng, c, 0.05, 0.95);
    const Slope a(rng.uniform(1.0, 60.0));
    const Slope a2(2.0 * a.value());
    GradientVector g1, g2;
    try {
      g1 = sgl_threshold_grad(scores, t, y, a, kMicro);
      g2 = sgl_threshold_grad(scores, t, y, a2, kMicro);
    } catch (const DegenerateError&) {
      continue;
    }
    for (std::size_t l = 0; l < c; ++l) {
      const double x = scores(0, l) - t[l];
      const double ratio = surrogate_derivative(x, a2) / surrogate_derivative(x, a);
      ASSERT_NEAR(g2[l], g1[l] * ratio, 1e-12 * std::abs(g2[l]) + 1e-300);
    }
  }
}

TEST(ThresholdGradient, KernelRouteMatchesDenseChainRule) {
  Xoshiro256 rng(5);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + rng.below(50), c = 1 + rng.below(11);
    const Dataset d(testing::grid_scores(rng, n, c, 20), testing::random_labels(rng, n, c, 0.4));
    const ThresholdVector t = testing::random_thresholds(rng, c);
    const Slope a(rng.uniform(1.0, 80.0));
    const MetricSpec metric{rng.below(2) ? MetricKind::kMicroF1 : MetricKind::kMacroF1,
                            static_cast<EmptyClassScore>(rng.below(3))};
    GradientVector kernel, dense;
    try {
      kernel = sgl_threshold_grad(d.scores(), t, d.labels(), a, metric);
      dense = sgl_threshold_grad_dense(d.scores(), t.values(), d.labels(), a, metric);
    } catch (const DegenerateError&) {
      continue;
    }
    for (std::size_t l = 0; l < c; ++l) {
      ASSERT_NEAR(kernel[l], dense[l], 1e-12 * std::max(1.0, std::abs(dense[l]))) << "class " << l;
    }
  }
}

TEST(ThresholdGradient, ForwardObjectiveIsHeavisideF1) {
  Xoshiro256 rng(6);
  for (int i = 0; i < 200; ++i) {
    const Dataset d = testing::random_dataset(rng, 1 + rng.below(30), 1 + rng.below(6), 0.5);
    const ThresholdVector t = testing::random_thresholds(rng, d.classes());
    try {
      const auto e = sgl_evaluate(d, t.values(), Slope(50.0), kMacro);
      ASSERT_EQ(e.objective, macro_f1(binarize(d.scores(), t), d.labels()));
    } catch (const DegenerateError&) {
    }
  }
}

TEST(ThresholdGradient, ShapeErrors) {
  EXPECT_THROW(sgl_threshold_grad(ScoreMatrix(1, 2, {0.1, 0.2}), ThresholdVector(1, 0.5), LabelMatrix(1, 2, {0, 1}),
                                  Slope(5.0), kMicro),
               DataError);
}

TEST(RelaxedF1, ApproachesHeavisideForSteepSlopes) {
  Xoshiro256 rng(7);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(20), c = 1 + rng.below(5);
    std::vector<double> p(n * c);
    for (auto& v : p) v = rng.below(2) ? rng.uniform(0.0, 0.4) : rng.uniform(0.6, 1.0);
    const ScoreMatrix scores(n, c, p);
    LabelMatrix y = testing::random_labels(rng, n, c, 0.5);
    y.mutable_values()[0] = 1;
    const ThresholdVector t(c, 0.5);
    EXPECT_NEAR(relaxed_f1(scores, t.values(), y, Slope(1000.0), kMicro), micro_f1(binarize(scores, t), y), 1e-9);
  }
}

TEST(RelaxedF1, ZeroThresholdsClosedForm) {
  Xoshiro256 rng(8);
  const std::size_t n = 7, c = 3;
  std::vector<double> p(n * c);
  for (auto& v : p) v = rng.uniform(0.5, 1.0);
  const ScoreMatrix scores(n, c, p);
  const LabelMatrix y = testing::random_labels(rng, n, c, 0.5);
  double positives = 0;
  for (const auto v : y.values()) positives += v;
  const std::vector<double> t(c, 0.0);
  EXPECT_NEAR(relaxed_f1(scores, t, y, Slope(200.0), kMicro), 2 * positives / (positives + n * c), 1e-12);
}

TEST(RelaxedF1, InUnitInterval) {
  Xoshiro256 rng(9);
  for (int i = 0; i < 500; ++i) {
    const Dataset d = testing::random_dataset(rng, 1 + rng.below(10), 1 + rng.below(4), 0.5);
    const ThresholdVector t = testing::random_thresholds(rng, d.classes());
    for (const auto& m : {kMicro, kMacro}) {
      const double v = relaxed_f1(d.scores(), t.values(), d.labels(), Slope(rng.uniform(1.0, 50.0)), m);
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(FiniteDifference, LinearObjectiveRecoveredExactly) {
  const std::vector<double> c = {1.5, -2.0, 0.25};
  const auto obj = [&](std::span<const double> t) { return c[0] * t[0] + c[1] * t[1] + c[2] * t[2]; };
  const std::vector<double> t = {0.3, 0.6, 0.9};
  const GradientVector g = finite_diff_grad(obj, t, 1e-3);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(g[l], c[l], 1e-10);
}

TEST(FiniteDifference, MatchesAnalyticRelaxedGradient) {
  Xoshiro256 rng(10);
  for (int i = 0; i < 200; ++i) {
    const Dataset d = testing::random_dataset(rng, 1 + rng.below(32), 1 + rng.below(8), rng.uniform(0.1, 0.9));
    const ThresholdVector t = testing::random_thresholds(rng, d.classes(), 0.05, 0.95);
    const Slope a(20.0);
    const GradientVector analytic = relaxed_f1_grad(d.scores(), t.values(), d.labels(), a, kMicro);
    const GradientVector numeric = finite_diff_grad(
        [&](std::span<const double> p) { return relaxed_f1(d.scores(), p, d.labels(), a, kMicro); }, t.values(),
        1e-6);
    for (std::size_t l = 0; l < d.classes(); ++l) {
      ASSERT_LE(std::abs(analytic[l] - numeric[l]), 1e-5 * std::max(std::abs(analytic[l]), 1e-3));
    }
  }
}

TEST(FiniteDifference, RejectsNonPositiveStep) {
  const auto obj = [](std::span<const double>) { return 0.0; };
  const std::vector<double> t = {0.5};
  EXPECT_THROW(finite_diff_grad(obj, t, 0.0), std::invalid_argument);
  EXPECT_THROW(finite_diff_grad(obj, t, -1e-6), std::invalid_argument);
}

TEST(Gradcheck, DefaultsPassAndTightToleranceFails) {
  const GradcheckReport ok = run_gradcheck(GradcheckConfig{});
  EXPECT_TRUE(ok.passed());
  EXPECT_EQ(ok.trials, 200u);
  EXPECT_LT(ok.worst_relative_error, 1e-4);

  GradcheckConfig tight;
  tight.relative_tolerance = 1e-12;
  const GradcheckReport bad = run_gradcheck(tight);
  EXPECT_FALSE(bad.passed());
  EXPECT_GT(bad.worst_relative_error, 1e-12);

  GradcheckConfig none;
  none.trials = 0;
  EXPECT_TRUE(run_gradcheck(none).passed());
}

void expect_property(const testing::PropertyResult& r) {
  EXPECT_GE(r.cases, 1000u) << r.name;
  EXPECT_EQ(r.failures, 0u) << r.name << ": " << r.first_failure;
}

TEST(SurrogateProperties, Gradcheck) { expect_property(testing::prop_gradcheck(1000, 21)); }
TEST(SurrogateProperties, ForwardBackwardDecoupling) {
  expect_property(testing::prop_forward_backward_decoupling(1000, 22));
}
TEST(SurrogateProperties, SaturationBound) { expect_property(testing::prop_saturation_bound(1000, 23)); }
TEST(SurrogateProperties, PredictionGradientExhaustive) {
  expect_property(testing::prop_pred_gradient_exhaustive(8, 24));
}

}  // namespace
}  // namespace f1thresh
