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

#ifndef F1THRESH_SURROGATE_HPP_
#define F1THRESH_SURROGATE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "f1thresh/metrics.hpp"
#include "f1thresh/tagmat.hpp"

namespace f1thresh {

// Steepness of the surrogate sigmoid. Finite and > 0.
class Slope {
 public:
  explicit Slope(double a);
  double value() const { return a_; }

 private:
  double a_;
};

// dF1/dt per class.
using GradientVector = std::vector<double>;

// 1 / (1 + exp(-a x)), evaluated on the branch that never overflows.
double sigmoid(double x, Slope a);

// a * sig_a(x) * sig_a(-x). Even in x, peak a/4 at x = 0.
double surrogate_derivative(double x, Slope a);

// F1 of a real-valued prediction matrix: the usual ratio formulas with ŷ
// allowed anywhere on the real line. Equals micro_f1 / macro_f1 on binary
// inputs.
double f1_of_real(const RealMatrix& pred, const LabelMatrix& truth, const MetricSpec& metric);

// dF1/dŷ at a (binary or relaxed) prediction matrix.
//   micro: 2 (y S - T) / S^2 with T = sum y ŷ, S = sum y + sum ŷ.
//   macro: the per-class version divided by the number of averaged classes;
//          a class with S_l = 0 gets 0 everywhere.
// Throws DegenerateError for micro when S = 0.
RealMatrix f1_grad_wrt_pred(const RealMatrix& pred, const LabelMatrix& truth, const MetricSpec& metric);

// F1 and its surrogate gradient in one pass over the data.
struct SurrogateEvaluation {
  double objective;  // Heaviside (true) F1 at t
  GradientVector gradient;
};

// Forward pass: binarize with p >= t and evaluate F1. Backward pass:
//   g[l] = sum_n (dF1/dŷ)[n][l] * (-1) * sig_a'(p[n][l] - t[l])
// with dF1/dŷ taken at the binary predictions. The -1 is the inner
// derivative of p - t, so g is the gradient to ascend.
SurrogateEvaluation sgl_evaluate(const Dataset& dataset, std::span<const double> t, Slope a,
                                 const MetricSpec& metric);

GradientVector sgl_threshold_grad(const ScoreMatrix& scores, const ThresholdVector& t, const LabelMatrix& truth,
                                  Slope a, const MetricSpec& metric);

// The same chain rule written literally: materializes dF1/dŷ as an n x C
// matrix and multiplies element-wise. Slow; used to cross-check sgl_evaluate.
GradientVector sgl_threshold_grad_dense(const ScoreMatrix& scores, std::span<const double> t,
                                        const LabelMatrix& truth, Slope a, const MetricSpec& metric);

// F1 with ŷ = sig_a(p - t) in place of the step, so that it is smooth in t.
double relaxed_f1(const ScoreMatrix& scores, std::span<const double> t, const LabelMatrix& truth, Slope a,
                  const MetricSpec& metric);

// Analytic gradient of relaxed_f1 by the chain rule.
GradientVector relaxed_f1_grad(const ScoreMatrix& scores, std::span<const double> t, const LabelMatrix& truth,
                               Slope a, const MetricSpec& metric);

using Objective = std::function<double(std::span<const double>)>;

// Central differences: g[l] = (f(t + h e_l) - f(t - h e_l)) / 2h.
// Throws std::invalid_argument unless h > 0.
GradientVector finite_diff_grad(const Objective& objective, std::span<const double> t, double h);

struct GradcheckConfig {
  std::size_t max_instances = 32;
  std::size_t max_classes = 8;
  std::size_t trials = 200;
  // Slopes cycled through trial by trial.
  std::vector<double> slopes = {5.0, 20.0, 50.0};
  double relative_tolerance = 1e-4;
  // Coordinates whose analytic value is below this magnitude are judged on
  // absolute error instead, against relative_tolerance * small_gradient.
  double small_gradient = 1e-3;
  double step = 1e-6;
  std::uint64_t seed = 0;
};

struct GradcheckReport {
  std::size_t trials = 0;
  std::size_t coordinates = 0;
  std::size_t failures = 0;
  double worst_relative_error = 0.0;
  // Where the worst error was seen.
  std::size_t worst_trial = 0;
  std::size_t worst_class = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool passed() const { return failures == 0; }
};

// Random datasets (n <= max_instances, C <= max_classes), random t in
// (0.05, 0.95), both metrics per trial: compares relaxed_f1_grad with
// finite_diff_grad(relaxed_f1).
GradcheckReport run_gradcheck(const GradcheckConfig& config);

}  // namespace f1thresh

#endif  // F1THRESH_SURROGATE_HPP_
