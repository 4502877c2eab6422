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

#ifndef F1THRESH_OPTIM_HPP_
#define F1THRESH_OPTIM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "f1thresh/metrics.hpp"
#include "f1thresh/surrogate.hpp"
#include "f1thresh/tagmat.hpp"

namespace f1thresh {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

OptimizerState adam_init(std::size_t classes, const AdamConfig& cfg);

// One bias-corrected Adam step that *minimizes*: params - lr * m̂ / (sqrt(v̂) + eps),
// then clamps every parameter to [0, 1]. Callers ascending F1 pass -dF1/dt.
// Throws DataError on a length mismatch and std::domain_error on a non-finite
// gradient.
std::pair<OptimizerState, ThresholdVector> adam_step(const OptimizerState& state, const ThresholdVector& params,
                                                     std::span<const double> grads, const AdamConfig& cfg);

struct FitConfig {
  std::size_t epochs = 100;
  double init_threshold = 0.5;
  AdamConfig adam{};
  double slope = 50.0;  // SGL only
  MetricSpec metric{};
  std::uint64_t seed = 0;

  void validate() const;
};

struct FitResult {
  ThresholdVector thresholds;
  // trace[e] is the Heaviside F1 on the fitting set after epoch e (or after
  // stage e for dichotomic search); trace.back() belongs to `thresholds`.
  std::vector<double> trace;
  // F1 at the initial thresholds, before any update.
  double initial_objective = 0.0;
  double elapsed_seconds = 0.0;
  std::size_t epochs_run = 0;
};

// Value and ascent direction of the objective at t. `objective` is the true
// F1 at t; `gradient` approximates dF1/dt.
struct GradientEvaluation {
  double objective;
  GradientVector gradient;
};

using GradientProvider = std::function<GradientEvaluation(const Dataset&, std::span<const double>)>;

// Surrogate-gradient provider (forward with the step, backward with the
// sigmoid derivative).
GradientProvider sgl_gradient(Slope a, const MetricSpec& metric);

// Full-batch gradient ascent: thresholds start at cfg.init_threshold; every
// epoch evaluates the provider on the whole dataset and takes one Adam step
// on -gradient. Runs exactly cfg.epochs epochs.
FitResult fit(const Dataset& dataset, const FitConfig& cfg, const GradientProvider& grad_fn);

// fit() with sgl_gradient(cfg.slope, cfg.metric).
FitResult fit_sgl(const Dataset& dataset, const FitConfig& cfg);

}  // namespace f1thresh

#endif  // F1THRESH_OPTIM_HPP_
