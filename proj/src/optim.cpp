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

#include "f1thresh/optim.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "f1thresh/errors.hpp"

namespace f1thresh {

void AdamConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("Adam learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("Adam beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("Adam beta2 must be in [0, 1)");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("Adam eps must be positive");
}

void FitConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(init_threshold >= 0.0 && init_threshold <= 1.0)) {
    throw std::invalid_argument("initial threshold must be in [0, 1]");
  }
  adam.validate();
  Slope{slope};
}

OptimizerState adam_init(std::size_t classes, const AdamConfig& cfg) {
  if (classes == 0) throw std::invalid_argument("Adam state needs at least one parameter");
  cfg.validate();
  return OptimizerState{std::vector<double>(classes, 0.0), std::vector<double>(classes, 0.0), 0};
}

std::pair<OptimizerState, ThresholdVector> adam_step(const OptimizerState& state, const ThresholdVector& params,
                                                     std::span<const double> grads, const AdamConfig& cfg) {
  const std::size_t n = params.size();
  if (state.m.size() != n || state.v.size() != n || grads.size() != n) {
    throw DataError("Adam length mismatch: params " + std::to_string(n) + ", grads " +
                    std::to_string(grads.size()) + ", state " + std::to_string(state.m.size()));
  }
  for (const double g : grads) {
    if (!std::isfinite(g)) throw std::domain_error("non-finite gradient passed to Adam");
  }
  OptimizerState next = state;
  next.step = state.step + 1;
  const double step = static_cast<double>(next.step);
  const double m_correction = 1.0 - std::pow(cfg.beta1, step);
  const double v_correction = 1.0 - std::pow(cfg.beta2, step);
  std::vector<double> updated(n);
  for (std::size_t i = 0; i < n; ++i) {
    next.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    next.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double m_hat = next.m[i] / m_correction;
    const double v_hat = next.v[i] / v_correction;
    updated[i] = params[i] - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
  return {std::move(next), ThresholdVector::clamped(std::move(updated))};
}

GradientProvider sgl_gradient(Slope a, const MetricSpec& metric) {
  return [a, metric](const Dataset& dataset, std::span<const double> t) {
    SurrogateEvaluation e = sgl_evaluate(dataset, t, a, metric);
    return GradientEvaluation{e.objective, std::move(e.gradient)};
  };
}

FitResult fit(const Dataset& dataset, const FitConfig& cfg, const GradientProvider& grad_fn) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t classes = dataset.classes();

  ThresholdVector t(classes, cfg.init_threshold);
  OptimizerState state = adam_init(classes, cfg.adam);
  FitResult result{t, {}, 0.0, 0.0, 0};
  result.trace.reserve(cfg.epochs);

  std::vector<double> descent(classes);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const GradientEvaluation eval = grad_fn(dataset, t.values());
    if (epoch == 0) {
      result.initial_objective = eval.objective;
    } else {
      result.trace.push_back(eval.objective);
    }
    for (std::size_t l = 0; l < classes; ++l) descent[l] = -eval.gradient[l];
    auto [next_state, next_t] = adam_step(state, t, descent, cfg.adam);
    state = std::move(next_state);
    t = std::move(next_t);
  }
  result.trace.push_back(f1_from_tallies(tally_at(dataset, t), cfg.metric));
  result.thresholds = std::move(t);
  result.epochs_run = cfg.epochs;
  result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

FitResult fit_sgl(const Dataset& dataset, const FitConfig& cfg) {
  return fit(dataset, cfg, sgl_gradient(Slope(cfg.slope), cfg.metric));
}

}  // namespace f1thresh
