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

#ifndef F1THRESH_SEARCH_HPP_
#define F1THRESH_SEARCH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "f1thresh/metrics.hpp"
#include "f1thresh/optim.hpp"
#include "f1thresh/tagmat.hpp"

namespace f1thresh {

// One value for every class.
ThresholdVector default_thresholds(std::size_t classes, double value);

// Coarse-to-fine stochastic search, one class at a time.
struct DichoConfig {
  std::size_t coarse_grid = 11;  // candidates j / (coarse_grid - 1)
  std::size_t stages = 4;
  std::size_t samples_per_stage = 20;
  double sigma0 = 0.05;
  double shrink = 0.5;
  std::uint64_t seed = 0;
  double init_threshold = 0.5;

  void validate() const;
};

// Stage 0 scans the coarse grid (plus the incumbent) per class in index order,
// other classes held at their current values. Stage s >= 1 draws Gaussian
// proposals around each incumbent with sigma0 * shrink^(s-1), clamped to
// [0, 1]. A move is taken only if it raises F1, or keeps it and lowers the
// threshold. trace has stages + 1 entries.
FitResult dicho_fit(const Dataset& dataset, const DichoConfig& cfg, const MetricSpec& metric);

struct NumGradConfig {
  double delta_t = 0.01;
  std::size_t max_steps = 10;  // probes delta_t, 2 delta_t, ..., max_steps * delta_t
  AdamConfig adam{1e-2};
  std::size_t epochs = 100;
  double init_threshold = 0.5;

  void validate() const;
};

// One-sided F1 difference quotient per class, other classes fixed:
//   g[l] = (F1(t with t_l + k* dt) - F1(t)) / (k* dt)
// k* maximizes the F1 gain over k = 1..max_steps; if no upward probe gains,
// the largest |change| is used; if every upward probe is flat, the same rule
// runs on the downward offsets -dt..-max_steps dt; zero if all are flat.
// Each call is one counting pass over the data, O(n C max_steps).
GradientEvaluation numerical_evaluate(const Dataset& dataset, std::span<const double> t, const NumGradConfig& cfg,
                                      const MetricSpec& metric);
GradientVector numerical_gradient(const Dataset& dataset, const ThresholdVector& t, const NumGradConfig& cfg,
                                  const MetricSpec& metric);
GradientProvider numerical_gradient_provider(const NumGradConfig& cfg, const MetricSpec& metric);

FitResult num_fit(const Dataset& dataset, const NumGradConfig& cfg, const MetricSpec& metric);

enum class OracleMode { kExact1d, kCoordinateExhaustive };

// Work limit for kCoordinateExhaustive: n * C * sum_l |candidates_l| per sweep.
inline constexpr double kOracleWorkLimit = 1e7;

// Sorted candidate thresholds for one score column: 0, midpoints of
// consecutive distinct scores, 1.
std::vector<double> oracle_candidates(std::span<const double> column);

// Exhaustive reference search that shares no code with the fitting kernels.
// kExact1d (C = 1) returns the global optimum over the candidates, lowest
// threshold on ties. kCoordinateExhaustive starts from 0.5 and sweeps classes
// round-robin, moving a class to its best candidate when that strictly raises
// F1, until a sweep makes no move. Throws GuardError past kOracleWorkLimit.
FitResult brute_force_oracle(const Dataset& dataset, const MetricSpec& metric, OracleMode mode);

}  // namespace f1thresh

#endif  // F1THRESH_SEARCH_HPP_
