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

// Reference kernels. Plain loops, no intrinsics; these define the results the
// vector variants are tested against.

#include <cmath>

#include "f1thresh/kernels.hpp"

namespace f1thresh::kernels {

void SurrogateSums::resize(std::size_t classes) {
  predicted.assign(classes, 0);
  true_positive.assign(classes, 0);
  slope_sum_pos.assign(classes, 0.0);
  slope_sum_neg.assign(classes, 0.0);
}

void ProbeCounts::resize(std::size_t probes, std::size_t classes) {
  predicted.assign(probes * classes, 0);
  true_positive.assign(probes * classes, 0);
}

namespace scalar {

double surrogate_factor(double x, double slope) {
  const double e = std::exp(-slope * std::abs(x));
  const double s = 1.0 / (1.0 + e);
  return slope * s * (e * s);
}

void surrogate_pass(const DataView& data, std::span<const double> thresholds, double slope, SurrogateSums& out) {
  const std::size_t cols = data.cols;
  out.resize(cols);
  for (std::size_t r = 0; r < data.rows; ++r) {
    const double* p = data.scores.data() + r * cols;
    const std::uint8_t* y = data.labels.data() + r * cols;
    for (std::size_t l = 0; l < cols; ++l) {
      const bool active = p[l] >= thresholds[l];
      out.predicted[l] += active;
      out.true_positive[l] += active & (y[l] != 0);
      const double d = surrogate_factor(p[l] - thresholds[l], slope);
      if (y[l]) {
        out.slope_sum_pos[l] += d;
      } else {
        out.slope_sum_neg[l] += d;
      }
    }
  }
}

void count_pass(const DataView& data, const ProbeView& probes, ProbeCounts& out) {
  const std::size_t cols = data.cols;
  out.resize(probes.probes, cols);
  for (std::size_t r = 0; r < data.rows; ++r) {
    const double* p = data.scores.data() + r * cols;
    const std::uint8_t* y = data.labels.data() + r * cols;
    for (std::size_t k = 0; k < probes.probes; ++k) {
      const double* t = probes.candidates.data() + k * cols;
      std::int64_t* pred = out.predicted.data() + k * cols;
      std::int64_t* tp = out.true_positive.data() + k * cols;
      for (std::size_t l = 0; l < cols; ++l) {
        const bool active = p[l] >= t[l];
        pred[l] += active;
        tp[l] += active & (y[l] != 0);
      }
    }
  }
}

}  // namespace scalar
}  // namespace f1thresh::kernels
