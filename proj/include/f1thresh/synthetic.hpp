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

#ifndef F1THRESH_SYNTHETIC_HPP_
#define F1THRESH_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "f1thresh/tagmat.hpp"

namespace f1thresh {

// Synthetic tagging scores with class-dependent operating points. Per class l
// (drawn in class order): separation u_l ~ U(0.2, 1), prevalence
// pi_l ~ U(0.05, 0.5). Then per instance, per class: y ~ Bernoulli(pi_l) and
// score ~ N(0.5 +/- 0.4 u_l, noise^2) clipped to [0, 1] (+ for positives).
struct SyntheticConfig {
  std::size_t instances = 15278;
  std::size_t classes = 527;
  std::uint64_t seed = 0;
  double noise = 0.15;
};

struct SyntheticData {
  Dataset dataset;
  std::vector<double> separation;
  std::vector<double> prevalence;
  // Score at which the class posterior crosses 1/2 under the generating
  // model, clamped to [0, 1]. Varies with prevalence and separation.
  std::vector<double> planted_thresholds;
};

SyntheticData generate_synthetic(const SyntheticConfig& cfg);

}  // namespace f1thresh

#endif  // F1THRESH_SYNTHETIC_HPP_
