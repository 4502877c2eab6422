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

#include "f1thresh/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "f1thresh/rng.hpp"

namespace f1thresh {

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.instances == 0 || cfg.classes == 0) throw std::invalid_argument("synthetic data needs n, C >= 1");
  if (!(cfg.noise > 0.0)) throw std::invalid_argument("synthetic noise must be positive");
  const std::size_t n = cfg.instances;
  const std::size_t c = cfg.classes;
  Xoshiro256 rng(cfg.seed);

  std::vector<double> separation(c);
  std::vector<double> prevalence(c);
  std::vector<double> planted(c);
  for (std::size_t l = 0; l < c; ++l) {
    separation[l] = rng.uniform(0.2, 1.0);
    prevalence[l] = rng.uniform(0.05, 0.5);
    // Equal-variance Gaussians: pi N(m1) = (1 - pi) N(m0) at
    // s = (m0 + m1)/2 + noise^2 ln((1 - pi)/pi) / (m1 - m0).
    const double gap = 0.8 * separation[l];
    const double s = 0.5 + cfg.noise * cfg.noise * std::log((1.0 - prevalence[l]) / prevalence[l]) / gap;
    planted[l] = std::clamp(s, 0.0, 1.0);
  }

  std::vector<double> scores(n * c);
  std::vector<std::uint8_t> labels(n * c);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t l = 0; l < c; ++l) {
      const bool positive = rng.uniform01() < prevalence[l];
      const double mean = positive ? 0.5 + 0.4 * separation[l] : 0.5 - 0.4 * separation[l];
      scores[r * c + l] = std::clamp(mean + cfg.noise * rng.normal(), 0.0, 1.0);
      labels[r * c + l] = positive ? 1 : 0;
    }
  }
  return SyntheticData{Dataset(ScoreMatrix(n, c, std::move(scores)), LabelMatrix(n, c, std::move(labels))),
                       std::move(separation), std::move(prevalence), std::move(planted)};
}

}  // namespace f1thresh
