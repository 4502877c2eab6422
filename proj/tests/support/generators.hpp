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

#ifndef F1THRESH_TESTS_SUPPORT_GENERATORS_HPP_
#define F1THRESH_TESTS_SUPPORT_GENERATORS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "f1thresh/metrics.hpp"
#include "f1thresh/rng.hpp"
#include "f1thresh/tagmat.hpp"

namespace f1thresh::testing {

inline LabelMatrix random_labels(Xoshiro256& rng, std::size_t n, std::size_t c, double prevalence) {
  std::vector<std::uint8_t> v(n * c);
  for (auto& y : v) y = rng.uniform01() < prevalence ? 1 : 0;
  return LabelMatrix(n, c, std::move(v));
}

inline ScoreMatrix random_scores(Xoshiro256& rng, std::size_t n, std::size_t c) {
  std::vector<double> v(n * c);
  for (auto& p : v) p = rng.uniform01();
  return ScoreMatrix(n, c, std::move(v));
}

// Scores drawn from a small grid so ties with thresholds and between rows
// actually occur.
inline ScoreMatrix grid_scores(Xoshiro256& rng, std::size_t n, std::size_t c, std::uint64_t levels) {
  std::vector<double> v(n * c);
  for (auto& p : v) p = static_cast<double>(rng.below(levels + 1)) / static_cast<double>(levels);
  return ScoreMatrix(n, c, std::move(v));
}

inline Dataset random_dataset(Xoshiro256& rng, std::size_t n, std::size_t c, double prevalence) {
  ScoreMatrix s = random_scores(rng, n, c);
  return Dataset(std::move(s), random_labels(rng, n, c, prevalence));
}

inline ThresholdVector random_thresholds(Xoshiro256& rng, std::size_t c, double lo = 0.0, double hi = 1.0) {
  std::vector<double> t(c);
  for (auto& v : t) v = rng.uniform(lo, hi);
  return ThresholdVector(std::move(t));
}

// One class whose negatives lie in [0, g) and positives in [g + gap, 1],
// with g ~ U(0.05, 0.75). Both clusters are non-empty.
inline Dataset separable_single_class(Xoshiro256& rng, double gap = 0.2) {
  const std::size_t n = 40 + rng.below(61);
  const double g = rng.uniform(0.05, 0.75);
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i == 0 ? true : (i == 1 ? false : rng.uniform01() < 0.4);
    labels[i] = positive ? 1 : 0;
    scores[i] = positive ? rng.uniform(g + gap, 1.0) : rng.uniform(0.0, g);
  }
  return Dataset(ScoreMatrix(n, 1, std::move(scores)), LabelMatrix(n, 1, std::move(labels)));
}

// Pooled confusion counted cell by cell, independent of the library's
// counting helpers.
struct PooledCounts {
  std::int64_t tp = 0, fp = 0, fn = 0;
};

inline PooledCounts count_pooled(const LabelMatrix& pred, const LabelMatrix& truth) {
  PooledCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.values()[i] != 0;
    const bool y = truth.values()[i] != 0;
    c.tp += p && y;
    c.fp += p && !y;
    c.fn += !p && y;
  }
  return c;
}

}  // namespace f1thresh::testing

#endif  // F1THRESH_TESTS_SUPPORT_GENERATORS_HPP_
