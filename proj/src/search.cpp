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

#include "f1thresh/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "f1thresh/errors.hpp"
#include "f1thresh/kernels.hpp"
#include "f1thresh/rng.hpp"

namespace f1thresh {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

kernels::DataView view_of(const Dataset& dataset) {
  return {dataset.scores().values(), dataset.labels().values(), dataset.instances(), dataset.classes()};
}

// F1 as a function of one class's tally with the others held fixed.
class CoordinateObjective {
 public:
  CoordinateObjective(std::vector<ClassTally> tallies, const MetricSpec& metric)
      : tallies_(std::move(tallies)), metric_(metric) {
    for (const auto& c : tallies_) totals_ += c.confusion();
  }

  const ClassTally& tally(std::size_t l) const { return tallies_[l]; }
  std::span<const ClassTally> tallies() const { return tallies_; }

  double value() const { return f1_from_tallies(tallies_, metric_); }

  // Orders candidates for class l exactly as global F1 would.
  double key(std::size_t l, const ClassTally& c) const {
    if (metric_.kind == MetricKind::kMacroF1 && metric_.empty != EmptyClassScore::kSkip) {
      return f1_from_confusion(c.confusion(), metric_.empty);
    }
    return with(l, c);
  }

  // Global F1 change when class l's tally is replaced by c.
  double delta(std::size_t l, const ClassTally& c) const {
    if (metric_.kind == MetricKind::kMacroF1 && metric_.empty != EmptyClassScore::kSkip) {
      const double before = f1_from_confusion(tallies_[l].confusion(), metric_.empty);
      return (f1_from_confusion(c.confusion(), metric_.empty) - before) / static_cast<double>(tallies_.size());
    }
    return with(l, c) - with(l, tallies_[l]);
  }

  void set(std::size_t l, const ClassTally& c) {
    totals_.tp += c.confusion().tp - tallies_[l].confusion().tp;
    totals_.fp += c.confusion().fp - tallies_[l].confusion().fp;
    totals_.fn_ += c.confusion().fn_ - tallies_[l].confusion().fn_;
    tallies_[l] = c;
  }

 private:
  double with(std::size_t l, const ClassTally& c) const {
    if (metric_.kind == MetricKind::kMicroF1) {
      ConfusionCounts total = totals_;
      const auto old_c = tallies_[l].confusion();
      const auto new_c = c.confusion();
      total.tp += new_c.tp - old_c.tp;
      total.fp += new_c.fp - old_c.fp;
      total.fn_ += new_c.fn_ - old_c.fn_;
      return f1_from_confusion(total, metric_.empty);
    }
    // Macro with skipped empty classes: the divisor moves with the candidate.
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t j = 0; j < tallies_.size(); ++j) {
      const ConfusionCounts cc = j == l ? c.confusion() : tallies_[j].confusion();
      if (2 * cc.tp + cc.fp + cc.fn_ == 0) continue;
      sum += f1_from_confusion(cc, metric_.empty);
      ++counted;
    }
    return counted == 0 ? 1.0 : sum / static_cast<double>(counted);
  }

  std::vector<ClassTally> tallies_;
  ConfusionCounts totals_;
  MetricSpec metric_;
};

// Tally of candidate k for class l out of a probe-major counting pass.
ClassTally probe_tally(const kernels::ProbeCounts& counts, std::size_t classes, std::size_t k, std::size_t l,
                       std::int64_t truth) {
  return {counts.predicted[k * classes + l], counts.true_positive[k * classes + l], truth};
}

// Evaluates `probes` candidates per class (probe-major), then lets each class,
// in index order, move to its best candidate.
void coordinate_pass(const Dataset& dataset, std::span<const double> candidates, std::size_t probes,
                     std::span<const std::int64_t> truth, std::vector<double>& t, CoordinateObjective& objective) {
  const std::size_t classes = dataset.classes();
  kernels::ProbeCounts counts;
  kernels::active().count_pass(view_of(dataset), kernels::ProbeView{candidates, probes}, counts);
  for (std::size_t l = 0; l < classes; ++l) {
    double best_t = t[l];
    ClassTally best = objective.tally(l);
    double best_key = objective.key(l, best);
    for (std::size_t k = 0; k < probes; ++k) {
      const double cand = candidates[k * classes + l];
      const ClassTally c = probe_tally(counts, classes, k, l, truth[l]);
      const double key = objective.key(l, c);
      if (key > best_key || (key == best_key && cand < best_t)) {
        best_key = key;
        best_t = cand;
        best = c;
      }
    }
    t[l] = best_t;
    objective.set(l, best);
  }
}

}  // namespace

ThresholdVector default_thresholds(std::size_t classes, double value) {
  if (classes == 0) throw std::invalid_argument("default thresholds need at least one class");
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("default threshold must be in [0, 1]");
  return ThresholdVector(classes, value);
}

void DichoConfig::validate() const {
  if (coarse_grid < 2) throw std::invalid_argument("dicho coarse grid needs >= 2 candidates");
  if (stages < 1) throw std::invalid_argument("dicho needs >= 1 refinement stage");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw std::invalid_argument("dicho sigma0 must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("dicho shrink must be in (0, 1)");
  if (!(init_threshold >= 0.0 && init_threshold <= 1.0)) {
    throw std::invalid_argument("initial threshold must be in [0, 1]");
  }
}

FitResult dicho_fit(const Dataset& dataset, const DichoConfig& cfg, const MetricSpec& metric) {
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t classes = dataset.classes();
  const auto truth = dataset.labels().column_sums();

  std::vector<double> t(classes, cfg.init_threshold);
  CoordinateObjective objective(tally_at(dataset, ThresholdVector(t)), metric);
  const double initial = objective.value();
  std::vector<double> trace;
  trace.reserve(cfg.stages + 1);

  // Stage 0: coarse grid, with the incumbent as the last candidate.
  const std::size_t grid = cfg.coarse_grid;
  std::vector<double> candidates((grid + 1) * classes);
  for (std::size_t j = 0; j < grid; ++j) {
    const double v = static_cast<double>(j) / static_cast<double>(grid - 1);
    std::fill_n(candidates.begin() + static_cast<std::ptrdiff_t>(j * classes), classes, v);
  }
  std::copy(t.begin(), t.end(), candidates.begin() + static_cast<std::ptrdiff_t>(grid * classes));
  coordinate_pass(dataset, candidates, grid + 1, truth, t, objective);
  trace.push_back(objective.value());

  Xoshiro256 rng(cfg.seed);
  const std::size_t samples = cfg.samples_per_stage;
  double sigma = cfg.sigma0;
  for (std::size_t stage = 1; stage <= cfg.stages; ++stage) {
    if (samples > 0) {
      candidates.assign(samples * classes, 0.0);
      for (std::size_t l = 0; l < classes; ++l) {
        for (std::size_t k = 0; k < samples; ++k) {
          candidates[k * classes + l] = std::clamp(t[l] + sigma * rng.normal(), 0.0, 1.0);
        }
      }
      coordinate_pass(dataset, candidates, samples, truth, t, objective);
    }
    trace.push_back(objective.value());
    sigma *= cfg.shrink;
  }

  FitResult result{ThresholdVector(t), std::move(trace), initial, 0.0, cfg.stages + 1};
  result.elapsed_seconds = seconds_since(start);
  return result;
}

void NumGradConfig::validate() const {
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) throw std::invalid_argument("delta_t must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  adam.validate();
  if (!(init_threshold >= 0.0 && init_threshold <= 1.0)) {
    throw std::invalid_argument("initial threshold must be in [0, 1]");
  }
}

GradientEvaluation numerical_evaluate(const Dataset& dataset, std::span<const double> t, const NumGradConfig& cfg,
                                      const MetricSpec& metric) {
  cfg.validate();
  const std::size_t classes = dataset.classes();
  if (t.size() != classes) throw DataError("threshold length does not match class count");
  const std::size_t steps = cfg.max_steps;
  const std::size_t probes = 1 + 2 * steps;  // t, t + k dt, t - k dt

  std::vector<double> candidates(probes * classes);
  for (std::size_t l = 0; l < classes; ++l) {
    candidates[l] = t[l];
    for (std::size_t k = 1; k <= steps; ++k) {
      const double offset = static_cast<double>(k) * cfg.delta_t;
      candidates[k * classes + l] = t[l] + offset;
      candidates[(steps + k) * classes + l] = t[l] - offset;
    }
  }
  kernels::ProbeCounts counts;
  kernels::active().count_pass(view_of(dataset), kernels::ProbeView{candidates, probes}, counts);

  const auto truth = dataset.labels().column_sums();
  std::vector<ClassTally> current(classes);
  for (std::size_t l = 0; l < classes; ++l) current[l] = probe_tally(counts, classes, 0, l, truth[l]);
  const CoordinateObjective objective(std::move(current), metric);

  GradientEvaluation result{objective.value(), GradientVector(classes, 0.0)};
  std::vector<double> deltas(steps);
  // Picks the probe to use among one direction; returns false if all flat.
  const auto pick = [&](double& g, double sign) {
    std::size_t best = steps;
    for (std::size_t k = 0; k < steps; ++k) {
      if (deltas[k] > 0.0 && (best == steps || deltas[k] > deltas[best])) best = k;
    }
    if (best == steps) {
      for (std::size_t k = 0; k < steps; ++k) {
        if (deltas[k] != 0.0 && (best == steps || std::abs(deltas[k]) > std::abs(deltas[best]))) best = k;
      }
    }
    if (best == steps) return false;
    g = deltas[best] / (sign * static_cast<double>(best + 1) * cfg.delta_t);
    return true;
  };

  for (std::size_t l = 0; l < classes; ++l) {
    for (std::size_t k = 0; k < steps; ++k) {
      deltas[k] = objective.delta(l, probe_tally(counts, classes, 1 + k, l, truth[l]));
    }
    if (pick(result.gradient[l], 1.0)) continue;
    for (std::size_t k = 0; k < steps; ++k) {
      deltas[k] = objective.delta(l, probe_tally(counts, classes, 1 + steps + k, l, truth[l]));
    }
    if (!pick(result.gradient[l], -1.0)) result.gradient[l] = 0.0;
  }
  return result;
}

GradientVector numerical_gradient(const Dataset& dataset, const ThresholdVector& t, const NumGradConfig& cfg,
                                  const MetricSpec& metric) {
  return numerical_evaluate(dataset, t.values(), cfg, metric).gradient;
}

GradientProvider numerical_gradient_provider(const NumGradConfig& cfg, const MetricSpec& metric) {
  return [cfg, metric](const Dataset& dataset, std::span<const double> t) {
    return numerical_evaluate(dataset, t, cfg, metric);
  };
}

FitResult num_fit(const Dataset& dataset, const NumGradConfig& cfg, const MetricSpec& metric) {
  cfg.validate();
  FitConfig fit_cfg;
  fit_cfg.epochs = cfg.epochs;
  fit_cfg.init_threshold = cfg.init_threshold;
  fit_cfg.adam = cfg.adam;
  fit_cfg.metric = metric;
  return fit(dataset, fit_cfg, numerical_gradient_provider(cfg, metric));
}

std::vector<double> oracle_candidates(std::span<const double> column) {
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> candidates;
  candidates.reserve(sorted.size() + 1);
  candidates.push_back(0.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  candidates.push_back(1.0);
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  return candidates;
}

FitResult brute_force_oracle(const Dataset& dataset, const MetricSpec& metric, OracleMode mode) {
  const auto start = Clock::now();
  const std::size_t n = dataset.instances();
  const std::size_t classes = dataset.classes();
  const ScoreMatrix& scores = dataset.scores();
  const LabelMatrix& truth = dataset.labels();

  std::vector<std::vector<double>> candidates(classes);
  double total_candidates = 0.0;
  for (std::size_t l = 0; l < classes; ++l) {
    std::vector<double> column(n);
    for (std::size_t r = 0; r < n; ++r) column[r] = scores(r, l);
    candidates[l] = oracle_candidates(column);
    total_candidates += static_cast<double>(candidates[l].size());
  }

  // Global F1 by explicit binarization; deliberately the slow path.
  const auto f1_at = [&](const std::vector<double>& t) {
    return f1_score(binarize(scores, ThresholdVector(t)), truth, metric);
  };

  if (mode == OracleMode::kExact1d) {
    if (classes != 1) throw std::invalid_argument("exact_1d oracle requires a single class");
    double best_t = candidates[0].front();
    double best_f1 = -1.0;
    for (const double c : candidates[0]) {
      const double f1 = f1_at({c});
      if (f1 > best_f1) {
        best_f1 = f1;
        best_t = c;
      }
    }
    FitResult result{ThresholdVector({best_t}), {best_f1}, f1_at({0.5}), 0.0, 1};
    result.elapsed_seconds = seconds_since(start);
    return result;
  }

  const double work = static_cast<double>(n) * static_cast<double>(classes) * total_candidates;
  if (work > kOracleWorkLimit) {
    throw GuardError("coordinate-exhaustive oracle needs " + std::to_string(work) +
                     " cell evaluations per sweep, limit " + std::to_string(kOracleWorkLimit));
  }
  std::vector<double> t(classes, 0.5);
  double current = f1_at(t);
  FitResult result{ThresholdVector(t), {}, current, 0.0, 0};
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t l = 0; l < classes; ++l) {
      const double keep = t[l];
      double best_t = keep;
      double best_f1 = current;
      for (const double c : candidates[l]) {
        t[l] = c;
        const double f1 = f1_at(t);
        if (f1 > best_f1) {
          best_f1 = f1;
          best_t = c;
        }
      }
      t[l] = best_t;
      if (best_t != keep) {
        current = best_f1;
        moved = true;
      }
    }
    result.trace.push_back(current);
    ++result.epochs_run;
  }
  result.thresholds = ThresholdVector(t);
  result.elapsed_seconds = seconds_since(start);
  return result;
}

}  // namespace f1thresh
