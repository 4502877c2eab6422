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

#ifndef F1THRESH_METRICS_HPP_
#define F1THRESH_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "f1thresh/tagmat.hpp"

namespace f1thresh {

enum class MetricKind { kMicroF1, kMacroF1 };

// Score given to an F1 whose numerator and denominator are both zero, i.e. a
// scope with no positives in the truth and none predicted. kSkip removes such
// classes from the macro average; for micro-F1 it behaves like kOne.
enum class EmptyClassScore { kOne, kZero, kSkip };

struct MetricSpec {
  MetricKind kind = MetricKind::kMicroF1;
  EmptyClassScore empty = EmptyClassScore::kOne;
};

std::string_view to_string(MetricKind kind);       // "micro-f1" / "macro-f1"
std::string_view to_string(EmptyClassScore empty);  // "one" / "zero" / "skip"
MetricKind parse_metric_kind(std::string_view name);
EmptyClassScore parse_empty_class_score(std::string_view name);

// Counts for one class, or pooled over all classes.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn_ = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn_ += o.fn_;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// What the counting kernels produce per class: predicted positives, true
// positives and truth positives. Converts to ConfusionCounts on demand.
struct ClassTally {
  std::int64_t predicted = 0;
  std::int64_t true_positive = 0;
  std::int64_t truth = 0;

  ConfusionCounts confusion() const {
    return {true_positive, predicted - true_positive, truth - true_positive};
  }
};

// ŷ = 1 iff score >= threshold. Equality counts as active.
LabelMatrix binarize(const ScoreMatrix& scores, const ThresholdVector& t);

std::vector<ConfusionCounts> class_confusion(const LabelMatrix& pred, const LabelMatrix& truth);
ConfusionCounts pooled_confusion(const LabelMatrix& pred, const LabelMatrix& truth);

// F1 of one scope from its counts, 2TP / (2TP + FP + FN).
double f1_from_confusion(const ConfusionCounts& c, EmptyClassScore empty = EmptyClassScore::kOne);

double micro_f1(const LabelMatrix& pred, const LabelMatrix& truth,
                EmptyClassScore empty = EmptyClassScore::kOne);
double macro_f1(const LabelMatrix& pred, const LabelMatrix& truth,
                EmptyClassScore empty = EmptyClassScore::kOne);
double f1_score(const LabelMatrix& pred, const LabelMatrix& truth, const MetricSpec& metric);

struct PrecisionRecall {
  double precision;
  double recall;
};

// Pooled precision and recall; each is 1.0 when its denominator is zero.
PrecisionRecall micro_precision_recall(const LabelMatrix& pred, const LabelMatrix& truth);
PrecisionRecall precision_recall_from_confusion(const ConfusionCounts& c);

// Objective from per-class tallies. All fitting code goes through this, so
// the value reported while fitting and the value reported by evaluation agree
// bit for bit.
double f1_from_tallies(std::span<const ClassTally> tallies, const MetricSpec& metric);

// Per-class tallies at thresholds t, computed with the active counting kernel.
std::vector<ClassTally> tally_at(const Dataset& dataset, const ThresholdVector& t);

struct Evaluation {
  double objective;  // F1 under the requested metric
  double micro_f1;
  double macro_f1;
  double precision;  // pooled
  double recall;     // pooled
};

Evaluation evaluate_thresholds(const Dataset& dataset, const ThresholdVector& t, const MetricSpec& metric);

}  // namespace f1thresh

#endif  // F1THRESH_METRICS_HPP_
