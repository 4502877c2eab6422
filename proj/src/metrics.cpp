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

#include "f1thresh/metrics.hpp"

#include <stdexcept>
#include <string>

#include "f1thresh/errors.hpp"
#include "f1thresh/kernels.hpp"

namespace f1thresh {

namespace {

void require_same_shape(const LabelMatrix& pred, const LabelMatrix& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw DataError("dimension mismatch: pred " + std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()) +
                    ", truth " + std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
  }
}

double empty_value(EmptyClassScore empty) { return empty == EmptyClassScore::kZero ? 0.0 : 1.0; }

}  // namespace

std::string_view to_string(MetricKind kind) {
  return kind == MetricKind::kMicroF1 ? "micro-f1" : "macro-f1";
}

std::string_view to_string(EmptyClassScore empty) {
  switch (empty) {
    case EmptyClassScore::kOne:
      return "one";
    case EmptyClassScore::kZero:
      return "zero";
    case EmptyClassScore::kSkip:
      return "skip";
  }
  return "one";
}

MetricKind parse_metric_kind(std::string_view name) {
  if (name == "micro-f1" || name == "micro") return MetricKind::kMicroF1;
  if (name == "macro-f1" || name == "macro") return MetricKind::kMacroF1;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

EmptyClassScore parse_empty_class_score(std::string_view name) {
  if (name == "one") return EmptyClassScore::kOne;
  if (name == "zero") return EmptyClassScore::kZero;
  if (name == "skip") return EmptyClassScore::kSkip;
  throw std::invalid_argument("unknown empty-class score '" + std::string(name) + "'");
}

LabelMatrix binarize(const ScoreMatrix& scores, const ThresholdVector& t) {
  if (scores.cols() != t.size()) {
    throw DataError("dimension mismatch: " + std::to_string(scores.cols()) + " score columns, " +
                    std::to_string(t.size()) + " thresholds");
  }
  std::vector<std::uint8_t> out(scores.size());
  const std::size_t cols = scores.cols();
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const auto p = scores.row(r);
    for (std::size_t l = 0; l < cols; ++l) out[r * cols + l] = p[l] >= t[l] ? 1 : 0;
  }
  return LabelMatrix(scores.rows(), cols, std::move(out));
}

std::vector<ConfusionCounts> class_confusion(const LabelMatrix& pred, const LabelMatrix& truth) {
  require_same_shape(pred, truth);
  std::vector<ConfusionCounts> counts(pred.cols());
  for (std::size_t r = 0; r < pred.rows(); ++r) {
    const auto yh = pred.row(r);
    const auto y = truth.row(r);
    for (std::size_t l = 0; l < pred.cols(); ++l) {
      counts[l].tp += yh[l] & y[l];
      counts[l].fp += yh[l] & (y[l] ^ 1);
      counts[l].fn_ += (yh[l] ^ 1) & y[l];
    }
  }
  return counts;
}

ConfusionCounts pooled_confusion(const LabelMatrix& pred, const LabelMatrix& truth) {
  ConfusionCounts total;
  for (const auto& c : class_confusion(pred, truth)) total += c;
  return total;
}

double f1_from_confusion(const ConfusionCounts& c, EmptyClassScore empty) {
  const std::int64_t denom = 2 * c.tp + c.fp + c.fn_;
  if (denom == 0) return empty_value(empty);
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

namespace {

double macro_from_confusions(std::span<const ConfusionCounts> per_class, EmptyClassScore empty) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& c : per_class) {
    if (empty == EmptyClassScore::kSkip && 2 * c.tp + c.fp + c.fn_ == 0) continue;
    sum += f1_from_confusion(c, empty);
    ++counted;
  }
  if (counted == 0) return 1.0;
  return sum / static_cast<double>(counted);
}

}  // namespace

double micro_f1(const LabelMatrix& pred, const LabelMatrix& truth, EmptyClassScore empty) {
  return f1_from_confusion(pooled_confusion(pred, truth), empty);
}

double macro_f1(const LabelMatrix& pred, const LabelMatrix& truth, EmptyClassScore empty) {
  const auto per_class = class_confusion(pred, truth);
  return macro_from_confusions(per_class, empty);
}

double f1_score(const LabelMatrix& pred, const LabelMatrix& truth, const MetricSpec& metric) {
  return metric.kind == MetricKind::kMicroF1 ? micro_f1(pred, truth, metric.empty)
                                             : macro_f1(pred, truth, metric.empty);
}

PrecisionRecall precision_recall_from_confusion(const ConfusionCounts& c) {
  const std::int64_t pp = c.tp + c.fp;
  const std::int64_t ap = c.tp + c.fn_;
  return {pp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(pp),
          ap == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(ap)};
}

PrecisionRecall micro_precision_recall(const LabelMatrix& pred, const LabelMatrix& truth) {
  return precision_recall_from_confusion(pooled_confusion(pred, truth));
}

double f1_from_tallies(std::span<const ClassTally> tallies, const MetricSpec& metric) {
  if (metric.kind == MetricKind::kMicroF1) {
    ConfusionCounts total;
    for (const auto& t : tallies) total += t.confusion();
    return f1_from_confusion(total, metric.empty);
  }
  std::vector<ConfusionCounts> per_class;
  per_class.reserve(tallies.size());
  for (const auto& t : tallies) per_class.push_back(t.confusion());
  return macro_from_confusions(per_class, metric.empty);
}

std::vector<ClassTally> tally_at(const Dataset& dataset, const ThresholdVector& t) {
  if (t.size() != dataset.classes()) {
    throw DataError("threshold length " + std::to_string(t.size()) + " does not match " +
                    std::to_string(dataset.classes()) + " classes");
  }
  const kernels::DataView view{dataset.scores().values(), dataset.labels().values(), dataset.instances(),
                               dataset.classes()};
  kernels::ProbeCounts counts;
  kernels::active().count_pass(view, kernels::ProbeView{t.values(), 1}, counts);
  const auto truth = dataset.labels().column_sums();
  std::vector<ClassTally> tallies(dataset.classes());
  for (std::size_t l = 0; l < tallies.size(); ++l) {
    tallies[l] = {counts.predicted[l], counts.true_positive[l], truth[l]};
  }
  return tallies;
}

Evaluation evaluate_thresholds(const Dataset& dataset, const ThresholdVector& t, const MetricSpec& metric) {
  const auto tallies = tally_at(dataset, t);
  ConfusionCounts pooled;
  for (const auto& c : tallies) pooled += c.confusion();
  const auto pr = precision_recall_from_confusion(pooled);
  const double micro = f1_from_tallies(tallies, {MetricKind::kMicroF1, metric.empty});
  const double macro = f1_from_tallies(tallies, {MetricKind::kMacroF1, metric.empty});
  return {metric.kind == MetricKind::kMicroF1 ? micro : macro, micro, macro, pr.precision, pr.recall};
}

}  // namespace f1thresh
