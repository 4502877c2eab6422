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

#include "f1thresh/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "f1thresh/errors.hpp"
#include "f1thresh/kernels.hpp"
#include "f1thresh/rng.hpp"

namespace f1thresh {

namespace {

void require_same_shape(std::size_t r1, std::size_t c1, std::size_t r2, std::size_t c2) {
  if (r1 != r2 || c1 != c2) {
    throw DataError("dimension mismatch: " + std::to_string(r1) + "x" + std::to_string(c1) + " vs " +
                    std::to_string(r2) + "x" + std::to_string(c2));
  }
}

void require_thresholds(std::size_t cols, std::size_t n_thresholds) {
  if (cols != n_thresholds) {
    throw DataError("dimension mismatch: " + std::to_string(cols) + " classes, " + std::to_string(n_thresholds) +
                    " thresholds");
  }
}

double empty_value(EmptyClassScore empty) { return empty == EmptyClassScore::kZero ? 0.0 : 1.0; }

// Sums that define F1 for real-valued predictions.
struct RatioSums {
  std::vector<double> overlap;  // T_l = sum_n y ŷ
  std::vector<double> mass;     // S_l = sum_n y + sum_n ŷ
};

RatioSums ratio_sums(const RealMatrix& pred, const LabelMatrix& truth) {
  require_same_shape(pred.rows(), pred.cols(), truth.rows(), truth.cols());
  RatioSums sums{std::vector<double>(pred.cols(), 0.0), std::vector<double>(pred.cols(), 0.0)};
  for (std::size_t r = 0; r < pred.rows(); ++r) {
    const auto yh = pred.row(r);
    const auto y = truth.row(r);
    for (std::size_t l = 0; l < pred.cols(); ++l) {
      sums.overlap[l] += y[l] * yh[l];
      sums.mass[l] += y[l] + yh[l];
    }
  }
  return sums;
}

std::size_t averaged_classes(std::span<const double> mass, EmptyClassScore empty) {
  if (empty != EmptyClassScore::kSkip) return mass.size();
  return static_cast<std::size_t>(std::count_if(mass.begin(), mass.end(), [](double s) { return s != 0.0; }));
}

RealMatrix relaxed_predictions(const ScoreMatrix& scores, std::span<const double> t, Slope a) {
  require_thresholds(scores.cols(), t.size());
  RealMatrix yh(scores.rows(), scores.cols());
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const auto p = scores.row(r);
    for (std::size_t l = 0; l < scores.cols(); ++l) yh.at(r, l) = sigmoid(p[l] - t[l], a);
  }
  return yh;
}

// g[l] = sum_n G[n][l] * (-1) * sig_a'(p - t), rows in ascending order.
GradientVector chain_through_thresholds(const RealMatrix& dfdy, const ScoreMatrix& scores,
                                        std::span<const double> t, Slope a) {
  GradientVector g(scores.cols(), 0.0);
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const auto p = scores.row(r);
    for (std::size_t l = 0; l < scores.cols(); ++l) {
      g[l] += dfdy(r, l) * -surrogate_derivative(p[l] - t[l], a);
    }
  }
  return g;
}

}  // namespace

Slope::Slope(double a) : a_(a) {
  if (!std::isfinite(a) || a <= 0.0) throw std::invalid_argument("sigmoid slope must be finite and positive");
}

double sigmoid(double x, Slope a) {
  const double z = a.value() * x;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double surrogate_derivative(double x, Slope a) { return kernels::scalar::surrogate_factor(x, a.value()); }

double f1_of_real(const RealMatrix& pred, const LabelMatrix& truth, const MetricSpec& metric) {
  const RatioSums sums = ratio_sums(pred, truth);
  if (metric.kind == MetricKind::kMicroF1) {
    double t = 0.0;
    double s = 0.0;
    for (std::size_t l = 0; l < sums.mass.size(); ++l) {
      t += sums.overlap[l];
      s += sums.mass[l];
    }
    return s == 0.0 ? empty_value(metric.empty) : 2.0 * t / s;
  }
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t l = 0; l < sums.mass.size(); ++l) {
    if (sums.mass[l] == 0.0) {
      if (metric.empty == EmptyClassScore::kSkip) continue;
      total += empty_value(metric.empty);
    } else {
      total += 2.0 * sums.overlap[l] / sums.mass[l];
    }
    ++counted;
  }
  return counted == 0 ? 1.0 : total / static_cast<double>(counted);
}

RealMatrix f1_grad_wrt_pred(const RealMatrix& pred, const LabelMatrix& truth, const MetricSpec& metric) {
  const RatioSums sums = ratio_sums(pred, truth);
  const std::size_t cols = pred.cols();
  RealMatrix grad(pred.rows(), cols);

  // Per class: value of the derivative where y = 1 and where y = 0.
  std::vector<double> where_pos(cols, 0.0);
  std::vector<double> where_neg(cols, 0.0);
  if (metric.kind == MetricKind::kMicroF1) {
    double t = 0.0;
    double s = 0.0;
    for (std::size_t l = 0; l < cols; ++l) {
      t += sums.overlap[l];
      s += sums.mass[l];
    }
    if (s == 0.0) throw DegenerateError("micro-F1 gradient undefined: no positives in truth or predictions");
    std::fill(where_pos.begin(), where_pos.end(), 2.0 * (s - t) / (s * s));
    std::fill(where_neg.begin(), where_neg.end(), 2.0 * -t / (s * s));
  } else {
    const std::size_t averaged = averaged_classes(sums.mass, metric.empty);
    for (std::size_t l = 0; l < cols; ++l) {
      const double s = sums.mass[l];
      if (s == 0.0) continue;
      const double t = sums.overlap[l];
      where_pos[l] = 2.0 * (s - t) / (s * s) / static_cast<double>(averaged);
      where_neg[l] = 2.0 * -t / (s * s) / static_cast<double>(averaged);
    }
  }
  for (std::size_t r = 0; r < pred.rows(); ++r) {
    const auto y = truth.row(r);
    for (std::size_t l = 0; l < cols; ++l) grad.at(r, l) = y[l] ? where_pos[l] : where_neg[l];
  }
  return grad;
}

SurrogateEvaluation sgl_evaluate(const Dataset& dataset, std::span<const double> t, Slope a,
                                 const MetricSpec& metric) {
  const std::size_t cols = dataset.classes();
  require_thresholds(cols, t.size());
  const kernels::DataView view{dataset.scores().values(), dataset.labels().values(), dataset.instances(), cols};
  kernels::SurrogateSums sums;
  kernels::active().surrogate_pass(view, t, a.value(), sums);

  const auto truth = dataset.labels().column_sums();
  std::vector<ClassTally> tallies(cols);
  for (std::size_t l = 0; l < cols; ++l) tallies[l] = {sums.predicted[l], sums.true_positive[l], truth[l]};

  SurrogateEvaluation result{f1_from_tallies(tallies, metric), GradientVector(cols, 0.0)};
  if (metric.kind == MetricKind::kMicroF1) {
    std::int64_t t_sum = 0;
    std::int64_t s_sum = 0;
    for (std::size_t l = 0; l < cols; ++l) {
      t_sum += tallies[l].true_positive;
      s_sum += tallies[l].truth + tallies[l].predicted;
    }
    if (s_sum == 0) throw DegenerateError("micro-F1 gradient undefined: no positives in truth or predictions");
    const double s = static_cast<double>(s_sum);
    const double tt = static_cast<double>(t_sum);
    const double where_pos = 2.0 * (s - tt) / (s * s);
    const double where_neg = 2.0 * -tt / (s * s);
    for (std::size_t l = 0; l < cols; ++l) {
      result.gradient[l] = -(where_pos * sums.slope_sum_pos[l] + where_neg * sums.slope_sum_neg[l]);
    }
    return result;
  }

  std::size_t averaged = cols;
  if (metric.empty == EmptyClassScore::kSkip) {
    averaged = 0;
    for (const auto& c : tallies) averaged += (c.truth + c.predicted) != 0;
  }
  for (std::size_t l = 0; l < cols; ++l) {
    const std::int64_t s_l = tallies[l].truth + tallies[l].predicted;
    if (s_l == 0) continue;
    const double s = static_cast<double>(s_l);
    const double tt = static_cast<double>(tallies[l].true_positive);
    const double where_pos = 2.0 * (s - tt) / (s * s) / static_cast<double>(averaged);
    const double where_neg = 2.0 * -tt / (s * s) / static_cast<double>(averaged);
    result.gradient[l] = -(where_pos * sums.slope_sum_pos[l] + where_neg * sums.slope_sum_neg[l]);
  }
  return result;
}

GradientVector sgl_threshold_grad(const ScoreMatrix& scores, const ThresholdVector& t, const LabelMatrix& truth,
                                  Slope a, const MetricSpec& metric) {
  const Dataset dataset(scores, truth);
  return sgl_evaluate(dataset, t.values(), a, metric).gradient;
}

GradientVector sgl_threshold_grad_dense(const ScoreMatrix& scores, std::span<const double> t,
                                        const LabelMatrix& truth, Slope a, const MetricSpec& metric) {
  require_same_shape(scores.rows(), scores.cols(), truth.rows(), truth.cols());
  require_thresholds(scores.cols(), t.size());
  RealMatrix yh(scores.rows(), scores.cols());
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const auto p = scores.row(r);
    for (std::size_t l = 0; l < scores.cols(); ++l) yh.at(r, l) = p[l] >= t[l] ? 1.0 : 0.0;
  }
  return chain_through_thresholds(f1_grad_wrt_pred(yh, truth, metric), scores, t, a);
}

double relaxed_f1(const ScoreMatrix& scores, std::span<const double> t, const LabelMatrix& truth, Slope a,
                  const MetricSpec& metric) {
  return f1_of_real(relaxed_predictions(scores, t, a), truth, metric);
}

GradientVector relaxed_f1_grad(const ScoreMatrix& scores, std::span<const double> t, const LabelMatrix& truth,
                               Slope a, const MetricSpec& metric) {
  const RealMatrix yh = relaxed_predictions(scores, t, a);
  return chain_through_thresholds(f1_grad_wrt_pred(yh, truth, metric), scores, t, a);
}

GradientVector finite_diff_grad(const Objective& objective, std::span<const double> t, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("finite-difference step must be positive");
  std::vector<double> point(t.begin(), t.end());
  GradientVector g(t.size());
  for (std::size_t l = 0; l < t.size(); ++l) {
    point[l] = t[l] + h;
    const double up = objective(point);
    point[l] = t[l] - h;
    const double down = objective(point);
    point[l] = t[l];
    g[l] = (up - down) / (2.0 * h);
  }
  return g;
}

GradcheckReport run_gradcheck(const GradcheckConfig& config) {
  if (config.max_instances == 0 || config.max_classes == 0) {
    throw std::invalid_argument("gradcheck needs max_instances and max_classes >= 1");
  }
  if (config.slopes.empty()) throw std::invalid_argument("gradcheck needs at least one slope");
  Xoshiro256 rng(config.seed);
  GradcheckReport report;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const std::size_t n = 1 + rng.below(config.max_instances);
    const std::size_t c = 1 + rng.below(config.max_classes);
    const double prevalence = rng.uniform(0.1, 0.9);
    std::vector<double> p(n * c);
    std::vector<std::uint8_t> y(n * c);
    for (std::size_t i = 0; i < n * c; ++i) {
      y[i] = rng.uniform01() < prevalence ? 1 : 0;
      p[i] = rng.uniform01();
    }
    std::vector<double> t(c);
    for (auto& v : t) v = rng.uniform(0.05, 0.95);
    const ScoreMatrix scores(n, c, std::move(p));
    const LabelMatrix truth(n, c, std::move(y));
    const Slope a(config.slopes[trial % config.slopes.size()]);

    for (const MetricKind kind : {MetricKind::kMicroF1, MetricKind::kMacroF1}) {
      const MetricSpec metric{kind, EmptyClassScore::kOne};
      const GradientVector analytic = relaxed_f1_grad(scores, t, truth, a, metric);
      const GradientVector numeric = finite_diff_grad(
          [&](std::span<const double> point) { return relaxed_f1(scores, point, truth, a, metric); }, t,
          config.step);
      for (std::size_t l = 0; l < c; ++l) {
        const double err = std::abs(analytic[l] - numeric[l]);
        const double rel = err / std::max(std::abs(analytic[l]), config.small_gradient);
        ++report.coordinates;
        if (!(rel <= config.relative_tolerance)) ++report.failures;
        if (rel > report.worst_relative_error || std::isnan(rel)) {
          report.worst_relative_error = rel;
          report.worst_trial = trial;
          report.worst_class = l;
          report.worst_analytic = analytic[l];
          report.worst_numeric = numeric[l];
        }
      }
    }
    ++report.trials;
  }
  return report;
}

}  // namespace f1thresh
