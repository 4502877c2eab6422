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

#include <cmath>
#include <stdexcept>
#include <string>

#include "f1thresh/cli.hpp"
#include "f1thresh/errors.hpp"
#include "f1thresh/kernels.hpp"
#include "f1thresh/rng.hpp"

namespace f1thresh::cli {

using json = nlohmann::ordered_json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kDefault:
      return "def";
    case Method::kDicho:
      return "dicho";
    case Method::kNumerical:
      return "num";
    case Method::kSurrogate:
      return "sgl";
  }
  return "sgl";
}

Method parse_method(std::string_view name) {
  if (name == "def") return Method::kDefault;
  if (name == "dicho") return Method::kDicho;
  if (name == "num") return Method::kNumerical;
  if (name == "sgl") return Method::kSurrogate;
  throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected def, dicho, num or sgl)");
}

double MethodOptions::resolved_lr() const {
  if (lr) return *lr;
  return method == Method::kNumerical ? 1e-2 : 1e-3;
}

json MethodOptions::to_json() const {
  json j;
  j["method"] = to_string(method);
  j["metric"] = f1thresh::to_string(metric.kind);
  j["empty_class_score"] = f1thresh::to_string(metric.empty);
  j["init_threshold"] = init_threshold;
  switch (method) {
    case Method::kDefault:
      break;
    case Method::kSurrogate:
      j["epochs"] = epochs;
      j["lr"] = resolved_lr();
      j["slope"] = slope;
      j["adam"] = {{"beta1", AdamConfig{}.beta1}, {"beta2", AdamConfig{}.beta2}, {"eps", AdamConfig{}.eps}};
      break;
    case Method::kNumerical:
      j["epochs"] = epochs;
      j["lr"] = resolved_lr();
      j["delta_t"] = delta_t;
      j["max_steps"] = max_steps;
      j["adam"] = {{"beta1", AdamConfig{}.beta1}, {"beta2", AdamConfig{}.beta2}, {"eps", AdamConfig{}.eps}};
      break;
    case Method::kDicho:
      j["dicho"] = {{"coarse_grid", dicho.coarse_grid},
                    {"stages", dicho.stages},
                    {"samples_per_stage", dicho.samples_per_stage},
                    {"sigma0", dicho.sigma0},
                    {"shrink", dicho.shrink}};
      break;
  }
  j["seed"] = seed;
  j["rng"] = Xoshiro256::kName;
  j["kernels"] = kernels::to_string(kernels::active().isa);
  return j;
}

FitResult fit_method(const Dataset& dataset, const MethodOptions& options) {
  switch (options.method) {
    case Method::kDefault: {
      ThresholdVector t = default_thresholds(dataset.classes(), options.init_threshold);
      const double f1 = f1_from_tallies(tally_at(dataset, t), options.metric);
      return FitResult{std::move(t), {}, f1, 0.0, 0};
    }
    case Method::kDicho: {
      DichoConfig cfg = options.dicho;
      cfg.seed = options.seed;
      cfg.init_threshold = options.init_threshold;
      return dicho_fit(dataset, cfg, options.metric);
    }
    case Method::kNumerical: {
      NumGradConfig cfg;
      cfg.delta_t = options.delta_t;
      cfg.max_steps = options.max_steps;
      cfg.adam.lr = options.resolved_lr();
      cfg.epochs = options.epochs;
      cfg.init_threshold = options.init_threshold;
      return num_fit(dataset, cfg, options.metric);
    }
    case Method::kSurrogate: {
      FitConfig cfg;
      cfg.epochs = options.epochs;
      cfg.init_threshold = options.init_threshold;
      cfg.adam.lr = options.resolved_lr();
      cfg.slope = options.slope;
      cfg.metric = options.metric;
      cfg.seed = options.seed;
      return fit_sgl(dataset, cfg);
    }
  }
  throw std::invalid_argument("unknown method");
}

FoldSummary summarize_folds(const std::vector<FoldReport>& folds) {
  FoldSummary s;
  if (folds.empty()) return s;
  const double k = static_cast<double>(folds.size());
  for (const auto& f : folds) {
    s.mean_f1_val += f.f1_val;
    s.mean_f1_eval += f.f1_eval;
  }
  s.mean_f1_val /= k;
  s.mean_f1_eval /= k;
  for (const auto& f : folds) {
    s.std_f1_val += (f.f1_val - s.mean_f1_val) * (f.f1_val - s.mean_f1_val);
    s.std_f1_eval += (f.f1_eval - s.mean_f1_eval) * (f.f1_eval - s.mean_f1_eval);
  }
  s.std_f1_val = std::sqrt(s.std_f1_val / k);
  s.std_f1_eval = std::sqrt(s.std_f1_eval / k);
  return s;
}

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

template <typename T>
T get_required(const json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("report is missing '") + key + "'");
  return j[key].get<T>();
}

}  // namespace

json report_to_json(const RunReport& r) {
  json j;
  j["report_version"] = RunReport::kVersion;
  j["command"] = r.command;
  if (!r.method.empty()) j["method"] = r.method;
  j["metric"] = r.metric;
  put_optional(j, "f1_val", r.f1_val);
  put_optional(j, "f1_eval", r.f1_eval);
  put_optional(j, "micro_f1_eval", r.micro_f1_eval);
  put_optional(j, "macro_f1_eval", r.macro_f1_eval);
  put_optional(j, "precision_eval", r.precision_eval);
  put_optional(j, "recall_eval", r.recall_eval);
  j["thresholds_path"] = r.thresholds_path ? json(*r.thresholds_path) : json(nullptr);
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["epochs_run"] = r.epochs_run;
  j["config"] = r.config;
  if (!r.folds.empty()) {
    json folds = json::array();
    for (const auto& f : r.folds) {
      json fj;
      fj["fold"] = f.fold;
      fj["n_val"] = f.n_val;
      fj["n_eval"] = f.n_eval;
      fj["f1_val"] = f.f1_val;
      fj["f1_eval"] = f.f1_eval;
      fj["precision_eval"] = f.precision_eval;
      fj["recall_eval"] = f.recall_eval;
      fj["thresholds_path"] = f.thresholds_path ? json(*f.thresholds_path) : json(nullptr);
      folds.push_back(std::move(fj));
    }
    j["folds"] = std::move(folds);
  }
  if (r.fold_summary) {
    j["fold_summary"] = {{"mean_f1_val", r.fold_summary->mean_f1_val},
                         {"std_f1_val", r.fold_summary->std_f1_val},
                         {"mean_f1_eval", r.fold_summary->mean_f1_eval},
                         {"std_f1_eval", r.fold_summary->std_f1_eval}};
  }
  return j;
}

RunReport report_from_json(const json& j) {
  try {
    if (!j.is_object()) throw DataError("report must be a JSON object");
    if (get_required<int>(j, "report_version") != RunReport::kVersion) {
      throw DataError("unsupported report_version");
    }
    RunReport r;
    r.command = get_required<std::string>(j, "command");
    r.method = get_optional<std::string>(j, "method").value_or("");
    r.metric = get_required<std::string>(j, "metric");
    r.f1_val = get_optional<double>(j, "f1_val");
    r.f1_eval = get_optional<double>(j, "f1_eval");
    r.micro_f1_eval = get_optional<double>(j, "micro_f1_eval");
    r.macro_f1_eval = get_optional<double>(j, "macro_f1_eval");
    r.precision_eval = get_optional<double>(j, "precision_eval");
    r.recall_eval = get_optional<double>(j, "recall_eval");
    r.thresholds_path = get_optional<std::string>(j, "thresholds_path");
    r.elapsed_seconds = get_required<double>(j, "elapsed_seconds");
    r.epochs_run = get_required<std::size_t>(j, "epochs_run");
    r.config = get_required<json>(j, "config");
    if (j.contains("folds")) {
      for (const auto& fj : j["folds"]) {
        FoldReport f;
        f.fold = get_required<std::size_t>(fj, "fold");
        f.n_val = get_required<std::size_t>(fj, "n_val");
        f.n_eval = get_required<std::size_t>(fj, "n_eval");
        f.f1_val = get_required<double>(fj, "f1_val");
        f.f1_eval = get_required<double>(fj, "f1_eval");
        f.precision_eval = get_required<double>(fj, "precision_eval");
        f.recall_eval = get_required<double>(fj, "recall_eval");
        f.thresholds_path = get_optional<std::string>(fj, "thresholds_path");
        r.folds.push_back(std::move(f));
      }
    }
    if (j.contains("fold_summary")) {
      const auto& s = j["fold_summary"];
      r.fold_summary = FoldSummary{get_required<double>(s, "mean_f1_val"), get_required<double>(s, "std_f1_val"),
                                   get_required<double>(s, "mean_f1_eval"), get_required<double>(s, "std_f1_eval")};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace f1thresh::cli
