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

#ifndef F1THRESH_CLI_HPP_
#define F1THRESH_CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "f1thresh/metrics.hpp"
#include "f1thresh/optim.hpp"
#include "f1thresh/search.hpp"
#include "json.hpp"

namespace f1thresh::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitGuard = 3,
  kExitCheckFailed = 4,  // gradcheck found a coordinate over tolerance
};

enum class Method { kDefault, kDicho, kNumerical, kSurrogate };

std::string_view to_string(Method m);  // "def", "dicho", "num", "sgl"
Method parse_method(std::string_view name);

// Everything needed to run one method; mirrors the command-line flags.
struct MethodOptions {
  Method method = Method::kSurrogate;
  MetricSpec metric{};
  double init_threshold = 0.5;
  std::optional<double> lr;  // unset: 1e-3 for sgl, 1e-2 for num
  std::size_t epochs = 100;
  double slope = 50.0;
  double delta_t = 0.01;
  std::size_t max_steps = 10;
  std::uint64_t seed = 0;
  DichoConfig dicho{};

  double resolved_lr() const;
  nlohmann::ordered_json to_json() const;
};

// Runs the configured method on `dataset`. For kDefault the result holds the
// constant vector, an empty trace and epochs_run = 0.
FitResult fit_method(const Dataset& dataset, const MethodOptions& options);

struct FoldReport {
  std::size_t fold = 0;
  std::size_t n_val = 0;
  std::size_t n_eval = 0;
  double f1_val = 0.0;
  double f1_eval = 0.0;
  double precision_eval = 0.0;
  double recall_eval = 0.0;
  std::optional<std::string> thresholds_path;

  friend bool operator==(const FoldReport&, const FoldReport&) = default;
};

struct FoldSummary {
  double mean_f1_val = 0.0;
  double std_f1_val = 0.0;
  double mean_f1_eval = 0.0;
  double std_f1_eval = 0.0;

  friend bool operator==(const FoldSummary&, const FoldSummary&) = default;
};

// Report written by optimize, evaluate and kfold.
struct RunReport {
  static constexpr int kVersion = 1;

  std::string command;
  std::string method;  // "def" | "dicho" | "num" | "sgl"; empty for evaluate
  std::string metric;
  std::optional<double> f1_val;
  std::optional<double> f1_eval;
  std::optional<double> micro_f1_eval;
  std::optional<double> macro_f1_eval;
  std::optional<double> precision_eval;
  std::optional<double> recall_eval;
  std::optional<std::string> thresholds_path;
  double elapsed_seconds = 0.0;
  std::size_t epochs_run = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<FoldReport> folds;
  std::optional<FoldSummary> fold_summary;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::ordered_json report_to_json(const RunReport& report);
// Throws DataError when required fields are missing or mistyped.
RunReport report_from_json(const nlohmann::ordered_json& j);

// Mean and population standard deviation.
FoldSummary summarize_folds(const std::vector<FoldReport>& folds);

// Entry point shared by the executable and the tests. argv[0] is the program
// name. Returns one of ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace f1thresh::cli

#endif  // F1THRESH_CLI_HPP_
