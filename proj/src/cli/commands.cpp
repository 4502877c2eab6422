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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "f1thresh/cli.hpp"
#include "f1thresh/errors.hpp"
#include "f1thresh/kernels.hpp"
#include "f1thresh/surrogate.hpp"
#include "f1thresh/synthetic.hpp"
#include "f1thresh/tagmat.hpp"

namespace f1thresh::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr double kDefaultMaxCells = 1e8;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write error on " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Restores the process-wide kernel choice when a command returns.
class IsaScope {
 public:
  explicit IsaScope(const std::string& name) : previous_(kernels::active().isa) {
    const kernels::Isa isa = kernels::parse_isa(name);
    if (!kernels::isa_supported(isa)) {
      throw std::invalid_argument("kernel variant '" + name + "' is not available on this machine");
    }
    kernels::set_active_isa(isa);
  }
  ~IsaScope() { kernels::set_active_isa(previous_); }
  IsaScope(const IsaScope&) = delete;
  IsaScope& operator=(const IsaScope&) = delete;

 private:
  kernels::Isa previous_;
};

struct CommonFlags {
  bool header = false;
  std::string isa = "auto";
  std::string empty = "one";
  std::string metric = "micro-f1";

  LoadOptions load() const { return LoadOptions{header}; }
  MetricSpec spec() const { return MetricSpec{parse_metric_kind(metric), parse_empty_class_score(empty)}; }
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_flag("--header", f.header, "Skip one header line in CSV inputs");
  sub->add_option("--isa", f.isa, "Kernel variant: auto, scalar or avx2")->capture_default_str();
  sub->add_option("--empty-class-score", f.empty, "Score of a class with no truth and no predictions: one, zero, skip")
      ->capture_default_str();
  sub->add_option("--metric", f.metric, "micro-f1 or macro-f1")->capture_default_str();
}

struct MethodFlags {
  std::string method;
  double init_threshold = 0.5;
  double lr = 0.0;
  CLI::Option* lr_opt = nullptr;
  std::size_t epochs = 100;
  double slope = 50.0;
  double delta_t = 0.01;
  std::size_t max_steps = 10;
  std::uint64_t seed = 0;
  DichoConfig dicho{};

  MethodOptions resolve(const MetricSpec& metric) const {
    MethodOptions o;
    o.method = parse_method(method);
    o.metric = metric;
    o.init_threshold = init_threshold;
    if (lr_opt != nullptr && lr_opt->count() > 0) o.lr = lr;
    o.epochs = epochs;
    o.slope = slope;
    o.delta_t = delta_t;
    o.max_steps = max_steps;
    o.seed = seed;
    o.dicho = dicho;
    return o;
  }
};

void add_method(CLI::App* sub, MethodFlags& f, bool method_required) {
  auto* m = sub->add_option("--method", f.method, "def, dicho, num or sgl");
  if (method_required) m->required();
  sub->add_option("--init-threshold", f.init_threshold, "Initial threshold for every class")->capture_default_str();
  f.lr_opt = sub->add_option("--lr", f.lr, "Adam learning rate (default 1e-3 for sgl, 1e-2 for num)");
  sub->add_option("--epochs", f.epochs, "Full-batch epochs")->capture_default_str();
  sub->add_option("--slope", f.slope, "Surrogate sigmoid slope a")->capture_default_str();
  sub->add_option("--delta-t", f.delta_t, "Probe step for num")->capture_default_str();
  sub->add_option("--max-steps", f.max_steps, "Probes per direction for num")->capture_default_str();
  sub->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  sub->add_option("--dicho-grid", f.dicho.coarse_grid, "Coarse grid size for dicho")->capture_default_str();
  sub->add_option("--dicho-stages", f.dicho.stages, "Refinement stages for dicho")->capture_default_str();
  sub->add_option("--dicho-samples", f.dicho.samples_per_stage, "Samples per stage for dicho")->capture_default_str();
  sub->add_option("--dicho-sigma", f.dicho.sigma0, "Initial sampling std for dicho")->capture_default_str();
  sub->add_option("--dicho-shrink", f.dicho.shrink, "Per-stage std factor for dicho")->capture_default_str();
}

Dataset load_dataset(const std::string& scores, const std::string& labels, const LoadOptions& opts) {
  return Dataset(load_scores(scores, opts), load_labels(labels, opts));
}

// --- optimize ---------------------------------------------------------------

struct OptimizeArgs {
  CommonFlags common;
  MethodFlags method;
  std::string scores_val, labels_val, scores_eval, labels_eval;
  std::string out_thresholds = "thresholds.json";
  std::string report;
  std::string trace_csv;
};

int do_optimize(const OptimizeArgs& a, std::ostream& out) {
  IsaScope isa(a.common.isa);
  const MetricSpec metric = a.common.spec();
  const MethodOptions options = a.method.resolve(metric);
  if (a.scores_eval.empty() != a.labels_eval.empty()) {
    throw std::invalid_argument("--scores-eval and --labels-eval must be given together");
  }
  const Dataset val = load_dataset(a.scores_val, a.labels_val, a.common.load());
  std::optional<Dataset> eval;
  if (!a.scores_eval.empty()) {
    eval.emplace(load_dataset(a.scores_eval, a.labels_eval, a.common.load()));
    if (eval->classes() != val.classes()) {
      throw DataError("class count mismatch: val has " + std::to_string(val.classes()) + ", eval has " +
                      std::to_string(eval->classes()));
    }
  }

  const auto start = Clock::now();
  const FitResult fit = fit_method(val, options);
  const double elapsed = seconds_since(start);

  RunReport r;
  r.command = "optimize";
  r.method = std::string(to_string(options.method));
  r.metric = std::string(to_string(metric.kind));
  r.f1_val = evaluate_thresholds(val, fit.thresholds, metric).objective;
  if (eval) {
    const Evaluation e = evaluate_thresholds(*eval, fit.thresholds, metric);
    r.f1_eval = e.objective;
    r.micro_f1_eval = e.micro_f1;
    r.macro_f1_eval = e.macro_f1;
    r.precision_eval = e.precision;
    r.recall_eval = e.recall;
  }
  r.thresholds_path = a.out_thresholds;
  r.elapsed_seconds = elapsed;
  r.epochs_run = fit.epochs_run;
  r.config = options.to_json();
  r.config["scores_val"] = a.scores_val;
  r.config["labels_val"] = a.labels_val;
  r.config["scores_eval"] = a.scores_eval.empty() ? json(nullptr) : json(a.scores_eval);
  r.config["labels_eval"] = a.labels_eval.empty() ? json(nullptr) : json(a.labels_eval);
  r.config["header"] = a.common.header;

  save_thresholds(fit.thresholds, a.out_thresholds);
  if (!a.report.empty()) write_json(a.report, report_to_json(r));
  if (!a.trace_csv.empty()) {
    std::ostringstream csv;
    csv << "epoch,f1\n0," << fmt(fit.initial_objective, "%.17g") << "\n";
    for (std::size_t i = 0; i < fit.trace.size(); ++i) csv << i + 1 << "," << fmt(fit.trace[i], "%.17g") << "\n";
    write_text(a.trace_csv, csv.str());
  }

  out << "optimize method=" << r.method << " metric=" << r.metric << " classes=" << val.classes()
      << " f1_val=" << fmt(*r.f1_val);
  if (r.f1_eval) out << " f1_eval=" << fmt(*r.f1_eval);
  out << " epochs=" << r.epochs_run << " elapsed=" << fmt(elapsed, "%.3f") << "s thresholds=" << a.out_thresholds
      << "\n";
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  CommonFlags common;
  std::string scores, labels, thresholds, report;
};

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  IsaScope isa(a.common.isa);
  const MetricSpec metric = a.common.spec();
  const auto start = Clock::now();
  const Dataset data = load_dataset(a.scores, a.labels, a.common.load());
  const ThresholdVector t = load_thresholds(a.thresholds, data.classes());
  const Evaluation e = evaluate_thresholds(data, t, metric);

  RunReport r;
  r.command = "evaluate";
  r.metric = std::string(to_string(metric.kind));
  r.f1_eval = e.objective;
  r.micro_f1_eval = e.micro_f1;
  r.macro_f1_eval = e.macro_f1;
  r.precision_eval = e.precision;
  r.recall_eval = e.recall;
  r.thresholds_path = a.thresholds;
  r.elapsed_seconds = seconds_since(start);
  r.config = {{"scores", a.scores},
              {"labels", a.labels},
              {"thresholds", a.thresholds},
              {"metric", to_string(metric.kind)},
              {"empty_class_score", to_string(metric.empty)},
              {"header", a.common.header},
              {"kernels", kernels::to_string(kernels::active().isa)}};
  if (!a.report.empty()) write_json(a.report, report_to_json(r));

  out << "evaluate metric=" << r.metric << " f1=" << fmt(e.objective) << " micro_f1=" << fmt(e.micro_f1)
      << " macro_f1=" << fmt(e.macro_f1) << " precision=" << fmt(e.precision) << " recall=" << fmt(e.recall) << "\n";
  return kExitOk;
}

// --- gradcheck --------------------------------------------------------------

struct GradcheckArgs {
  CommonFlags common;
  std::size_t n = 32;
  std::size_t c = 8;
  std::size_t trials = 200;
  double slope = 0.0;
  CLI::Option* slope_opt = nullptr;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  std::string report;
};

int do_gradcheck(const GradcheckArgs& a, std::ostream& out, std::ostream& err) {
  IsaScope isa(a.common.isa);
  GradcheckConfig cfg;
  cfg.max_instances = a.n;
  cfg.max_classes = a.c;
  cfg.trials = a.trials;
  if (a.slope_opt->count() > 0) cfg.slopes = {a.slope};
  cfg.relative_tolerance = a.tolerance;
  cfg.seed = a.seed;
  const GradcheckReport g = run_gradcheck(cfg);

  if (!a.report.empty()) {
    json j;
    j["report_version"] = RunReport::kVersion;
    j["command"] = "gradcheck";
    j["passed"] = g.passed();
    j["trials"] = g.trials;
    j["coordinates"] = g.coordinates;
    j["failures"] = g.failures;
    j["worst_relative_error"] = g.worst_relative_error;
    j["worst_trial"] = g.worst_trial;
    j["worst_class"] = g.worst_class;
    j["worst_analytic"] = g.worst_analytic;
    j["worst_numeric"] = g.worst_numeric;
    j["config"] = {{"n", cfg.max_instances},
                   {"c", cfg.max_classes},
                   {"trials", cfg.trials},
                   {"slopes", cfg.slopes},
                   {"tolerance", cfg.relative_tolerance},
                   {"small_gradient", cfg.small_gradient},
                   {"step", cfg.step},
                   {"seed", cfg.seed},
                   {"kernels", kernels::to_string(kernels::active().isa)}};
    write_json(a.report, j);
  }

  if (g.trials == 0) {
    err << "warning: gradcheck ran zero trials; nothing was checked\n";
    out << "gradcheck PASS (vacuous) trials=0\n";
    return kExitOk;
  }
  out << "gradcheck " << (g.passed() ? "PASS" : "FAIL") << " trials=" << g.trials << " coordinates=" << g.coordinates
      << " failures=" << g.failures << " worst_relative_error=" << fmt(g.worst_relative_error, "%.3e")
      << " (trial " << g.worst_trial << ", class " << g.worst_class << ", analytic "
      << fmt(g.worst_analytic, "%.9e") << ", numeric " << fmt(g.worst_numeric, "%.9e") << ")\n";
  return g.passed() ? kExitOk : kExitCheckFailed;
}

// --- benchmark --------------------------------------------------------------

struct BenchmarkArgs {
  CommonFlags common;
  MethodFlags method;
  std::size_t n = 15278;
  std::size_t c = 527;
  double noise = SyntheticConfig{}.noise;
  double max_cells = kDefaultMaxCells;
  std::string out_thresholds;
  std::string report;
};

int do_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  IsaScope isa(a.common.isa);
  const MetricSpec metric = a.common.spec();
  const MethodOptions options = a.method.resolve(metric);
  if (a.n == 0 || a.c == 0) throw std::invalid_argument("--n and --c must be positive");
  if (!(a.max_cells > 0.0)) throw std::invalid_argument("--max-cells must be positive");
  if (static_cast<double>(a.n) * static_cast<double>(a.c) > a.max_cells) {
    throw GuardError("benchmark of " + std::to_string(a.n) + "x" + std::to_string(a.c) + " exceeds --max-cells " +
                     fmt(a.max_cells, "%g"));
  }
  const SyntheticData data = generate_synthetic(SyntheticConfig{a.n, a.c, a.method.seed, a.noise});
  const double f1_default =
      evaluate_thresholds(data.dataset, default_thresholds(a.c, 0.5), metric).objective;

  const auto start = Clock::now();
  const FitResult fit = fit_method(data.dataset, options);
  const double elapsed = seconds_since(start);
  const double f1_final = evaluate_thresholds(data.dataset, fit.thresholds, metric).objective;
  const double eps = elapsed > 0.0 ? static_cast<double>(fit.epochs_run) / elapsed : 0.0;

  if (!a.out_thresholds.empty()) save_thresholds(fit.thresholds, a.out_thresholds);
  if (!a.report.empty()) {
    json j;
    j["report_version"] = RunReport::kVersion;
    j["command"] = "benchmark";
    j["method"] = to_string(options.method);
    j["metric"] = to_string(metric.kind);
    j["n"] = a.n;
    j["c"] = a.c;
    j["f1_final"] = f1_final;
    j["f1_default"] = f1_default;
    j["epochs_run"] = fit.epochs_run;
    j["elapsed_seconds"] = elapsed;
    j["epochs_per_second"] = eps;
    j["thresholds_path"] = a.out_thresholds.empty() ? json(nullptr) : json(a.out_thresholds);
    j["config"] = options.to_json();
    j["config"]["noise"] = a.noise;
    j["config"]["max_cells"] = a.max_cells;
    write_json(a.report, j);
  }

  out << "benchmark method=" << to_string(options.method) << " n=" << a.n << " c=" << a.c
      << " epochs=" << fit.epochs_run << " elapsed=" << fmt(elapsed, "%.3f") << "s epochs_per_second="
      << fmt(eps, "%.2f") << " f1=" << fmt(f1_final) << " f1_default=" << fmt(f1_default) << "\n";
  return kExitOk;
}

// --- kfold ------------------------------------------------------------------

struct KfoldArgs {
  CommonFlags common;
  MethodFlags method;
  std::string scores, labels;
  std::size_t k = 3;
  std::string thresholds_prefix;
  std::string report;
};

int do_kfold(const KfoldArgs& a, std::ostream& out) {
  IsaScope isa(a.common.isa);
  const MetricSpec metric = a.common.spec();
  const MethodOptions options = a.method.resolve(metric);
  const Dataset data = load_dataset(a.scores, a.labels, a.common.load());
  const std::vector<FoldPair> pairs = kfold_split(data, a.k, a.method.seed);

  RunReport r;
  r.command = "kfold";
  r.method = std::string(to_string(options.method));
  r.metric = std::string(to_string(metric.kind));
  const auto start = Clock::now();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const FitResult fit = fit_method(pairs[i].val, options);
    const Evaluation e = evaluate_thresholds(pairs[i].eval, fit.thresholds, metric);
    FoldReport f;
    f.fold = i;
    f.n_val = pairs[i].val.instances();
    f.n_eval = pairs[i].eval.instances();
    f.f1_val = evaluate_thresholds(pairs[i].val, fit.thresholds, metric).objective;
    f.f1_eval = e.objective;
    f.precision_eval = e.precision;
    f.recall_eval = e.recall;
    if (!a.thresholds_prefix.empty()) {
      f.thresholds_path = a.thresholds_prefix + ".fold" + std::to_string(i) + ".json";
      save_thresholds(fit.thresholds, *f.thresholds_path);
    }
    r.epochs_run += fit.epochs_run;
    r.folds.push_back(std::move(f));
  }
  r.elapsed_seconds = seconds_since(start);
  r.fold_summary = summarize_folds(r.folds);
  r.f1_val = r.fold_summary->mean_f1_val;
  r.f1_eval = r.fold_summary->mean_f1_eval;
  r.config = options.to_json();
  r.config["scores"] = a.scores;
  r.config["labels"] = a.labels;
  r.config["k"] = a.k;
  r.config["header"] = a.common.header;
  if (!a.report.empty()) write_json(a.report, report_to_json(r));

  out << "kfold method=" << r.method << " k=" << a.k << " mean_f1_eval=" << fmt(r.fold_summary->mean_f1_eval)
      << " std_f1_eval=" << fmt(r.fold_summary->std_f1_eval) << " mean_f1_val=" << fmt(r.fold_summary->mean_f1_val)
      << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Per-class decision threshold optimization for multi-label F1", "f1thresh"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Fit thresholds on a validation split");
  add_common(optimize, opt.common);
  add_method(optimize, opt.method, true);
  optimize->add_option("--scores-val", opt.scores_val, "Validation scores (CSV or binary)")->required();
  optimize->add_option("--labels-val", opt.labels_val, "Validation labels (CSV or binary)")->required();
  optimize->add_option("--scores-eval", opt.scores_eval, "Evaluation scores");
  optimize->add_option("--labels-eval", opt.labels_eval, "Evaluation labels");
  optimize->add_option("--out-thresholds", opt.out_thresholds, "Threshold JSON output")->capture_default_str();
  optimize->add_option("--report", opt.report, "Report JSON output");
  optimize->add_option("--trace-csv", opt.trace_csv, "Write epoch,f1 rows");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Apply stored thresholds and report F1");
  add_common(evaluate, ev.common);
  evaluate->add_option("--scores", ev.scores, "Scores (CSV or binary)")->required();
  evaluate->add_option("--labels", ev.labels, "Labels (CSV or binary)")->required();
  evaluate->add_option("--thresholds", ev.thresholds, "Threshold JSON")->required();
  evaluate->add_option("--report", ev.report, "Report JSON output");

  GradcheckArgs gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic and finite-difference threshold gradients");
  add_common(gradcheck, gc.common);
  gradcheck->add_option("--n", gc.n, "Maximum instances per trial")->capture_default_str();
  gradcheck->add_option("--c", gc.c, "Maximum classes per trial")->capture_default_str();
  gradcheck->add_option("--trials", gc.trials, "Random trials")->capture_default_str();
  gc.slope_opt = gradcheck->add_option("--slope", gc.slope, "Single slope (default cycles 5, 20, 50)");
  gradcheck->add_option("--tolerance", gc.tolerance, "Relative tolerance per coordinate")->capture_default_str();
  gradcheck->add_option("--seed", gc.seed, "Random seed")->capture_default_str();
  gradcheck->add_option("--report", gc.report, "Report JSON output");

  BenchmarkArgs bm;
  bm.method.method = "sgl";
  auto* benchmark = app.add_subcommand("benchmark", "Time a method on synthetic data");
  add_common(benchmark, bm.common);
  add_method(benchmark, bm.method, false);
  benchmark->add_option("--n", bm.n, "Instances")->capture_default_str();
  benchmark->add_option("--c", bm.c, "Classes")->capture_default_str();
  benchmark->add_option("--noise", bm.noise, "Score noise std of the generator")->capture_default_str();
  benchmark->add_option("--max-cells", bm.max_cells, "Refuse n*c above this")->capture_default_str();
  benchmark->add_option("--out-thresholds", bm.out_thresholds, "Threshold JSON output");
  benchmark->add_option("--report", bm.report, "Report JSON output");

  KfoldArgs kf;
  auto* kfold = app.add_subcommand("kfold", "k-fold cross-validation of a method");
  add_common(kfold, kf.common);
  add_method(kfold, kf.method, true);
  kfold->add_option("--scores", kf.scores, "Scores (CSV or binary)")->required();
  kfold->add_option("--labels", kf.labels, "Labels (CSV or binary)")->required();
  kfold->add_option("--k", kf.k, "Number of folds")->capture_default_str();
  kfold->add_option("--out-thresholds", kf.thresholds_prefix, "Per-fold threshold prefix; writes PREFIX.foldN.json");
  kfold->add_option("--report", kf.report, "Report JSON output");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (optimize->parsed()) return do_optimize(opt, out);
    if (evaluate->parsed()) return do_evaluate(ev, out);
    if (gradcheck->parsed()) return do_gradcheck(gc, out, err);
    if (benchmark->parsed()) return do_benchmark(bm, out);
    if (kfold->parsed()) return do_kfold(kf, out);
  } catch (const GuardError& e) {
    err << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace f1thresh::cli
