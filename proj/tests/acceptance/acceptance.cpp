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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "../support/generators.hpp"
#include "../support/properties.hpp"
#include "f1thresh/cli.hpp"
#include "f1thresh/metrics.hpp"
#include "f1thresh/optim.hpp"
#include "f1thresh/search.hpp"
#include "f1thresh/surrogate.hpp"
#include "f1thresh/synthetic.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace f1thresh;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Best of `repeats` timings of fn(), divided by `epochs`.
double per_epoch_seconds(const std::function<void()>& fn, std::size_t epochs, int repeats) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = Clock::now();
    fn();
    best = std::min(best, seconds_since(start));
  }
  return best / static_cast<double>(epochs);
}

Outcome gradient_correctness() {
  const auto start = Clock::now();
  const GradcheckReport g = run_gradcheck(GradcheckConfig{});
  const double elapsed = seconds_since(start);
  return {g.passed() && g.trials >= 200 && elapsed < 10.0,
          std::to_string(g.trials) + " trials, " + std::to_string(g.coordinates) + " coordinates, " +
              std::to_string(g.failures) + " failures, worst rel " + fmt("%.2e", g.worst_relative_error) + ", " +
              fmt("%.2f", elapsed) + " s"};
}

Outcome prediction_gradient() {
  const auto start = Clock::now();
  const auto r = testing::prop_pred_gradient_exhaustive(8, 2);
  const double elapsed = seconds_since(start);
  return {r.passed() && elapsed < 5.0, std::to_string(r.cases) + " (truth, prediction, metric) cases, " +
                                           std::to_string(r.failures) + " failures, " + fmt("%.2f", elapsed) + " s" +
                                           (r.failures ? "; " + r.first_failure : "")};
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  const MetricSpec metric{};
  FitConfig sgl;
  sgl.adam.lr = 1e-2;
  NumGradConfig num;
  DichoConfig dicho;
  std::size_t misses = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Xoshiro256 rng(1000 + seed);
    const Dataset d = testing::separable_single_class(rng, 0.2);
    const double best = brute_force_oracle(d, metric, OracleMode::kExact1d).trace.back();
    dicho.seed = seed;
    const double f_dicho = evaluate_thresholds(d, dicho_fit(d, dicho, metric).thresholds, metric).objective;
    const double f_num = evaluate_thresholds(d, num_fit(d, num, metric).thresholds, metric).objective;
    const double f_sgl = evaluate_thresholds(d, fit_sgl(d, sgl).thresholds, metric).objective;
    for (const auto& [name, f] : {std::pair{"dicho", f_dicho}, std::pair{"num", f_num}, std::pair{"sgl", f_sgl}}) {
      if (!(std::abs(f - best) <= 1e-9)) {
        if (misses++ == 0) first = std::string(name) + " on seed " + std::to_string(seed) + ": " + fmt("%.6f", f);
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {misses == 0 && elapsed < 30.0, "50 datasets x 3 methods, " + std::to_string(misses) + " misses, " +
                                             fmt("%.2f", elapsed) + " s" + (misses ? "; first: " + first : "")};
}

Outcome planted_recovery() {
  const auto start = Clock::now();
  const SyntheticData data = generate_synthetic(SyntheticConfig{2000, 20, 0, SyntheticConfig{}.noise});
  std::vector<std::size_t> first(1000);
  std::vector<std::size_t> second(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    first[i] = i;
    second[i] = 1000 + i;
  }
  const Dataset val = data.dataset.subset(first);
  const Dataset eval = data.dataset.subset(second);
  const MetricSpec metric{};
  const FitResult fit = fit_sgl(val, FitConfig{});
  const double f_sgl = evaluate_thresholds(eval, fit.thresholds, metric).objective;
  const double f_def = evaluate_thresholds(eval, default_thresholds(20, 0.5), metric).objective;
  const double elapsed = seconds_since(start);
  const double gain = 100.0 * (f_sgl - f_def);
  return {gain >= 2.0 && elapsed < 30.0, "eval micro-F1 " + fmt("%.4f", f_sgl) + " vs default " +
                                             fmt("%.4f", f_def) + " (+" + fmt("%.2f", gain) + " points), " +
                                             fmt("%.2f", elapsed) + " s"};
}

Outcome scalability() {
  const SyntheticData full = generate_synthetic(SyntheticConfig{15278, 527, 0, SyntheticConfig{}.noise});
  const auto start = Clock::now();
  fit_sgl(full.dataset, FitConfig{});
  const double elapsed = seconds_since(start);

  const std::vector<double> widths = {64, 128, 256, 527};
  constexpr std::size_t kEpochs = 10;
  FitConfig cfg;
  cfg.epochs = kEpochs;
  std::vector<Dataset> datasets;
  for (const double c : widths) {
    datasets.push_back(generate_synthetic(SyntheticConfig{15278, static_cast<std::size_t>(c), 1, 0.15}).dataset);
  }
  std::vector<double> per_epoch(widths.size(), 1e300);
  for (int round = 0; round < 3; ++round) {
    for (std::size_t w = 0; w < widths.size(); ++w) {
      per_epoch[w] = std::min(per_epoch[w], per_epoch_seconds([&] { fit_sgl(datasets[w], cfg); }, kEpochs, 1));
    }
  }
  const double slope = loglog_slope(widths, per_epoch);
  std::string times;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    times += (i ? ", " : "") + fmt("%.0f", widths[i]) + ": " + fmt("%.2f", per_epoch[i] * 1e3) + " ms";
  }
  return {elapsed <= 60.0 && std::abs(slope - 1.0) <= 0.25,
          "15278x527, 100 epochs in " + fmt("%.2f", elapsed) + " s; per-epoch " + times + "; log-log slope " +
              fmt("%.3f", slope)};
}

Outcome numerical_scaling() {
  const std::vector<double> widths = {64, 128, 256};
  const NumGradConfig cfg;
  const MetricSpec metric{};
  std::vector<Dataset> datasets;
  for (const double c : widths) {
    datasets.push_back(generate_synthetic(SyntheticConfig{15278, static_cast<std::size_t>(c), 2, 0.15}).dataset);
  }
  // Widths are timed round-robin so a slow stretch of the machine hits all
  // of them rather than one.
  constexpr std::size_t kCalls = 5;
  std::vector<double> per_epoch(widths.size(), 1e300);
  for (int round = 0; round < 5; ++round) {
    for (std::size_t w = 0; w < widths.size(); ++w) {
      const ThresholdVector t = default_thresholds(datasets[w].classes(), 0.5);
      const double s = per_epoch_seconds(
          [&] {
            for (std::size_t i = 0; i < kCalls; ++i) numerical_gradient(datasets[w], t, cfg, metric);
          },
          kCalls, 1);
      per_epoch[w] = std::min(per_epoch[w], s);
    }
  }
  const double slope = loglog_slope(widths, per_epoch);
  std::string times;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    times += (i ? ", " : "") + fmt("%.0f", widths[i]) + ": " + fmt("%.2f", per_epoch[i] * 1e3) + " ms";
  }
  return {slope <= 1.3, "per-call " + times + "; log-log slope " + fmt("%.3f", slope)};
}

Outcome invariant_suite() {
  const auto start = Clock::now();
  const auto results = testing::metric_and_surrogate_suite(1000, 7);
  const double elapsed = seconds_since(start);
  bool ok = elapsed < 60.0;
  std::string detail;
  std::size_t min_cases = SIZE_MAX;
  for (const auto& r : results) {
    ok = ok && r.passed() && r.cases >= 1000;
    min_cases = std::min(min_cases, r.cases);
    if (!r.passed()) detail += "; FAILED " + r.name + ": " + r.first_failure;
  }
  return {ok, std::to_string(results.size()) + " properties, >= " + std::to_string(min_cases) + " cases each, " +
                  fmt("%.2f", elapsed) + " s" + detail};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Reports are compared after dropping wall-clock fields.
std::string normalized_report(const fs::path& p) {
  auto j = nlohmann::ordered_json::parse(read_file(p));
  const std::function<void(nlohmann::ordered_json&)> strip = [&](nlohmann::ordered_json& v) {
    if (v.is_object()) {
      v.erase("elapsed_seconds");
      v.erase("epochs_per_second");
      for (auto& [k, child] : v.items()) strip(child);
    } else if (v.is_array()) {
      for (auto& child : v) strip(child);
    }
  };
  strip(j);
  return j.dump();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "f1thresh_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto path = [&](const std::string& name) { return (dir / name).string(); };

  const SyntheticData data = generate_synthetic(SyntheticConfig{300, 6, 11, 0.15});
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < 300; ++i) (i < 200 ? a : b).push_back(i);
  const Dataset val = data.dataset.subset(a);
  const Dataset eval = data.dataset.subset(b);
  save_csv(val.scores(), path("sv.csv"));
  save_csv(val.labels(), path("lv.csv"));
  save_csv(eval.scores(), path("se.csv"));
  save_csv(eval.labels(), path("le.csv"));

  struct Job {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> thresholds;
    std::string report;
  };
  std::vector<Job> jobs;
  for (const std::string method : {"def", "dicho", "num", "sgl"}) {
    jobs.push_back({"optimize " + method,
                    {"f1thresh", "optimize", "--method", method, "--scores-val", path("sv.csv"), "--labels-val",
                     path("lv.csv"), "--scores-eval", path("se.csv"), "--labels-eval", path("le.csv"), "--seed", "3",
                     "--out-thresholds", path("opt_" + method + ".json"), "--report",
                     path("opt_" + method + "_report.json"), "--trace-csv", path("opt_" + method + "_trace.csv")},
                    {path("opt_" + method + ".json"), path("opt_" + method + "_trace.csv")},
                    path("opt_" + method + "_report.json")});
    jobs.push_back({"kfold " + method,
                    {"f1thresh", "kfold", "--method", method, "--scores", path("sv.csv"), "--labels", path("lv.csv"),
                     "--k", "3", "--seed", "5", "--out-thresholds", path("kf_" + method), "--report",
                     path("kf_" + method + "_report.json")},
                    {path("kf_" + method + ".fold0.json"), path("kf_" + method + ".fold1.json"),
                     path("kf_" + method + ".fold2.json")},
                    path("kf_" + method + "_report.json")});
    jobs.push_back({"benchmark " + method,
                    {"f1thresh", "benchmark", "--method", method, "--n", "500", "--c", "16", "--epochs", "20",
                     "--seed", "9", "--out-thresholds", path("bm_" + method + ".json"), "--report",
                     path("bm_" + method + "_report.json")},
                    {path("bm_" + method + ".json")},
                    path("bm_" + method + "_report.json")});
  }
  jobs.push_back({"evaluate",
                  {"f1thresh", "evaluate", "--scores", path("se.csv"), "--labels", path("le.csv"), "--thresholds",
                   path("opt_sgl.json"), "--report", path("eval_report.json")},
                  {},
                  path("eval_report.json")});
  jobs.push_back({"gradcheck",
                  {"f1thresh", "gradcheck", "--trials", "50", "--seed", "4", "--report", path("gc_report.json")},
                  {},
                  path("gc_report.json")});

  std::size_t compared = 0;
  std::string mismatch;
  for (const auto& job : jobs) {
    std::vector<std::string> first_files;
    std::string first_report;
    for (int round = 0; round < 2; ++round) {
      std::ostringstream out, err;
      const int code = cli::run(job.args, out, err);
      if (code != 0) {
        mismatch = job.name + " exited with " + std::to_string(code) + ": " + err.str();
        break;
      }
      std::vector<std::string> files;
      for (const auto& f : job.thresholds) files.push_back(read_file(f));
      const std::string report = normalized_report(job.report);
      if (round == 0) {
        first_files = std::move(files);
        first_report = report;
      } else {
        compared += first_files.size() + 1;
        if (files != first_files) mismatch = job.name + ": threshold files differ";
        if (report != first_report) mismatch = job.name + ": reports differ";
      }
    }
    if (!mismatch.empty()) break;
  }
  fs::remove_all(dir);
  return {mismatch.empty(), std::to_string(jobs.size()) + " subcommand runs repeated, " + std::to_string(compared) +
                                " artifacts compared" + (mismatch.empty() ? "" : "; " + mismatch)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "gradient correctness (gradcheck)", gradient_correctness},
      {2, "analytic dF1/dyhat on all small truths", prediction_gradient},
      {3, "oracle equivalence for C = 1", oracle_equivalence},
      {4, "planted-threshold recovery", planted_recovery},
      {5, "scalability at 15278 x 527", scalability},
      {6, "numerical-gradient cost linear in C", numerical_scaling},
      {7, "metric and surrogate invariant suite", invariant_suite},
      {8, "determinism of every subcommand", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
