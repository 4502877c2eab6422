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

#ifndef F1THRESH_KERNELS_HPP_
#define F1THRESH_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace f1thresh::kernels {

// The two inner loops every fitting method spends its time in. Both walk a
// row-major n x C score matrix once and keep one accumulator per class, so
// each class is reduced over rows in ascending row order whatever the ISA.
// Counts are therefore identical across variants; the floating-point sums of
// the surrogate pass differ only through the vectorized exp (a few ulp).

struct DataView {
  std::span<const double> scores;        // rows * cols
  std::span<const std::uint8_t> labels;  // rows * cols, values 0/1
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Output of the surrogate pass, one entry per class.
struct SurrogateSums {
  std::vector<std::int64_t> predicted;      // #{n : p >= t}
  std::vector<std::int64_t> true_positive;  // #{n : p >= t, y = 1}
  std::vector<double> slope_sum_pos;        // sum over y = 1 of sig_a'(p - t)
  std::vector<double> slope_sum_neg;        // sum over y = 0 of sig_a'(p - t)

  void resize(std::size_t classes);
};

// Counts at several candidate thresholds per class. Candidates and outputs
// are probe-major: entry [k * cols + l] is candidate k of class l.
struct ProbeView {
  std::span<const double> candidates;
  std::size_t probes = 0;
};

struct ProbeCounts {
  std::vector<std::int64_t> predicted;
  std::vector<std::int64_t> true_positive;

  void resize(std::size_t probes, std::size_t classes);
};

using SurrogatePassFn = void (*)(const DataView&, std::span<const double> thresholds, double slope,
                                 SurrogateSums& out);
using CountPassFn = void (*)(const DataView&, const ProbeView&, ProbeCounts& out);

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;
  SurrogatePassFn surrogate_pass;
  CountPassFn count_pass;
};

// Variant-specific entry points. The AVX2 ones exist only when the library
// was built with F1THRESH_ENABLE_AVX2.
namespace scalar {
void surrogate_pass(const DataView& data, std::span<const double> thresholds, double slope, SurrogateSums& out);
void count_pass(const DataView& data, const ProbeView& probes, ProbeCounts& out);
// sig_a'(x) = a * sig(|x|) * sig(-|x|) with the exp spelled out; shared with
// the surrogate module so the scalar kernel reproduces it bit for bit.
double surrogate_factor(double x, double slope);
}  // namespace scalar

namespace avx2 {
void surrogate_pass(const DataView& data, std::span<const double> thresholds, double slope, SurrogateSums& out);
void count_pass(const DataView& data, const ProbeView& probes, ProbeCounts& out);
// exp(x) for x <= 0, four lanes at a time; exposed for tests.
void exp_nonpositive(std::span<const double> x, std::span<double> out);
}  // namespace avx2

bool isa_compiled(Isa isa);
bool isa_supported(Isa isa);  // compiled and the CPU has it
Isa best_isa();

// Table for a specific variant; throws std::runtime_error if unsupported.
const KernelTable& table_for(Isa isa);

// The variant used by the library. Defaults to best_isa(); set_active_isa
// lets tests and the CLI force one.
const KernelTable& active();
void set_active_isa(Isa isa);

std::string_view to_string(Isa isa);
Isa parse_isa(std::string_view name);  // "scalar", "avx2", "auto"

}  // namespace f1thresh::kernels

#endif  // F1THRESH_KERNELS_HPP_
