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

#include <atomic>
#include <stdexcept>
#include <string>

#include "f1thresh/kernels.hpp"

namespace f1thresh::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, "scalar", &scalar::surrogate_pass, &scalar::count_pass};

#if defined(F1THRESH_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2, "avx2", &avx2::surrogate_pass, &avx2::count_pass};
#endif

bool cpu_has_avx2() {
#if defined(F1THRESH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active_isa() {
  static std::atomic<Isa> isa{best_isa()};
  return isa;
}

}  // namespace

bool isa_compiled(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(F1THRESH_HAVE_AVX2)
      return true;
#else
      return false;
#endif
  }
  return false;
}

bool isa_supported(Isa isa) {
  if (!isa_compiled(isa)) return false;
  if (isa == Isa::kAvx2) {
    static const bool has = cpu_has_avx2();
    return has;
  }
  return true;
}

Isa best_isa() { return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

const KernelTable& table_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::runtime_error("kernel variant '" + std::string(to_string(isa)) + "' is not available on this machine");
  }
#if defined(F1THRESH_HAVE_AVX2)
  if (isa == Isa::kAvx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& active() { return table_for(active_isa().load(std::memory_order_relaxed)); }

void set_active_isa(Isa isa) {
  table_for(isa);  // validates
  active_isa().store(isa, std::memory_order_relaxed);
}

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "auto") return best_isa();
  throw std::invalid_argument("unknown kernel variant '" + std::string(name) + "'");
}

}  // namespace f1thresh::kernels
