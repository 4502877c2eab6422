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

// AVX2/FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check (see dispatch.cpp).
//
// Four classes share one 256-bit register of doubles. Rows are streamed in
// order and per-class accumulators live in L1, so within a class rows are
// reduced in ascending order, matching the scalar kernel.

#include <immintrin.h>

#include <algorithm>
#include <cstring>
#include <vector>

#include "f1thresh/kernels.hpp"

namespace f1thresh::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kCountBlock = 32;
constexpr std::size_t kCountTileRows = 64;

// exp(x) for x <= 0 (inputs above 0 are not expected). Cody-Waite reduction
// x = k ln2 + r, |r| <= ln2/2, degree-13 Taylor polynomial on r, then scaling
// by 2^k in two halves so results in the subnormal range round only once.
inline __m256d exp_nonpositive_pd(__m256d x) {
  const __m256d kLowest = _mm256_set1_pd(-745.2);
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d kLn2Hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d kLn2Lo = _mm256_set1_pd(1.90821492927058770002e-10);

  x = _mm256_max_pd(x, kLowest);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, kLog2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, kLn2Hi, x);
  r = _mm256_fnmadd_pd(k, kLn2Lo, r);

  // 1/13!, 1/12!, ..., 1/2!, 1, 1
  __m256d poly = _mm256_set1_pd(1.0 / 6227020800.0);
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 479001600.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 39916800.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 3628800.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 362880.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 40320.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 5040.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 720.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 120.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 24.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 6.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(0.5));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0));

  const __m128i ki = _mm256_cvtpd_epi32(k);  // k in [-1075, 0], exact
  const __m128i k1 = _mm_srai_epi32(ki, 1);
  const __m128i k2 = _mm_sub_epi32(ki, k1);
  const auto pow2 = [](__m128i e32) {
    __m256i e = _mm256_cvtepi32_epi64(e32);
    e = _mm256_add_epi64(e, _mm256_set1_epi64x(1023));
    return _mm256_castsi256_pd(_mm256_slli_epi64(e, 52));
  };
  return _mm256_mul_pd(_mm256_mul_pd(poly, pow2(k1)), pow2(k2));
}

// Four labels (bytes 0/1) widened to 64-bit lanes.
inline __m256i load_labels4(const std::uint8_t* y) {
  std::int32_t word;
  std::memcpy(&word, y, sizeof word);
  return _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(word));
}

inline __m256i load_i64(const std::int64_t* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store_i64(std::int64_t* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

}  // namespace

void exp_nonpositive(std::span<const double> x, std::span<double> out) {
  std::size_t i = 0;
  for (; i + kLanes <= x.size(); i += kLanes) {
    _mm256_storeu_pd(out.data() + i, exp_nonpositive_pd(_mm256_loadu_pd(x.data() + i)));
  }
  if (i < x.size()) {
    double buf[kLanes] = {0.0, 0.0, 0.0, 0.0};
    std::memcpy(buf, x.data() + i, (x.size() - i) * sizeof(double));
    _mm256_storeu_pd(buf, exp_nonpositive_pd(_mm256_loadu_pd(buf)));
    std::memcpy(out.data() + i, buf, (x.size() - i) * sizeof(double));
  }
}

void surrogate_pass(const DataView& data, std::span<const double> thresholds, double slope, SurrogateSums& out) {
  const std::size_t cols = data.cols;
  const std::size_t vec_cols = cols - cols % kLanes;
  out.resize(cols);

  const __m256d a = _mm256_set1_pd(slope);
  const __m256d neg_a = _mm256_set1_pd(-slope);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256i one64 = _mm256_set1_epi64x(1);

  for (std::size_t r = 0; r < data.rows; ++r) {
    const double* row = data.scores.data() + r * cols;
    const std::uint8_t* labels = data.labels.data() + r * cols;
    for (std::size_t l = 0; l < vec_cols; l += kLanes) {
      const __m256d t = _mm256_loadu_pd(thresholds.data() + l);
      const __m256d p = _mm256_loadu_pd(row + l);
      const __m256i y = load_labels4(labels + l);
      const __m256i active = _mm256_castpd_si256(_mm256_cmp_pd(p, t, _CMP_GE_OQ));
      store_i64(out.predicted.data() + l, _mm256_sub_epi64(load_i64(out.predicted.data() + l), active));
      store_i64(out.true_positive.data() + l,
                _mm256_add_epi64(load_i64(out.true_positive.data() + l), _mm256_and_si256(active, y)));

      const __m256d x = _mm256_sub_pd(p, t);
      const __m256d e = exp_nonpositive_pd(_mm256_mul_pd(neg_a, _mm256_andnot_pd(sign, x)));
      const __m256d s = _mm256_div_pd(one, _mm256_add_pd(one, e));
      const __m256d d = _mm256_mul_pd(_mm256_mul_pd(a, s), _mm256_mul_pd(e, s));
      const __m256d is_pos = _mm256_castsi256_pd(_mm256_cmpeq_epi64(y, one64));
      _mm256_storeu_pd(out.slope_sum_pos.data() + l,
                       _mm256_add_pd(_mm256_loadu_pd(out.slope_sum_pos.data() + l), _mm256_and_pd(is_pos, d)));
      _mm256_storeu_pd(out.slope_sum_neg.data() + l,
                       _mm256_add_pd(_mm256_loadu_pd(out.slope_sum_neg.data() + l), _mm256_andnot_pd(is_pos, d)));
    }
    for (std::size_t l = vec_cols; l < cols; ++l) {
      const bool y = labels[l] != 0;
      const bool active = row[l] >= thresholds[l];
      out.predicted[l] += active;
      out.true_positive[l] += active & y;
      const double d = scalar::surrogate_factor(row[l] - thresholds[l], slope);
      if (y) {
        out.slope_sum_pos[l] += d;
      } else {
        out.slope_sum_neg[l] += d;
      }
    }
  }
}

void count_pass(const DataView& data, const ProbeView& probes, ProbeCounts& out) {
  const std::size_t cols = data.cols;
  const std::size_t np = probes.probes;
  out.resize(np, cols);

  // A tile of rows stays in L2 while each block of classes sweeps it. The
  // block's candidates and counters are packed densely: with a power-of-two
  // class count the probe-major rows would otherwise share a few L1 sets.
  std::vector<double> cand(np * kCountBlock);
  std::vector<std::int64_t> pred(np * kCountBlock);
  std::vector<std::int64_t> tp(np * kCountBlock);

  for (std::size_t tile = 0; tile < data.rows; tile += kCountTileRows) {
    const std::size_t tile_end = std::min(data.rows, tile + kCountTileRows);
    for (std::size_t begin = 0; begin < cols; begin += kCountBlock) {
      const std::size_t width = std::min(cols - begin, kCountBlock);
      const std::size_t vec_width = width / kLanes * kLanes;
      for (std::size_t k = 0; k < np; ++k) {
        std::memcpy(cand.data() + k * kCountBlock, probes.candidates.data() + k * cols + begin, width * sizeof(double));
      }
      std::fill(pred.begin(), pred.end(), 0);
      std::fill(tp.begin(), tp.end(), 0);

      for (std::size_t r = tile; r < tile_end; ++r) {
        const double* row = data.scores.data() + r * cols + begin;
        const std::uint8_t* labels = data.labels.data() + r * cols + begin;
        for (std::size_t k = 0; k < np; ++k) {
          const double* c = cand.data() + k * kCountBlock;
          std::int64_t* pk = pred.data() + k * kCountBlock;
          std::int64_t* tk = tp.data() + k * kCountBlock;
          for (std::size_t l = 0; l < vec_width; l += kLanes) {
            const __m256d p = _mm256_loadu_pd(row + l);
            const __m256i y = load_labels4(labels + l);
            const __m256i active = _mm256_castpd_si256(_mm256_cmp_pd(p, _mm256_loadu_pd(c + l), _CMP_GE_OQ));
            store_i64(pk + l, _mm256_sub_epi64(load_i64(pk + l), active));
            store_i64(tk + l, _mm256_add_epi64(load_i64(tk + l), _mm256_and_si256(active, y)));
          }
          for (std::size_t l = vec_width; l < width; ++l) {
            const bool active = row[l] >= c[l];
            pk[l] += active;
            tk[l] += active & (labels[l] != 0);
          }
        }
      }

      for (std::size_t k = 0; k < np; ++k) {
        for (std::size_t l = 0; l < width; ++l) {
          out.predicted[k * cols + begin + l] += pred[k * kCountBlock + l];
          out.true_positive[k * cols + begin + l] += tp[k * kCountBlock + l];
        }
      }
    }
  }
}

}  // namespace f1thresh::kernels::avx2
