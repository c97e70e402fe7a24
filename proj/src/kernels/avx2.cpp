// Copyright 2026 The TeamForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "teamforge/kernels.hpp"

namespace teamforge::kernels::avx2 {

void ucb_indices(std::span<const double> sums,
                 std::span<const std::uint32_t> pulls, double log_rounds,
                 double exploration, std::span<double> out) {
  const std::size_t n = sums.size();
  const std::size_t body = n & ~std::size_t{3};
  const __m256d log_t = _mm256_set1_pd(log_rounds);
  const __m256d c = _mm256_set1_pd(exploration);
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 4) {
    const __m128i raw =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(pulls.data() + i));
    const __m256d count = _mm256_cvtepi32_pd(raw);
    const __m256d mean = _mm256_div_pd(_mm256_loadu_pd(sums.data() + i), count);
    const __m256d bonus =
        _mm256_mul_pd(c, _mm256_sqrt_pd(_mm256_div_pd(log_t, count)));
    const __m256d index = _mm256_add_pd(mean, bonus);
    const __m256d unpulled = _mm256_cmp_pd(count, zero, _CMP_EQ_OQ);
    _mm256_storeu_pd(out.data() + i, _mm256_blendv_pd(index, inf, unpulled));
  }
  for (std::size_t i = body; i < n; ++i) {
    if (pulls[i] == 0) {
      out[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double count = static_cast<double>(pulls[i]);
    out[i] = sums[i] / count + exploration * std::sqrt(log_rounds / count);
  }
}

void affinity_row(const TraitColumns& traits, std::size_t row,
                  std::span<double> out) {
  const std::size_t n = traits.size();
  const std::size_t body = n & ~std::size_t{3};
  const __m256d norm = _mm256_set1_pd(std::sqrt(5.0));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d anchor[kTraitCount];
  for (std::size_t d = 0; d < kTraitCount; ++d) {
    anchor[d] = _mm256_set1_pd(traits.dims[d][row]);
  }
  for (std::size_t j = 0; j < body; j += 4) {
    __m256d squared = zero;
    for (std::size_t d = 0; d < kTraitCount; ++d) {
      const __m256d diff =
          _mm256_sub_pd(anchor[d], _mm256_loadu_pd(traits.dims[d].data() + j));
      squared = _mm256_add_pd(squared, _mm256_mul_pd(diff, diff));
    }
    __m256d v = _mm256_sub_pd(one, _mm256_div_pd(_mm256_sqrt_pd(squared), norm));
    v = _mm256_min_pd(_mm256_max_pd(v, zero), one);
    _mm256_storeu_pd(out.data() + j, v);
  }
  scalar::affinity_range(traits, row, body, n, out);
}

}  // namespace teamforge::kernels::avx2
