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

#include <cmath>
#include <limits>

#include "teamforge/kernels.hpp"

namespace teamforge::kernels::scalar {

void ucb_indices(std::span<const double> sums,
                 std::span<const std::uint32_t> pulls, double log_rounds,
                 double exploration, std::span<double> out) {
  const std::size_t n = sums.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (pulls[i] == 0) {
      out[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double count = static_cast<double>(pulls[i]);
    const double mean = sums[i] / count;
    out[i] = mean + exploration * std::sqrt(log_rounds / count);
  }
}

void affinity_range(const TraitColumns& traits, std::size_t row,
                    std::size_t begin, std::size_t end, std::span<double> out) {
  const double norm = std::sqrt(5.0);
  for (std::size_t j = begin; j < end; ++j) {
    double squared = 0.0;
    for (std::size_t d = 0; d < kTraitCount; ++d) {
      const double diff = traits.dims[d][row] - traits.dims[d][j];
      squared += diff * diff;
    }
    double v = 1.0 - std::sqrt(squared) / norm;
    v = v < 0.0 ? 0.0 : v;
    out[j] = v > 1.0 ? 1.0 : v;
  }
}

void affinity_row(const TraitColumns& traits, std::size_t row,
                  std::span<double> out) {
  affinity_range(traits, row, 0, traits.size(), out);
}

}  // namespace teamforge::kernels::scalar
