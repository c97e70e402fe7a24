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

#include <cstdlib>
#include <string>

#include "teamforge/kernels.hpp"

namespace teamforge::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(TEAMFORGE_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* forced = std::getenv("TEAMFORGE_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") {
      return Isa::kScalar;
    }
    return isa_available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
  }();
  return isa;
}

TraitColumns to_columns(std::span<const Participant> pool) {
  TraitColumns columns;
  for (auto& dim : columns.dims) dim.reserve(pool.size());
  for (const auto& p : pool) {
    for (std::size_t d = 0; d < kTraitCount; ++d) {
      columns.dims[d].push_back(p.traits.values[d]);
    }
  }
  return columns;
}

UcbFn ucb_kernel(Isa isa) {
#if defined(TEAMFORGE_HAVE_AVX2_KERNELS)
  if (isa == Isa::kAvx2) return &avx2::ucb_indices;
#endif
  (void)isa;
  return &scalar::ucb_indices;
}

AffinityRowFn affinity_row_kernel(Isa isa) {
#if defined(TEAMFORGE_HAVE_AVX2_KERNELS)
  if (isa == Isa::kAvx2) return &avx2::affinity_row;
#endif
  (void)isa;
  return &scalar::affinity_row;
}

void ucb_indices(std::span<const double> sums,
                 std::span<const std::uint32_t> pulls, double log_rounds,
                 double exploration, std::span<double> out) {
  static const UcbFn fn = ucb_kernel(active_isa());
  fn(sums, pulls, log_rounds, exploration, out);
}

void affinity_row(const TraitColumns& traits, std::size_t row,
                  std::span<double> out) {
  static const AffinityRowFn fn = affinity_row_kernel(active_isa());
  fn(traits, row, out);
}

}  // namespace teamforge::kernels
