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

#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, on x86,
// an AVX2 variant; the dispatched entry points pick one at runtime. Variants
// perform the same IEEE operations in the same order, so their results are
// bit-identical (both TUs are built with -ffp-contract=off).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "teamforge/core.hpp"

namespace teamforge::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
// Best available ISA. TEAMFORGE_SIMD=scalar in the environment forces the
// scalar path.
Isa active_isa();

// Structure-of-arrays view of a pool's traits.
struct TraitColumns {
  std::array<std::vector<double>, kTraitCount> dims;
  std::size_t size() const { return dims[0].size(); }
};

TraitColumns to_columns(std::span<const Participant> pool);

// out[i] = +inf if pulls[i] == 0, else
//          sums[i] / pulls[i] + exploration * sqrt(log_rounds / pulls[i]).
// pulls must fit in a signed 32-bit integer.
using UcbFn = void (*)(std::span<const double> sums,
                       std::span<const std::uint32_t> pulls, double log_rounds,
                       double exploration, std::span<double> out);

// out[j] = affinity(traits[row], traits[j]) for every j.
using AffinityRowFn = void (*)(const TraitColumns& traits, std::size_t row,
                               std::span<double> out);

namespace scalar {
void ucb_indices(std::span<const double> sums,
                 std::span<const std::uint32_t> pulls, double log_rounds,
                 double exploration, std::span<double> out);
void affinity_row(const TraitColumns& traits, std::size_t row,
                  std::span<double> out);
// Columns [begin, end) of the row; shared by the vector tails.
void affinity_range(const TraitColumns& traits, std::size_t row,
                    std::size_t begin, std::size_t end, std::span<double> out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TEAMFORGE_HAVE_AVX2_KERNELS 1
namespace avx2 {
void ucb_indices(std::span<const double> sums,
                 std::span<const std::uint32_t> pulls, double log_rounds,
                 double exploration, std::span<double> out);
void affinity_row(const TraitColumns& traits, std::size_t row,
                  std::span<double> out);
}  // namespace avx2
#endif

UcbFn ucb_kernel(Isa isa);
AffinityRowFn affinity_row_kernel(Isa isa);

// Dispatched through active_isa().
void ucb_indices(std::span<const double> sums,
                 std::span<const std::uint32_t> pulls, double log_rounds,
                 double exploration, std::span<double> out);
void affinity_row(const TraitColumns& traits, std::size_t row,
                  std::span<double> out);

}  // namespace teamforge::kernels
