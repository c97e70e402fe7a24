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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teamforge/core.hpp"

namespace teamforge {

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000;

// The arms the bandits operate over. Every candidate has `team_size` members
// drawn from `pool_ids`, no two candidates share a member set and every pool
// member appears in at least one candidate.
struct CandidateSet {
  std::size_t team_size = 0;
  std::vector<std::string> pool_ids;  // sorted
  std::vector<TeamComposition> candidates;

  const TeamComposition& team(std::string_view team_id) const;
  // Index into `candidates`, or npos.
  std::size_t index_of(std::string_view team_id) const;
  // Throws Error(kInvalidArgument) when an invariant does not hold.
  void validate() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Exact binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// All C(n, k) subsets in lexicographic order of their sorted member ids.
// Throws Error(kInfeasible) when C(n, k) exceeds `cap`.
CandidateSet enumerate_candidates(std::span<const Participant> pool,
                                  std::size_t k,
                                  std::uint64_t cap = kDefaultEnumerationCap);

struct SamplingParams {
  std::size_t max_candidates = 0;     // m_max
  std::size_t min_per_user = 1;       // m_min_per_user
  std::uint64_t seed = 0;
};

// Greedy coverage sampler. Deterministic for a fixed seed; every participant
// ends up in at least `min_per_user` candidates or Error(kInfeasible) is
// thrown after 50 * max_candidates draws.
CandidateSet sample_candidates(std::span<const Participant> pool,
                               std::size_t k, const SamplingParams& params);

// team_ids of the candidates containing `user_id`, in candidate order.
std::vector<std::string> arms_for(std::string_view user_id,
                                  const CandidateSet& cs);

}  // namespace teamforge
