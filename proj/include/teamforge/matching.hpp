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
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "teamforge/bandit.hpp"
#include "teamforge/candidates.hpp"

namespace teamforge {

inline constexpr std::size_t kMaxExactPool = 24;

enum class SolverKind { kExact, kGreedy };

// A sub-collection of candidate teams that partitions the pool exactly.
struct Assignment {
  SolverKind solver = SolverKind::kExact;
  std::vector<std::string> team_ids;  // sorted
  std::map<std::string, std::string> user_to_team;
  double total_value = 0.0;
  // Share of users whose assigned cell is a prior rather than an observation.
  double prior_fraction = 0.0;
};

// Candidate indices of an optimal partition and its value.
struct PartitionChoice {
  std::vector<std::size_t> teams;  // sorted by team id
  double value = -std::numeric_limits<double>::infinity();
};

// Sum of valid cells over each candidate's members, in candidate order.
std::vector<double> team_values(const PreferenceMatrix& matrix,
                                const CandidateSet& cs);

// Exact weighted set partitioning by dynamic programming over covered-member
// bitmasks, always extending with a candidate that contains the lowest
// uncovered participant. Value ties resolve to the lexicographically smallest
// sorted team-id sequence. Throws Error(kInvalidArgument) above kMaxExactPool
// participants or when the team size does not divide the pool, and
// Error(kInfeasible) when no partition exists.
PartitionChoice solve_partition_dp(const CandidateSet& cs,
                                   std::span<const double> values);

Assignment solve_partition_exact(const PreferenceMatrix& matrix,
                                 const CandidateSet& cs);

// Repeatedly takes the disjoint candidate with the best per-member value.
// Throws Error(kInfeasible) when it runs out of disjoint candidates.
Assignment solve_partition_greedy(const PreferenceMatrix& matrix,
                                  const CandidateSet& cs);

// Recomputes the objective from the matrix. Throws Error(kNotFound) for a
// user or team the matrix does not know.
double assignment_value(const Assignment& assignment,
                        const PreferenceMatrix& matrix);

// Builds the Assignment record for a chosen set of candidates.
Assignment make_assignment(const PreferenceMatrix& matrix,
                           const CandidateSet& cs,
                           std::span<const std::size_t> chosen,
                           SolverKind solver);

const char* to_string(SolverKind solver);

}  // namespace teamforge
