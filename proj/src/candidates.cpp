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

#include "teamforge/candidates.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_set>

namespace teamforge {

namespace {

constexpr std::size_t kLookahead = 8;
constexpr std::size_t kDrawBudgetFactor = 50;

std::vector<std::string> sorted_ids(std::span<const Participant> pool) {
  std::vector<std::string> ids;
  ids.reserve(pool.size());
  for (const auto& p : pool) ids.push_back(p.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void check_team_size(std::size_t n, std::size_t k) {
  require(n >= 1, "participant pool is empty");
  require(k >= 1 && k <= n, "team size must be between 1 and the pool size (" +
                                std::to_string(n) + "), got " +
                                std::to_string(k));
}

TeamComposition team_from_indices(const std::vector<std::string>& ids,
                                  std::span<const std::size_t> members) {
  std::vector<std::string> names;
  names.reserve(members.size());
  for (std::size_t m : members) names.push_back(ids[m]);
  return TeamComposition::from_members(std::move(names));
}

}  // namespace

const TeamComposition& CandidateSet::team(std::string_view team_id) const {
  const std::size_t i = index_of(team_id);
  if (i == npos) {
    fail(ErrorKind::kNotFound, "unknown team '" + std::string(team_id) + "'");
  }
  return candidates[i];
}

std::size_t CandidateSet::index_of(std::string_view team_id) const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].team_id() == team_id) return i;
  }
  return npos;
}

void CandidateSet::validate() const {
  require(team_size >= 1, "candidate set has team size 0");
  require(std::is_sorted(pool_ids.begin(), pool_ids.end()),
          "candidate set pool ids are not sorted");
  std::unordered_set<TeamComposition, TeamCompositionHash> seen;
  std::unordered_set<std::string_view> ids;
  std::vector<std::size_t> coverage(pool_ids.size(), 0);
  for (const auto& team : candidates) {
    require(team.size() == team_size,
            "team " + team.team_id() + " does not have " +
                std::to_string(team_size) + " members");
    require(seen.insert(team).second,
            "team " + team.team_id() + " repeats another member set");
    require(ids.insert(team.team_id()).second,
            "duplicate team id " + team.team_id());
    for (const auto& m : team.members()) {
      auto it = std::lower_bound(pool_ids.begin(), pool_ids.end(), m);
      require(it != pool_ids.end() && *it == m,
              "team " + team.team_id() + " has unknown member " + m);
      ++coverage[static_cast<std::size_t>(it - pool_ids.begin())];
    }
  }
  for (std::size_t i = 0; i < pool_ids.size(); ++i) {
    require(coverage[i] > 0, "participant " + pool_ids[i] +
                                 " is not in any candidate team");
  }
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    result = result * (n - i) / (i + 1);
    if (result > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(result);
}

CandidateSet enumerate_candidates(std::span<const Participant> pool,
                                  std::size_t k, std::uint64_t cap) {
  validate_pool(pool);
  const std::size_t n = pool.size();
  check_team_size(n, k);
  const std::uint64_t count = binomial(n, k);
  if (count > cap) {
    fail(ErrorKind::kInfeasible,
         "C(" + std::to_string(n) + ", " + std::to_string(k) + ") = " +
             std::to_string(count) + " exceeds the enumeration cap of " +
             std::to_string(cap) + "; use sampling");
  }

  CandidateSet cs;
  cs.team_size = k;
  cs.pool_ids = sorted_ids(pool);
  cs.candidates.reserve(count);

  std::vector<std::size_t> combo(k);
  std::iota(combo.begin(), combo.end(), std::size_t{0});
  while (true) {
    cs.candidates.push_back(team_from_indices(cs.pool_ids, combo));
    // Advance to the next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && combo[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
  return cs;
}

CandidateSet sample_candidates(std::span<const Participant> pool,
                               std::size_t k, const SamplingParams& params) {
  validate_pool(pool);
  const std::size_t n = pool.size();
  check_team_size(n, k);
  require(params.min_per_user >= 1, "min_per_user must be at least 1");
  const std::size_t needed = (n * params.min_per_user + k - 1) / k;
  require(params.max_candidates >= needed,
          "max_candidates must be at least ceil(n * min_per_user / k) = " +
              std::to_string(needed));
  if (binomial(n - 1, k - 1) < params.min_per_user) {
    fail(ErrorKind::kInfeasible,
         "infeasible coverage: each participant belongs to only " +
             std::to_string(binomial(n - 1, k - 1)) + " distinct teams");
  }

  CandidateSet cs;
  cs.team_size = k;
  cs.pool_ids = sorted_ids(pool);

  std::seed_seq seq{static_cast<std::uint32_t>(params.seed),
                    static_cast<std::uint32_t>(params.seed >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // deficit[u]: appearances still missing for participant u.
  std::vector<std::size_t> deficit(n, params.min_per_user);
  std::size_t total_deficit = n * params.min_per_user;
  std::unordered_set<std::string> chosen;
  std::vector<std::size_t> order(n);
  std::vector<double> keys(n);

  // Even draws take the k most-deficient participants with random
  // tie-breaking, odd draws are uniform k-subsets.
  auto draw = [&](std::size_t index) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (index % 2 == 0) {
      for (std::size_t u = 0; u < n; ++u) {
        keys[u] = static_cast<double>(deficit[u]) + unit(rng);
      }
      std::partial_sort(order.begin(), order.begin() + k, order.end(),
                        [&](std::size_t a, std::size_t b) {
                          return keys[a] > keys[b];
                        });
    } else {
      for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
      }
    }
    std::vector<std::size_t> members(order.begin(), order.begin() + k);
    std::sort(members.begin(), members.end());
    return members;
  };

  const std::size_t budget = kDrawBudgetFactor * params.max_candidates;
  std::size_t draws = 0;
  while (total_deficit > 0) {
    if (cs.candidates.size() == params.max_candidates || draws >= budget) {
      fail(ErrorKind::kInfeasible,
           "infeasible coverage: could not give every participant " +
               std::to_string(params.min_per_user) + " teams within " +
               std::to_string(params.max_candidates) + " candidates");
    }
    const std::size_t slots_after = params.max_candidates - cs.candidates.size() - 1;
    std::vector<std::size_t> best;
    std::size_t best_gain = 0;
    for (std::size_t l = 0; l < kLookahead && draws < budget; ++l) {
      std::vector<std::size_t> members = draw(draws++);
      std::size_t gain = 0;
      for (std::size_t m : members) gain += deficit[m] > 0 ? 1 : 0;
      if (gain <= best_gain) continue;
      // Leave enough room to cover what is still missing.
      if (total_deficit - gain > slots_after * k) continue;
      std::vector<std::string> names;
      for (std::size_t m : members) names.push_back(cs.pool_ids[m]);
      if (chosen.count(TeamComposition::canonical_id(names)) != 0) continue;
      best = std::move(members);
      best_gain = gain;
    }
    if (best.empty()) continue;
    TeamComposition team = team_from_indices(cs.pool_ids, best);
    chosen.insert(team.team_id());
    cs.candidates.push_back(std::move(team));
    for (std::size_t m : best) {
      if (deficit[m] > 0) {
        --deficit[m];
        --total_deficit;
      }
    }
  }
  return cs;
}

std::vector<std::string> arms_for(std::string_view user_id,
                                  const CandidateSet& cs) {
  if (!std::binary_search(cs.pool_ids.begin(), cs.pool_ids.end(), user_id)) {
    fail(ErrorKind::kNotFound, "unknown user '" + std::string(user_id) + "'");
  }
  std::vector<std::string> arms;
  for (const auto& team : cs.candidates) {
    if (team.contains(user_id)) arms.push_back(team.team_id());
  }
  return arms;
}

}  // namespace teamforge
