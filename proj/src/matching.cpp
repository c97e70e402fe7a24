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

#include "teamforge/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace teamforge {

namespace {

constexpr std::int32_t kUnsolved = -2;
constexpr std::int32_t kInfeasibleState = -1;

struct MemoEntry {
  double value = 0.0;
  std::int32_t choice = kUnsolved;
};

// Dense table up to 2^20 states, hashed beyond.
class Memo {
 public:
  explicit Memo(std::size_t n) : dense_(n <= 20) {
    if (dense_) table_.resize(std::size_t{1} << n);
  }

  MemoEntry& operator[](std::uint32_t mask) {
    return dense_ ? table_[mask] : map_[mask];
  }

 private:
  bool dense_;
  std::vector<MemoEntry> table_;
  std::unordered_map<std::uint32_t, MemoEntry> map_;
};

class PartitionDp {
 public:
  PartitionDp(const CandidateSet& cs, std::span<const double> values)
      : cs_(cs), values_(values), n_(cs.pool_ids.size()), memo_(n_) {
    full_ = n_ == 32 ? ~0u : ((1u << n_) - 1u);
    masks_.reserve(cs.candidates.size());
    by_member_.resize(n_);
    for (std::size_t c = 0; c < cs.candidates.size(); ++c) {
      std::uint32_t mask = 0;
      for (const auto& m : cs.candidates[c].members()) {
        auto it = std::lower_bound(cs.pool_ids.begin(), cs.pool_ids.end(), m);
        require(it != cs.pool_ids.end() && *it == m,
                "team " + cs.candidates[c].team_id() + " has unknown member " + m);
        mask |= 1u << static_cast<std::uint32_t>(it - cs.pool_ids.begin());
      }
      masks_.push_back(mask);
      for (std::size_t p = 0; p < n_; ++p) {
        if (mask & (1u << p)) by_member_[p].push_back(c);
      }
    }
  }

  PartitionChoice solve() {
    const MemoEntry& root = visit(0);
    if (root.choice == kInfeasibleState) {
      fail(ErrorKind::kInfeasible,
           "no feasible partition: the candidate teams cannot split the pool "
           "exactly");
    }
    PartitionChoice out;
    out.teams = chain(0);
    out.value = root.value;
    return out;
  }

 private:
  // Best completion of `covered`; value is the sum over added teams.
  const MemoEntry& visit(std::uint32_t covered) {
    MemoEntry& entry = memo_[covered];
    if (entry.choice != kUnsolved) return entry;
    if (covered == full_) {
      entry.value = 0.0;
      entry.choice = static_cast<std::int32_t>(cs_.candidates.size());
      return entry;
    }
    const std::size_t pivot =
        static_cast<std::size_t>(std::countr_one(covered));
    double best = -std::numeric_limits<double>::infinity();
    std::int32_t best_choice = kInfeasibleState;
    for (std::size_t c : by_member_[pivot]) {
      if (masks_[c] & covered) continue;
      const std::uint32_t next = covered | masks_[c];
      const MemoEntry& sub = visit(next);
      if (sub.choice == kInfeasibleState) continue;
      const double value = values_[c] + sub.value;
      const double tol = 1e-12 * std::max(1.0, std::abs(best));
      if (best_choice == kInfeasibleState || value > best + tol) {
        best = value;
        best_choice = static_cast<std::int32_t>(c);
      } else if (value >= best - tol &&
                 team_sequence(c, next) <
                     team_sequence(static_cast<std::size_t>(best_choice),
                                   covered | masks_[best_choice])) {
        best = std::max(best, value);
        best_choice = static_cast<std::int32_t>(c);
      }
    }
    // Map nodes and the dense table never move, so `entry` is still valid.
    entry.value = best;
    entry.choice = best_choice;
    return entry;
  }

  std::vector<std::size_t> chain(std::uint32_t covered) {
    std::vector<std::size_t> teams;
    while (covered != full_) {
      const auto c = static_cast<std::size_t>(memo_[covered].choice);
      teams.push_back(c);
      covered |= masks_[c];
    }
    std::sort(teams.begin(), teams.end(), [&](std::size_t a, std::size_t b) {
      return cs_.candidates[a].team_id() < cs_.candidates[b].team_id();
    });
    return teams;
  }

  std::vector<std::string_view> team_sequence(std::size_t first,
                                              std::uint32_t rest) {
    std::vector<std::string_view> ids;
    ids.push_back(cs_.candidates[first].team_id());
    for (std::size_t c : chain(rest)) ids.push_back(cs_.candidates[c].team_id());
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  const CandidateSet& cs_;
  std::span<const double> values_;
  std::size_t n_;
  std::uint32_t full_ = 0;
  std::vector<std::uint32_t> masks_;
  std::vector<std::vector<std::size_t>> by_member_;
  Memo memo_;
};

void check_partition_shape(const CandidateSet& cs, std::size_t max_pool) {
  const std::size_t n = cs.pool_ids.size();
  require(n >= 1, "participant pool is empty");
  if (n > max_pool) {
    fail(ErrorKind::kInvalidArgument,
         "pool too large for the exact solver: " + std::to_string(n) +
             " participants (limit " + std::to_string(max_pool) + ")");
  }
  require(cs.team_size >= 1 && n % cs.team_size == 0,
          "team size " + std::to_string(cs.team_size) +
              " does not divide the pool size " + std::to_string(n));
}

void check_columns(const PreferenceMatrix& matrix, const CandidateSet& cs) {
  require(matrix.teams.size() == cs.candidates.size(),
          "preference matrix and candidate set disagree on team count");
  for (std::size_t t = 0; t < cs.candidates.size(); ++t) {
    require(matrix.teams[t] == cs.candidates[t].team_id(),
            "preference matrix column " + std::to_string(t) +
                " is not team " + cs.candidates[t].team_id());
  }
}

}  // namespace

const char* to_string(SolverKind solver) {
  return solver == SolverKind::kExact ? "exact" : "greedy";
}

std::vector<double> team_values(const PreferenceMatrix& matrix,
                                const CandidateSet& cs) {
  check_columns(matrix, cs);
  std::vector<double> values(cs.candidates.size(), 0.0);
  for (std::size_t t = 0; t < cs.candidates.size(); ++t) {
    for (const auto& m : cs.candidates[t].members()) {
      const std::size_t u = matrix.user_index(m);
      if (u == PreferenceMatrix::npos) {
        fail(ErrorKind::kNotFound, "matrix has no row for " + m);
      }
      if (matrix.source(u, t) != CellSource::kInvalid) {
        values[t] += matrix.score(u, t);
      }
    }
  }
  return values;
}

PartitionChoice solve_partition_dp(const CandidateSet& cs,
                                   std::span<const double> values) {
  check_partition_shape(cs, kMaxExactPool);
  require(values.size() == cs.candidates.size(),
          "one value per candidate team is required");
  for (const auto& team : cs.candidates) {
    require(team.size() == cs.team_size,
            "exact solver needs uniform team size");
  }
  return PartitionDp(cs, values).solve();
}

Assignment make_assignment(const PreferenceMatrix& matrix,
                           const CandidateSet& cs,
                           std::span<const std::size_t> chosen,
                           SolverKind solver) {
  Assignment a;
  a.solver = solver;
  std::size_t prior_cells = 0;
  for (std::size_t t : chosen) {
    const auto& team = cs.candidates[t];
    a.team_ids.push_back(team.team_id());
    for (const auto& m : team.members()) {
      a.user_to_team[m] = team.team_id();
      const std::size_t u = matrix.user_index(m);
      if (u == PreferenceMatrix::npos) {
        fail(ErrorKind::kNotFound, "matrix has no row for " + m);
      }
      const std::size_t col = matrix.team_index(team.team_id());
      if (matrix.source(u, col) == CellSource::kPrior) ++prior_cells;
    }
  }
  std::sort(a.team_ids.begin(), a.team_ids.end());
  a.total_value = assignment_value(a, matrix);
  a.prior_fraction = a.user_to_team.empty()
                         ? 0.0
                         : static_cast<double>(prior_cells) /
                               static_cast<double>(a.user_to_team.size());
  return a;
}

Assignment solve_partition_exact(const PreferenceMatrix& matrix,
                                 const CandidateSet& cs) {
  const std::vector<double> values = team_values(matrix, cs);
  const PartitionChoice choice = solve_partition_dp(cs, values);
  return make_assignment(matrix, cs, choice.teams, SolverKind::kExact);
}

Assignment solve_partition_greedy(const PreferenceMatrix& matrix,
                                  const CandidateSet& cs) {
  const std::vector<double> values = team_values(matrix, cs);
  const std::size_t n = cs.pool_ids.size();
  require(n >= 1, "participant pool is empty");

  std::vector<std::size_t> order(cs.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto average = [&](std::size_t t) {
    return values[t] / static_cast<double>(cs.candidates[t].size());
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (average(a) != average(b)) return average(a) > average(b);
    return cs.candidates[a].team_id() < cs.candidates[b].team_id();
  });

  std::vector<bool> covered(n, false);
  std::size_t covered_count = 0;
  std::vector<std::size_t> chosen;
  auto member_index = [&](const std::string& m) {
    auto it = std::lower_bound(cs.pool_ids.begin(), cs.pool_ids.end(), m);
    require(it != cs.pool_ids.end() && *it == m, "unknown member " + m);
    return static_cast<std::size_t>(it - cs.pool_ids.begin());
  };
  // A single pass in value order is equivalent to re-scanning for the best
  // disjoint team after every pick.
  for (std::size_t t : order) {
    const auto& members = cs.candidates[t].members();
    const bool disjoint = std::none_of(members.begin(), members.end(),
                                       [&](const std::string& m) {
                                         return covered[member_index(m)];
                                       });
    if (!disjoint) continue;
    chosen.push_back(t);
    for (const auto& m : members) covered[member_index(m)] = true;
    covered_count += members.size();
    if (covered_count == n) break;
  }
  if (covered_count != n) {
    fail(ErrorKind::kInfeasible,
         "greedy stuck: no disjoint candidate covers the remaining " +
             std::to_string(n - covered_count) + " participants");
  }
  return make_assignment(matrix, cs, chosen, SolverKind::kGreedy);
}

double assignment_value(const Assignment& assignment,
                        const PreferenceMatrix& matrix) {
  double total = 0.0;
  for (const auto& [user, team] : assignment.user_to_team) {
    const std::size_t u = matrix.user_index(user);
    const std::size_t t = matrix.team_index(team);
    if (u == PreferenceMatrix::npos || t == PreferenceMatrix::npos) {
      fail(ErrorKind::kNotFound,
           "assignment references unknown user or team: " + user + " -> " + team);
    }
    require(matrix.source(u, t) != CellSource::kInvalid,
            "user " + user + " is not a member of " + team);
    total += matrix.score(u, t);
  }
  return total;
}

}  // namespace teamforge
