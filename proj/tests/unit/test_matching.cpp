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


#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "teamforge/matching.hpp"
#include "teamforge/simulate.hpp"

using namespace teamforge;

namespace {

std::vector<Participant> pool_of(std::size_t n) {
  std::vector<Participant> pool;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id(1, static_cast<char>('A' + i));
    pool.push_back({id, id, {}});
  }
  return pool;
}

// Matrix over `cs` where every member of team t scores value(t) / |t|.
PreferenceMatrix split_values(const CandidateSet& cs,
                              const std::map<std::string, double>& value) {
  PreferenceMatrix m;
  m.users = cs.pool_ids;
  const std::size_t cols = cs.candidates.size();
  for (const auto& t : cs.candidates) m.teams.push_back(t.team_id());
  m.scores.assign(m.users.size() * cols, 0.0);
  m.sources.assign(m.users.size() * cols, CellSource::kInvalid);
  for (std::size_t t = 0; t < cols; ++t) {
    const auto& team = cs.candidates[t];
    const auto it = value.find(team.team_id());
    const double v = it == value.end() ? 0.0 : it->second;
    for (const auto& member : team.members()) {
      const std::size_t u = m.user_index(member);
      m.scores[u * cols + t] = v / static_cast<double>(team.size());
      m.sources[u * cols + t] = CellSource::kObserved;
    }
  }
  return m;
}

CandidateSet only(const CandidateSet& cs, std::initializer_list<const char*> keep) {
  CandidateSet out{cs.team_size, cs.pool_ids, {}};
  for (const char* id : keep) out.candidates.push_back(cs.team(id));
  return out;
}

const std::map<std::string, double> kFour = {{"A+B", 1.7}, {"C+D", 1.3}, {"A+C", 1.0},
                                             {"B+D", 1.0}, {"A+D", 0.9}, {"B+C", 0.9}};

bool is_exact_cover(const CandidateSet& cs, const Assignment& a) {
  std::vector<std::string> seen;
  for (const auto& id : a.team_ids) {
    for (const auto& m : cs.team(id).members()) seen.push_back(m);
  }
  std::sort(seen.begin(), seen.end());
  return seen == cs.pool_ids;
}

}  // namespace

TEST_CASE("four participants, all pairs") {
  const CandidateSet cs = enumerate_candidates(pool_of(4), 2);
  const PreferenceMatrix m = split_values(cs, kFour);
  const Assignment a = solve_partition_exact(m, cs);
  CHECK(a.solver == SolverKind::kExact);
  CHECK(a.team_ids == std::vector<std::string>{"A+B", "C+D"});
  CHECK(a.total_value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(a.user_to_team.at("C") == "C+D");
  CHECK(a.prior_fraction == 0.0);
  CHECK(is_exact_cover(cs, a));

  // The alternatives, scored the same way.
  Assignment alt = a;
  alt.team_ids = {"A+C", "B+D"};
  alt.user_to_team = {{"A", "A+C"}, {"C", "A+C"}, {"B", "B+D"}, {"D", "B+D"}};
  CHECK(assignment_value(alt, m) == doctest::Approx(2.0).epsilon(1e-12));
  alt.team_ids = {"A+D", "B+C"};
  alt.user_to_team = {{"A", "A+D"}, {"D", "A+D"}, {"B", "B+C"}, {"C", "B+C"}};
  CHECK(assignment_value(alt, m) == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("greedy on the four participant instance") {
  const CandidateSet cs = enumerate_candidates(pool_of(4), 2);
  const Assignment g = solve_partition_greedy(split_values(cs, kFour), cs);
  CHECK(g.solver == SolverKind::kGreedy);
  CHECK(g.team_ids == std::vector<std::string>{"A+B", "C+D"});
  CHECK(g.total_value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("whole pool team") {
  const CandidateSet cs = enumerate_candidates(pool_of(3), 3);
  const PreferenceMatrix m = split_values(cs, {{"A+B+C", 2.4}});
  for (const Assignment& a : {solve_partition_exact(m, cs), solve_partition_greedy(m, cs)}) {
    CHECK(a.team_ids == std::vector<std::string>{"A+B+C"});
    CHECK(a.total_value == doctest::Approx(2.4).epsilon(1e-12));
  }
}

TEST_CASE("no candidate for a participant") {
  const CandidateSet cs = only(enumerate_candidates(pool_of(4), 2), {"A+B", "A+C", "B+C"});
  const PreferenceMatrix m = split_values(cs, kFour);
  try {
    solve_partition_exact(m, cs);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasible);
  }
  CHECK_THROWS_AS(solve_partition_greedy(m, cs), Error);
}

TEST_CASE("greedy can block the only completion") {
  // A+B is the best team but leaves C and D without a pair.
  const CandidateSet cs = only(enumerate_candidates(pool_of(4), 2), {"A+B", "A+C", "B+D"});
  const PreferenceMatrix m = split_values(cs, {{"A+B", 1.9}, {"A+C", 0.5}, {"B+D", 0.5}});
  const Assignment exact = solve_partition_exact(m, cs);
  CHECK(exact.team_ids == std::vector<std::string>{"A+C", "B+D"});
  CHECK(exact.total_value == doctest::Approx(1.0).epsilon(1e-12));
  try {
    solve_partition_greedy(m, cs);
    FAIL("greedy should be stuck");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasible);
  }
}

TEST_CASE("greedy suboptimal but feasible") {
  // Greedy takes A+B (avg 0.5) then C+D; exact prefers A+C + B+D.
  const CandidateSet cs = enumerate_candidates(pool_of(4), 2);
  const PreferenceMatrix m = split_values(
      cs, {{"A+B", 1.0}, {"C+D", 0.0}, {"A+C", 0.9}, {"B+D", 0.9}, {"A+D", 0}, {"B+C", 0}});
  const Assignment g = solve_partition_greedy(m, cs);
  const Assignment e = solve_partition_exact(m, cs);
  CHECK(g.team_ids == std::vector<std::string>{"A+B", "C+D"});
  CHECK(e.team_ids == std::vector<std::string>{"A+C", "B+D"});
  CHECK(g.total_value < e.total_value);
}

TEST_CASE("ties go to the smallest team id sequence") {
  const CandidateSet cs = enumerate_candidates(pool_of(4), 2);
  std::map<std::string, double> flat;
  for (const auto& t : cs.candidates) flat[t.team_id()] = 1.0;
  CHECK(solve_partition_exact(split_values(cs, flat), cs).team_ids ==
        std::vector<std::string>{"A+B", "C+D"});
  flat["A+B"] = flat["C+D"] = 0.75;
  CHECK(solve_partition_exact(split_values(cs, flat), cs).team_ids ==
        std::vector<std::string>{"A+C", "B+D"});
}

TEST_CASE("size limits") {
  try {
    solve_partition_dp(enumerate_candidates(pool_of(5), 2), std::vector<double>(10, 1.0));
    FAIL("team size must divide the pool");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
  Rng rng = make_rng(1, "big");
  const auto big = random_pool(26, rng);
  CandidateSet cs = sample_candidates(big, 2, {13, 1, 3});
  try {
    solve_partition_dp(cs, std::vector<double>(cs.candidates.size(), 1.0));
    FAIL("pool above the exact limit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
  // The greedy solver has no size limit.
  const PreferenceMatrix m = split_values(cs, {});
  CHECK(is_exact_cover(cs, solve_partition_greedy(m, cs)));
}

TEST_CASE("dense and hashed memo on larger pools") {
  for (std::size_t n : {16, 20, 22, 24}) {
    Rng rng = make_rng(n, "larger");
    const auto pool = random_pool(n, rng);
    const std::size_t k = n % 4 == 0 ? 4 : 2;
    const CandidateSet cs = sample_candidates(pool, k, {3 * n, 3, n});
    const PreferenceMatrix truth = true_utility_matrix(pool, cs, SyntheticUserModel{});
    const Assignment exact = solve_partition_exact(truth, cs);
    CAPTURE(n);
    CHECK(is_exact_cover(cs, exact));
    try {
      const Assignment greedy = solve_partition_greedy(truth, cs);
      CHECK(greedy.total_value <= exact.total_value + 1e-9);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInfeasible);
    }
  }
}

TEST_CASE("exact solver equals naive enumeration on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t feasible = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = i % 3 == 0 ? 3 : 2;
    const std::size_t n = k * (1 + rng() % (k == 3 ? 3 : 5));
    CandidateSet cs = enumerate_candidates(pool_of(n), k);
    if (i % 4 == 1) {
      std::vector<TeamComposition> kept;
      for (const auto& t : cs.candidates) {
        if (unit(rng) < 0.6) kept.push_back(t);
      }
      cs.candidates = kept;
    }
    std::vector<double> values(cs.candidates.size());
    for (auto& v : values) v = i % 5 == 0 ? std::floor(unit(rng) * 3) : unit(rng) * 2;
    const auto oracle = enumerate_best_partition(cs, values);
    CAPTURE(i);
    try {
      const PartitionChoice dp = solve_partition_dp(cs, values);
      REQUIRE(oracle.has_value());
      ++feasible;
      CHECK(dp.value == doctest::Approx(oracle->value).epsilon(1e-12));
      // Integer values (every fifth instance) create ties; both pick the same.
      CHECK(dp.teams == oracle->teams);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInfeasible);
      CHECK_FALSE(oracle.has_value());
    }
  }
  CHECK(feasible > 150);
}

TEST_CASE("assignment value and prior fraction") {
  const CandidateSet cs = enumerate_candidates(pool_of(4), 2);
  PreferenceMatrix m = split_values(cs, kFour);
  // Mark A's and B's A+B cells as priors.
  const std::size_t ab = m.team_index("A+B");
  m.sources[m.user_index("A") * m.teams.size() + ab] = CellSource::kPrior;
  m.sources[m.user_index("B") * m.teams.size() + ab] = CellSource::kPrior;
  const Assignment a = solve_partition_exact(m, cs);
  CHECK(a.prior_fraction == 0.5);

  // Order of teams does not matter.
  Assignment swapped = a;
  std::reverse(swapped.team_ids.begin(), swapped.team_ids.end());
  CHECK(assignment_value(swapped, m) == assignment_value(a, m));
  CHECK(assignment_value(a, m) == doctest::Approx(a.total_value).epsilon(1e-12));

  Assignment unknown = a;
  unknown.user_to_team["Q"] = "A+B";
  CHECK_THROWS_AS(assignment_value(unknown, m), Error);
}

TEST_CASE("team values require aligned columns") {
  const CandidateSet cs = enumerate_candidates(pool_of(4), 2);
  PreferenceMatrix m = split_values(cs, kFour);
  const auto v = team_values(m, cs);
  CHECK(v[cs.index_of("A+B")] == doctest::Approx(1.7).epsilon(1e-12));
  std::swap(m.teams[0], m.teams[1]);
  CHECK_THROWS_AS(team_values(m, cs), Error);
}
