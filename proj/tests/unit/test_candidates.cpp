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
#include <set>
#include <vector>

#include "doctest.h"
#include "teamforge/candidates.hpp"
#include "teamforge/simulate.hpp"

using namespace teamforge;

namespace {

std::vector<Participant> pool_of(std::initializer_list<const char*> ids) {
  std::vector<Participant> pool;
  for (const char* id : ids) pool.push_back(Participant{id, id, TraitVector{}});
  return pool;
}

std::map<std::string, std::size_t> coverage(const CandidateSet& cs) {
  std::map<std::string, std::size_t> count;
  for (const auto& t : cs.candidates) {
    for (const auto& m : t.members()) ++count[m];
  }
  return count;
}

std::vector<std::string> ids(const CandidateSet& cs) {
  std::vector<std::string> out;
  for (const auto& t : cs.candidates) out.push_back(t.team_id());
  return out;
}

}  // namespace

TEST_CASE("binomial") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(3, 4) == 0);
  CHECK(binomial(60, 30) == 118264581564861424ULL);
  CHECK(binomial(200, 100) == UINT64_MAX);
}

TEST_CASE("enumeration counts and order") {
  const auto pool = pool_of({"D", "B", "A", "C"});
  const CandidateSet pairs = enumerate_candidates(pool, 2);
  CHECK(ids(pairs) == std::vector<std::string>{"A+B", "A+C", "A+D", "B+C", "B+D", "C+D"});
  CHECK(pairs.pool_ids == std::vector<std::string>{"A", "B", "C", "D"});
  CHECK_NOTHROW(pairs.validate());

  const CandidateSet whole = enumerate_candidates(pool, 4);
  REQUIRE(whole.candidates.size() == 1);
  CHECK(whole.candidates[0].team_id() == "A+B+C+D");

  const auto six = pool_of({"a", "b", "c", "d", "e", "f"});
  CHECK(enumerate_candidates(six, 3).candidates.size() == 20);
}

TEST_CASE("enumeration errors") {
  const auto pool = pool_of({"a", "b", "c", "d"});
  CHECK_THROWS_AS(enumerate_candidates(pool, 5), Error);
  CHECK_THROWS_AS(enumerate_candidates(pool, 0), Error);
  try {
    enumerate_candidates(pool, 2, 5);
    FAIL("cap not enforced");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasible);
  }
}

TEST_CASE("arms_for") {
  const CandidateSet cs = enumerate_candidates(pool_of({"A", "B", "C", "D"}), 2);
  CHECK(arms_for("A", cs) == std::vector<std::string>{"A+B", "A+C", "A+D"});
  const CandidateSet whole = enumerate_candidates(pool_of({"A", "B", "C", "D"}), 4);
  for (const char* u : {"A", "B", "C", "D"}) CHECK(arms_for(u, whole).size() == 1);
  const CandidateSet triples =
      enumerate_candidates(pool_of({"a", "b", "c", "d", "e", "f"}), 3);
  for (const auto& u : triples.pool_ids) CHECK(arms_for(u, triples).size() == 10);
}

TEST_CASE("sampler: coverage 3 with pairs of four forces every pair") {
  const auto pool = pool_of({"A", "B", "C", "D"});
  const CandidateSet cs = sample_candidates(pool, 2, {6, 3, 11});
  auto got = ids(cs);
  std::sort(got.begin(), got.end());
  CHECK(got == ids(enumerate_candidates(pool, 2)));
}

TEST_CASE("sampler: minimal coverage is a perfect partition") {
  Rng rng = make_rng(5, "pool");
  const auto pool = random_pool(12, rng);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CandidateSet cs = sample_candidates(pool, 3, {4, 1, seed});
    CHECK(cs.candidates.size() == 4);
    for (const auto& [id, n] : coverage(cs)) CHECK(n == 1);
  }
}

TEST_CASE("sampler: deterministic and within bounds") {
  Rng rng = make_rng(9, "pool");
  const auto pool = random_pool(12, rng);
  const SamplingParams params{60, 8, 42};
  const CandidateSet a = sample_candidates(pool, 3, params);
  const CandidateSet b = sample_candidates(pool, 3, params);
  CHECK(ids(a) == ids(b));
  CHECK(a.candidates.size() <= 60);
  CHECK_NOTHROW(a.validate());
  std::set<std::string> distinct;
  for (const auto& t : a.candidates) distinct.insert(t.team_id());
  CHECK(distinct.size() == a.candidates.size());
  for (const auto& [id, n] : coverage(a)) CHECK(n >= 8);
  CHECK(coverage(a).size() == 12);

  const CandidateSet other = sample_candidates(pool, 3, {60, 8, 43});
  CHECK(ids(other) != ids(a));
}

TEST_CASE("sampler: property sweep") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng = make_rng(seed, "sweep");
    const std::size_t k = 2 + seed % 3;
    const std::size_t n = k + 1 + seed % 9;
    const std::size_t m_min = 1 + seed % 4;
    const auto pool = random_pool(n, rng);
    const std::uint64_t total = binomial(n, k);
    const std::size_t lower = (n * m_min + k - 1) / k;
    const std::size_t m_max = lower + seed % 7;
    // Each participant is in C(n-1, k-1) subsets; more coverage is impossible.
    const bool possible = binomial(n - 1, k - 1) >= m_min && total >= lower;
    CAPTURE(seed);
    try {
      const CandidateSet cs = sample_candidates(pool, k, {m_max, m_min, seed});
      CHECK(possible);
      CHECK(cs.candidates.size() <= m_max);
      CHECK_NOTHROW(cs.validate());
      for (const auto& [id, c] : coverage(cs)) CHECK(c >= m_min);
      CHECK(coverage(cs).size() == n);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInfeasible);
    }
  }
}

TEST_CASE("sampler: impossible coverage is reported") {
  const auto pool = pool_of({"A", "B", "C", "D"});
  // Each member is in only three pairs.
  try {
    sample_candidates(pool, 2, {8, 4, 1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasible);
  }
  // m_max below ceil(n * m_min / k).
  CHECK_THROWS_AS(sample_candidates(pool, 2, {5, 3, 1}), Error);
}

TEST_CASE("candidate set validation") {
  CandidateSet cs = enumerate_candidates(pool_of({"A", "B", "C", "D"}), 2);
  CHECK(cs.index_of("B+D") == 4);
  CHECK(cs.index_of("D+B") == CandidateSet::npos);
  CHECK(cs.team("C+D").members() == std::vector<std::string>{"C", "D"});

  CandidateSet dup = cs;
  dup.candidates.push_back(TeamComposition("other", {"A", "B"}));
  CHECK_THROWS_AS(dup.validate(), Error);

  CandidateSet uncovered = cs;
  uncovered.candidates = {cs.candidates[0]};  // A+B only
  CHECK_THROWS_AS(uncovered.validate(), Error);

  CandidateSet stranger = cs;
  stranger.candidates.push_back(TeamComposition::from_members({"A", "Z"}));
  CHECK_THROWS_AS(stranger.validate(), Error);

  CandidateSet wrong_size = cs;
  wrong_size.candidates.push_back(TeamComposition::from_members({"A", "B", "C"}));
  CHECK_THROWS_AS(wrong_size.validate(), Error);
}
