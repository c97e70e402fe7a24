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
#include <fstream>
#include <random>

#include "doctest.h"
#include "teamforge/serialize.hpp"

using namespace teamforge;

namespace {

std::vector<Participant> sample_pool(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, "serialize");
  return random_pool(n, rng);
}

}  // namespace

TEST_CASE("participant json") {
  const Participant p{"ada", "Ada L.", TraitVector{{0.1, 0.2, 0.3, 0.4, 0.5}}};
  const Json j = p;
  CHECK(j.dump() == R"({"id":"ada","name":"Ada L.","traits":[0.1,0.2,0.3,0.4,0.5]})");
  CHECK(j.get<Participant>() == p);

  const Json no_name = Json::parse(R"({"id":"x","traits":[0,0,0,0,1]})");
  CHECK(no_name.get<Participant>().display_name == "x");
}

TEST_CASE("pool parsing rejects bad input") {
  CHECK_THROWS_AS(parse_pool(Json::object()), Error);
  CHECK_THROWS_AS(parse_pool(Json::parse(R"([{"id":"a","traits":[0,0,0,0]}])")), Error);
  CHECK_THROWS_AS(parse_pool(Json::parse(R"([{"id":"a","traits":[0,0,0,0,1.5]}])")), Error);
  CHECK_THROWS_AS(parse_pool(Json::parse(R"([{"id":"a","traits":[0,0,0,0,"x"]}])")), Error);
  CHECK_THROWS_AS(parse_pool(Json::parse(
                      R"([{"id":"a","traits":[0,0,0,0,0]},{"id":"a","traits":[0,0,0,0,0]}])")),
                  Error);
  CHECK_THROWS_AS(parse_pool(Json::parse(R"([{"traits":[0,0,0,0,0]}])")), Error);
}

TEST_CASE("pool file round trip") {
  const auto pool = sample_pool(7, 1);
  const auto path = std::filesystem::temp_directory_path() / "teamforge_pool_test.json";
  {
    std::ofstream out(path);
    out << Json(pool).dump(2);
  }
  CHECK(load_pool(path) == pool);
  {
    std::ofstream out(path);
    out << "[{";
  }
  CHECK_THROWS_AS(load_pool(path), Error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_pool(path), Error);
}

TEST_CASE("candidate set round trip") {
  const auto pool = sample_pool(9, 2);
  const CandidateSet cs = sample_candidates(pool, 3, {20, 4, 5});
  const CandidateSet back = candidate_set_from_json(Json::parse(to_json(cs).dump()));
  CHECK(back.team_size == cs.team_size);
  CHECK(back.pool_ids == cs.pool_ids);
  REQUIRE(back.candidates.size() == cs.candidates.size());
  for (std::size_t i = 0; i < cs.candidates.size(); ++i) {
    CHECK(back.candidates[i].team_id() == cs.candidates[i].team_id());
    CHECK(back.candidates[i] == cs.candidates[i]);
  }
  Json broken = to_json(cs);
  broken["candidates"].push_back(broken["candidates"][0]);
  CHECK_THROWS_AS(candidate_set_from_json(broken), Error);
}

TEST_CASE("bandit state round trip") {
  const auto pool = sample_pool(6, 3);
  const CandidateSet cs = enumerate_candidates(pool, 2);
  BanditState s = BanditState::for_candidates(cs, {0.7, 2});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::size_t u = rng() % s.user_count();
    s.record(u, recommend_arms(s, u).front(), unit(rng));
  }
  const Json j = to_json(s);
  const BanditState back = bandit_state_from_json(Json::parse(j.dump()));
  CHECK(back == s);
  CHECK(to_json(back) == j);

  Json corrupt = j;
  corrupt["users"][0]["rounds"] = corrupt["users"][0]["rounds"].get<int>() + 1;
  try {
    bandit_state_from_json(corrupt);
    FAIL("expected corrupt");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCorrupt);
  }
}

TEST_CASE("assignment round trip") {
  Assignment a;
  a.solver = SolverKind::kGreedy;
  a.team_ids = {"a+b", "c+d"};
  a.user_to_team = {{"a", "a+b"}, {"b", "a+b"}, {"c", "c+d"}, {"d", "c+d"}};
  a.total_value = 2.125;
  a.prior_fraction = 0.25;
  const Json j = to_json(a);
  CHECK(j.dump() ==
        R"({"prior_fraction":0.25,"solver":"greedy","teams":[{"members":["a","b"],"team_id":"a+b"},{"members":["c","d"],"team_id":"c+d"}],"total_value":2.125})");
  const Assignment back = assignment_from_json(j);
  CHECK(back.solver == a.solver);
  CHECK(back.team_ids == a.team_ids);
  CHECK(back.user_to_team == a.user_to_team);
  CHECK(back.total_value == a.total_value);
  CHECK(back.prior_fraction == a.prior_fraction);

  Json bad = j;
  bad["solver"] = "magic";
  CHECK_THROWS_AS(assignment_from_json(bad), Error);
}

TEST_CASE("episode config round trip and overrides") {
  EpisodeConfig c;
  c.pool = sample_pool(4, 4);
  c.team_size = 2;
  c.rounds = 333;
  c.generator = GeneratorKind::kSample;
  c.sample_max = 12;
  c.sample_min = 2;
  c.utility = UtilityKind::kPlanted;
  c.planted_gap = 0.3;
  c.model = {0.2, 0.8, 0.05, RewardKind::kBernoulli};
  c.bandit = {0.9, 2};
  const Json j = to_json(c);
  const EpisodeConfig back = episode_config_from_json(Json::parse(j.dump()));
  CHECK(to_json(back) == j);
  CHECK(back.pool == c.pool);
  CHECK(back.model.reward == RewardKind::kBernoulli);

  EpisodeConfig base;
  base.rounds = 77;
  const EpisodeConfig partial =
      episode_config_from_json(Json::parse(R"({"team_size": 3, "noise_sigma": 0.0})"), base);
  CHECK(partial.rounds == 77);
  CHECK(partial.team_size == 3);
  CHECK(partial.model.noise_sigma == 0.0);
  CHECK_THROWS_AS(episode_config_from_json(Json::parse(R"({"generator": "psychic"})")), Error);
}

TEST_CASE("episode report json") {
  EpisodeConfig c;
  c.participants = 6;
  c.team_size = 3;
  c.rounds = 30;
  const EpisodeReport r = run_episode(c, 12);
  const Json j = to_json(r);
  CHECK(j.at("seed") == 12);
  CHECK(j.at("mode") == "bandit");
  CHECK(j.at("alignment_ratio").get<double>() == r.alignment_ratio);
  CHECK(j.at("cumulative_regret").size() == 6);
  CHECK(j.at("teams").size() == 2);
  CHECK(j.at("config").at("rounds") == 30);
  CHECK(j.contains("regret_early"));
  CHECK(j.contains("best_arm_hit_rate"));
}

TEST_CASE("content hash") {
  // FNV-1a 64 of the compact dump.
  CHECK(content_hash(Json::parse(R"({"b":[true,null],"a":1})")) == "595cf28929e773ea");
  CHECK(content_hash(Json::object()) != content_hash(Json::array()));
}
