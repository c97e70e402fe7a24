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

#include "teamforge/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace teamforge {

namespace {

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    out = it->get<T>();
  }
}

const char* generator_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kAuto:
      return "auto";
    case GeneratorKind::kEnumerate:
      return "enumerate";
    case GeneratorKind::kSample:
      return "sample";
  }
  return "auto";
}

GeneratorKind parse_generator(const std::string& text) {
  if (text == "auto") return GeneratorKind::kAuto;
  if (text == "enumerate") return GeneratorKind::kEnumerate;
  if (text == "sample") return GeneratorKind::kSample;
  fail(ErrorKind::kInvalidArgument, "unknown generator '" + text + "'");
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

void to_json(Json& j, const TraitVector& traits) {
  j = Json::array();
  for (double v : traits.values) j.push_back(v);
}

void from_json(const Json& j, TraitVector& traits) {
  require(j.is_array() && j.size() == kTraitCount,
          "traits must be an array of 5 numbers [o, c, e, a, n]");
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    require(j[i].is_number(), "traits must be numbers");
    traits.values[i] = j[i].get<double>();
  }
}

void to_json(Json& j, const Participant& participant) {
  j = Json{{"id", participant.id},
           {"name", participant.display_name},
           {"traits", participant.traits}};
}

void from_json(const Json& j, Participant& participant) {
  require(j.is_object(), "participant must be an object");
  require(j.contains("id") && j["id"].is_string(), "participant needs a string id");
  require(j.contains("traits"), "participant needs traits");
  participant.id = j["id"].get<std::string>();
  participant.display_name =
      j.contains("name") ? j["name"].get<std::string>() : participant.id;
  participant.traits = j["traits"].get<TraitVector>();
}

std::vector<Participant> parse_pool(const Json& j) {
  require(j.is_array(), "participant pool must be a JSON array");
  std::vector<Participant> pool;
  for (const auto& item : j) pool.push_back(item.get<Participant>());
  validate_pool(pool);
  return pool;
}

std::vector<Participant> load_pool(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::kInvalidArgument, "cannot read pool file " + path.string());
  }
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    fail(ErrorKind::kInvalidArgument,
         "pool file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_pool(j);
}

Json to_json(const CandidateSet& cs) {
  Json candidates = Json::array();
  for (const auto& team : cs.candidates) {
    candidates.push_back({{"team_id", team.team_id()}, {"members", team.members()}});
  }
  return Json{{"team_size", cs.team_size}, {"candidates", std::move(candidates)}};
}

CandidateSet candidate_set_from_json(const Json& j) {
  CandidateSet cs;
  cs.team_size = j.at("team_size").get<std::size_t>();
  std::vector<std::string> ids;
  for (const auto& item : j.at("candidates")) {
    TeamComposition team(item.at("team_id").get<std::string>(),
                         item.at("members").get<std::vector<std::string>>());
    for (const auto& m : team.members()) ids.push_back(m);
    cs.candidates.push_back(std::move(team));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  cs.pool_ids = std::move(ids);
  cs.validate();
  return cs;
}

struct BanditStateCodec {
  static Json encode(const BanditState& state) {
    Json users = Json::array();
    for (const auto& user : state.users_) {
      Json arms = Json::array();
      for (std::size_t a = 0; a < user.team_ids.size(); ++a) {
        arms.push_back({{"team_id", user.team_ids[a]},
                        {"pulls", user.pulls[a]},
                        {"sum_reward", user.sums[a]}});
      }
      users.push_back({{"id", user.id},
                       {"rounds", user.rounds},
                       {"arms", std::move(arms)},
                       {"leaders", user.leaders}});
    }
    return Json{{"exploration", state.config_.exploration},
                {"batch", state.config_.batch},
                {"users", std::move(users)}};
  }

  static BanditState decode(const Json& j) {
    BanditConfig config{j.at("exploration").get<double>(),
                        j.at("batch").get<std::size_t>()};
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> arms;
    for (const auto& user : j.at("users")) {
      ids.push_back(user.at("id").get<std::string>());
      auto& list = arms.emplace_back();
      for (const auto& arm : user.at("arms")) {
        list.push_back(arm.at("team_id").get<std::string>());
      }
    }
    BanditState state(std::move(ids), std::move(arms), config);
    std::size_t u = 0;
    for (const auto& user : j.at("users")) {
      auto& slot = state.users_[u++];
      std::uint64_t total = 0;
      std::size_t a = 0;
      for (const auto& arm : user.at("arms")) {
        slot.pulls[a] = arm.at("pulls").get<std::uint32_t>();
        slot.sums[a] = arm.at("sum_reward").get<double>();
        total += slot.pulls[a];
        ++a;
      }
      slot.rounds = user.at("rounds").get<std::uint64_t>();
      slot.leaders = user.at("leaders").get<std::vector<std::int32_t>>();
      if (total != slot.rounds || slot.leaders.size() != slot.rounds) {
        fail(ErrorKind::kCorrupt,
             "bandit state for " + slot.id + " has inconsistent round counts");
      }
    }
    return state;
  }
};

Json to_json(const BanditState& state) {
  return BanditStateCodec::encode(state);
}

BanditState bandit_state_from_json(const Json& j) {
  return BanditStateCodec::decode(j);
}

Json to_json(const Assignment& assignment) {
  std::map<std::string, std::vector<std::string>> members;
  for (const auto& id : assignment.team_ids) members[id];
  for (const auto& [user, team] : assignment.user_to_team) {
    members[team].push_back(user);
  }
  Json teams = Json::array();
  for (const auto& id : assignment.team_ids) {
    teams.push_back({{"team_id", id}, {"members", members[id]}});
  }
  return Json{{"solver", to_string(assignment.solver)},
              {"teams", std::move(teams)},
              {"total_value", assignment.total_value},
              {"prior_fraction", assignment.prior_fraction}};
}

Assignment assignment_from_json(const Json& j) {
  Assignment a;
  const auto solver = j.at("solver").get<std::string>();
  require(solver == "exact" || solver == "greedy",
          "unknown solver '" + solver + "'");
  a.solver = solver == "exact" ? SolverKind::kExact : SolverKind::kGreedy;
  for (const auto& team : j.at("teams")) {
    const auto id = team.at("team_id").get<std::string>();
    a.team_ids.push_back(id);
    for (const auto& m : team.at("members")) {
      a.user_to_team[m.get<std::string>()] = id;
    }
  }
  a.total_value = j.at("total_value").get<double>();
  a.prior_fraction = j.at("prior_fraction").get<double>();
  return a;
}

Json to_json(const EpisodeConfig& c) {
  Json j{{"participants", c.pool.empty() ? c.participants : c.pool.size()},
         {"team_size", c.team_size},
         {"generator", generator_name(c.generator)},
         {"enumeration_cap", c.enumeration_cap},
         {"sample_max", c.sample_max},
         {"sample_min", c.sample_min},
         {"exploration", c.bandit.exploration},
         {"batch", c.bandit.batch},
         {"rounds", c.rounds},
         {"prior", c.prior},
         {"utility", c.utility == UtilityKind::kTraits ? "traits" : "planted"},
         {"w_sim", c.model.w_sim},
         {"w_comp", c.model.w_comp},
         {"noise_sigma", c.model.noise_sigma},
         {"reward", c.model.reward == RewardKind::kGaussian ? "gaussian"
                                                              : "bernoulli"},
         {"planted_gap", c.planted_gap}};
  if (!c.pool.empty()) j["pool"] = c.pool;
  return j;
}

EpisodeConfig episode_config_from_json(const Json& j, EpisodeConfig c) {
  require(j.is_object(), "configuration must be a JSON object");
  try {
    if (j.contains("pool")) c.pool = parse_pool(j["pool"]);
    read_if(j, "participants", c.participants);
    read_if(j, "team_size", c.team_size);
    if (j.contains("generator")) {
      c.generator = parse_generator(j["generator"].get<std::string>());
    }
    read_if(j, "enumeration_cap", c.enumeration_cap);
    read_if(j, "sample_max", c.sample_max);
    read_if(j, "sample_min", c.sample_min);
    read_if(j, "exploration", c.bandit.exploration);
    read_if(j, "batch", c.bandit.batch);
    read_if(j, "rounds", c.rounds);
    read_if(j, "prior", c.prior);
    if (j.contains("utility")) {
      const auto u = j["utility"].get<std::string>();
      require(u == "traits" || u == "planted", "unknown utility '" + u + "'");
      c.utility = u == "traits" ? UtilityKind::kTraits : UtilityKind::kPlanted;
    }
    read_if(j, "w_sim", c.model.w_sim);
    read_if(j, "w_comp", c.model.w_comp);
    read_if(j, "noise_sigma", c.model.noise_sigma);
    if (j.contains("reward")) {
      const auto r = j["reward"].get<std::string>();
      require(r == "gaussian" || r == "bernoulli", "unknown reward '" + r + "'");
      c.model.reward =
          r == "gaussian" ? RewardKind::kGaussian : RewardKind::kBernoulli;
    }
    read_if(j, "planted_gap", c.planted_gap);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kInvalidArgument,
         std::string("malformed configuration: ") + e.what());
  }
  return c;
}

Json to_json(const EpisodeReport& r) {
  Json regret = Json::array();
  for (const auto& seq : r.cumulative_regret) regret.push_back(seq);
  Json hits = Json::array();
  for (bool h : r.best_arm_hit) hits.push_back(h);
  const RegretWindows windows = regret_windows(r);
  return Json{{"mode", r.mode},
              {"seed", r.seed},
              {"config", to_json(r.config)},
              {"candidate_count", r.candidate_count},
              {"users", r.users},
              {"cumulative_regret", std::move(regret)},
              {"best_arm_hit", std::move(hits)},
              {"best_arm_hit_rate", best_arm_hit_rate(r)},
              {"regret_early", windows.early},
              {"regret_late", windows.late},
              {"teams", r.teams},
              {"assignment_utility", r.assignment_utility},
              {"oracle_utility", r.oracle_utility},
              {"alignment_ratio", r.alignment_ratio},
              {"prior_fraction", r.prior_fraction},
              {"random_utility", optional_number(r.random_utility)},
              {"self_assembled_utility",
               optional_number(r.self_assembled_utility)}};
}

std::string content_hash(const Json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace teamforge
