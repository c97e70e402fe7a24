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

// JSON encodings of the domain types. Field names here are the on-disk and
// on-the-wire formats.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "teamforge/bandit.hpp"
#include "teamforge/candidates.hpp"
#include "teamforge/core.hpp"
#include "teamforge/matching.hpp"
#include "teamforge/simulate.hpp"

namespace teamforge {

using Json = nlohmann::json;

void to_json(Json& j, const TraitVector& traits);
void from_json(const Json& j, TraitVector& traits);

// {"id": string, "name": string, "traits": [o, c, e, a, n]}
void to_json(Json& j, const Participant& participant);
void from_json(const Json& j, Participant& participant);

// Array of participants; validated.
std::vector<Participant> parse_pool(const Json& j);
std::vector<Participant> load_pool(const std::filesystem::path& path);

// {"team_size": k, "candidates": [{"team_id": ..., "members": [...]}]}
Json to_json(const CandidateSet& cs);
CandidateSet candidate_set_from_json(const Json& j);

Json to_json(const BanditState& state);
BanditState bandit_state_from_json(const Json& j);

// {"solver", "teams": [{"team_id", "members"}], "total_value",
//  "prior_fraction"}
Json to_json(const Assignment& assignment);
Assignment assignment_from_json(const Json& j);

Json to_json(const EpisodeConfig& config);
// Missing keys keep the defaults of `base`.
EpisodeConfig episode_config_from_json(const Json& j, EpisodeConfig base = {});

Json to_json(const EpisodeReport& report);

// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string content_hash(const Json& j);

}  // namespace teamforge
