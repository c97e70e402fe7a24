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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teamforge/error.hpp"

namespace teamforge {

inline constexpr std::size_t kTraitCount = 5;

// Big Five profile. Component order is fixed and is also the order used in
// pool files: openness, conscientiousness, extraversion, agreeableness,
// neuroticism. Each component is a normalized score in [0, 1].
struct TraitVector {
  std::array<double, kTraitCount> values{};

  double openness() const { return values[0]; }
  double conscientiousness() const { return values[1]; }
  double extraversion() const { return values[2]; }
  double agreeableness() const { return values[3]; }
  double neuroticism() const { return values[4]; }

  // Throws Error(kInvalidArgument) on a non-finite or out-of-range component.
  void validate() const;

  friend bool operator==(const TraitVector&, const TraitVector&) = default;
};

struct Participant {
  std::string id;
  std::string display_name;
  TraitVector traits;

  friend bool operator==(const Participant&, const Participant&) = default;
};

// One candidate team, i.e. one bandit arm. `members` is kept sorted; two
// compositions with the same member set are the same arm regardless of id.
class TeamComposition {
 public:
  TeamComposition() = default;
  TeamComposition(std::string team_id, std::vector<std::string> member_ids);

  // Builds a composition whose id is the canonical id of its member set.
  static TeamComposition from_members(std::vector<std::string> member_ids);
  static std::string canonical_id(std::span<const std::string> sorted_members);

  const std::string& team_id() const { return team_id_; }
  const std::vector<std::string>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(std::string_view participant_id) const;

  // Set identity: ids are ignored.
  friend bool operator==(const TeamComposition& a, const TeamComposition& b) {
    return a.members_ == b.members_;
  }

 private:
  std::string team_id_;
  std::vector<std::string> members_;
};

struct TeamCompositionHash {
  std::size_t operator()(const TeamComposition& team) const noexcept;
};

struct Feedback {
  std::string participant_id;
  std::string team_id;
  double reward = 0.0;
  std::uint64_t round = 0;
  std::int64_t timestamp_ms = 0;
};

// 1 - ||a - b|| / sqrt(5); symmetric, 1 for identical profiles.
double affinity(const TraitVector& a, const TraitVector& b);

// Mean per-dimension population standard deviation, divided by 0.5 and
// clamped to [0, 1]. Zero for a single member.
double complementarity(std::span<const TraitVector> members);

// Rejects empty ids, ids containing '+' (reserved for team ids) and
// duplicates; validates every trait vector.
void validate_pool(std::span<const Participant> pool);

const Participant& find_participant(std::span<const Participant> pool,
                                    std::string_view id);

}  // namespace teamforge
