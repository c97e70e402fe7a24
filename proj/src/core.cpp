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

#include "teamforge/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace teamforge {

namespace {

constexpr const char* kTraitNames[kTraitCount] = {
    "openness", "conscientiousness", "extraversion", "agreeableness",
    "neuroticism"};

}  // namespace

void TraitVector::validate() const {
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      fail(ErrorKind::kInvalidArgument,
           std::string(kTraitNames[i]) + " must be a finite value in [0, 1]");
    }
  }
}

TeamComposition::TeamComposition(std::string team_id,
                                 std::vector<std::string> member_ids)
    : team_id_(std::move(team_id)), members_(std::move(member_ids)) {
  std::sort(members_.begin(), members_.end());
  require(!members_.empty(), "team " + team_id_ + " has no members");
  require(std::adjacent_find(members_.begin(), members_.end()) ==
              members_.end(),
          "team " + team_id_ + " lists a member twice");
}

TeamComposition TeamComposition::from_members(
    std::vector<std::string> member_ids) {
  std::sort(member_ids.begin(), member_ids.end());
  std::string id = canonical_id(member_ids);
  return TeamComposition(std::move(id), std::move(member_ids));
}

std::string TeamComposition::canonical_id(
    std::span<const std::string> sorted_members) {
  std::string id;
  for (const auto& m : sorted_members) {
    if (!id.empty()) id += '+';
    id += m;
  }
  return id;
}

bool TeamComposition::contains(std::string_view participant_id) const {
  return std::binary_search(members_.begin(), members_.end(), participant_id);
}

std::size_t TeamCompositionHash::operator()(
    const TeamComposition& team) const noexcept {
  std::size_t h = 0;
  for (const auto& m : team.members()) {
    h ^= std::hash<std::string>{}(m) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
  }
  return h;
}

double affinity(const TraitVector& a, const TraitVector& b) {
  a.validate();
  b.validate();
  double squared = 0.0;
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    const double d = a.values[i] - b.values[i];
    squared += d * d;
  }
  const double value = 1.0 - std::sqrt(squared) / std::sqrt(5.0);
  return std::clamp(value, 0.0, 1.0);
}

double complementarity(std::span<const TraitVector> members) {
  require(!members.empty(), "complementarity needs at least one member");
  for (const auto& m : members) m.validate();
  const double n = static_cast<double>(members.size());
  double spread = 0.0;
  for (std::size_t dim = 0; dim < kTraitCount; ++dim) {
    double mean = 0.0;
    for (const auto& m : members) mean += m.values[dim];
    mean /= n;
    double var = 0.0;
    for (const auto& m : members) {
      const double d = m.values[dim] - mean;
      var += d * d;
    }
    spread += std::sqrt(var / n);
  }
  const double value = (spread / static_cast<double>(kTraitCount)) / 0.5;
  return std::clamp(value, 0.0, 1.0);
}

void validate_pool(std::span<const Participant> pool) {
  std::unordered_set<std::string_view> seen;
  for (const auto& p : pool) {
    require(!p.id.empty(), "participant id must not be empty");
    require(p.id.find('+') == std::string::npos,
            "participant id '" + p.id + "' must not contain '+'");
    require(seen.insert(p.id).second, "duplicate participant id '" + p.id + "'");
    try {
      p.traits.validate();
    } catch (const Error& e) {
      fail(ErrorKind::kInvalidArgument,
           "participant '" + p.id + "': " + e.what());
    }
  }
}

const Participant& find_participant(std::span<const Participant> pool,
                                    std::string_view id) {
  for (const auto& p : pool) {
    if (p.id == id) return p;
  }
  fail(ErrorKind::kNotFound, "unknown participant '" + std::string(id) + "'");
}

}  // namespace teamforge
