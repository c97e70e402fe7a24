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
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teamforge/candidates.hpp"
#include "teamforge/core.hpp"

namespace teamforge {

struct BanditConfig {
  double exploration = std::numbers::sqrt2;  // c
  std::size_t batch = 3;                     // B

  friend bool operator==(const BanditConfig&, const BanditConfig&) = default;
};

struct ArmStats {
  std::uint64_t pulls = 0;
  double sum_reward = 0.0;

  // Unset for an arm that has never been pulled.
  std::optional<double> mean_reward() const {
    if (pulls == 0) return std::nullopt;
    return sum_reward / static_cast<double>(pulls);
  }
};

// UCB1: mean + c * sqrt(ln t / n), +inf for an unpulled arm.
double ucb_index(const ArmStats& stats, std::uint64_t rounds, double exploration);

// Per-user UCB1 bandits. Each user owns an independent bandit whose arms are
// the candidate teams containing that user. Mutation must be serialized by
// the caller; const access is safe from several threads between updates.
class BanditState {
 public:
  BanditState() = default;
  // `arms_by_user[i]` lists the arm ids of `users[i]`.
  BanditState(std::vector<std::string> users,
              std::vector<std::vector<std::string>> arms_by_user,
              BanditConfig config);

  static BanditState for_candidates(const CandidateSet& cs,
                                    BanditConfig config = {});

  const BanditConfig& config() const { return config_; }
  std::size_t user_count() const { return users_.size(); }
  const std::string& user_id(std::size_t u) const { return users_[u].id; }
  // Throws Error(kNotFound).
  std::size_t user_index(std::string_view user_id) const;
  bool has_user(std::string_view user_id) const;

  std::span<const std::string> arms(std::size_t u) const {
    return users_[u].team_ids;
  }
  std::span<const double> sums(std::size_t u) const { return users_[u].sums; }
  std::span<const std::uint32_t> pulls(std::size_t u) const {
    return users_[u].pulls;
  }
  // Throws Error(kNotFound) for an arm the user does not have.
  std::size_t arm_index(std::size_t u, std::string_view team_id) const;
  ArmStats stats(std::size_t u, std::size_t arm) const;

  // Total feedback events from the user (t_u).
  std::uint64_t rounds(std::size_t u) const { return users_[u].rounds; }

  // Arm with the highest empirical mean among pulled arms; ties go to the
  // lexicographically smallest team id. Unset before the first pull.
  std::optional<std::size_t> leader(std::size_t u) const;
  // Leader after each feedback event, oldest first.
  std::span<const std::int32_t> leader_history(std::size_t u) const {
    return users_[u].leaders;
  }

  // Applies one observation. Throws Error(kInvalidArgument) for a reward
  // outside [0, 1] and Error(kNotFound) for an unknown user or arm.
  void record(const Feedback& feedback);
  void record(std::size_t u, std::size_t arm, double reward);

  friend bool operator==(const BanditState&, const BanditState&) = default;

 private:
  struct UserArms {
    std::string id;
    std::vector<std::string> team_ids;
    std::vector<std::uint32_t> pulls;
    std::vector<double> sums;
    std::uint64_t rounds = 0;
    std::vector<std::int32_t> leaders;

    friend bool operator==(const UserArms&, const UserArms&) = default;
  };

  std::optional<std::size_t> compute_leader(const UserArms& user) const;

  BanditConfig config_;
  std::vector<UserArms> users_;

  friend struct BanditStateCodec;
};

// Top-B arms by UCB index; ties by fewer pulls, then team id.
std::vector<std::string> select_recommendations(const BanditState& state,
                                                std::string_view user_id);

// Arm indices of the top-B recommendations for user index `u`.
std::vector<std::size_t> recommend_arms(const BanditState& state,
                                        std::size_t u);

void update(BanditState& state, const Feedback& feedback);

// True iff the user's leader was the same arm after each of their last
// `window` feedback events and the gap between the two best empirical means
// is at least `epsilon`. A single-arm user only needs `window` events.
bool has_converged(const BanditState& state, std::string_view user_id,
                   std::size_t window, double epsilon);

enum class CellSource : std::uint8_t { kInvalid, kPrior, kObserved };

inline constexpr double kDefaultPrior = 0.5;

// Users x candidate teams. Cells where the user is not a member of the team
// are kInvalid and never enter an objective.
struct PreferenceMatrix {
  std::vector<std::string> users;
  std::vector<std::string> teams;
  std::vector<double> scores;       // row-major, users x teams
  std::vector<CellSource> sources;  // same layout

  double score(std::size_t u, std::size_t t) const {
    return scores[u * teams.size() + t];
  }
  CellSource source(std::size_t u, std::size_t t) const {
    return sources[u * teams.size() + t];
  }
  std::size_t user_index(std::string_view id) const;  // npos if absent
  std::size_t team_index(std::string_view id) const;  // npos if absent

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

PreferenceMatrix preference_matrix(const BanditState& state,
                                   const CandidateSet& cs,
                                   double prior = kDefaultPrior);

// Rows are users, columns team ids; prior cells carry a trailing '*' and
// invalid cells are empty.
std::string to_csv(const PreferenceMatrix& matrix);

}  // namespace teamforge
