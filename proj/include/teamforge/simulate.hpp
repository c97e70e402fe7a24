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
#include <optional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teamforge/bandit.hpp"
#include "teamforge/candidates.hpp"
#include "teamforge/core.hpp"
#include "teamforge/matching.hpp"

namespace teamforge {

using Rng = std::mt19937_64;

// Independent generator for one (seed, purpose) pair.
Rng make_rng(std::uint64_t seed, std::string_view stream);

enum class RewardKind { kGaussian, kBernoulli };

// Ground-truth preference functional of a simulated participant:
//   w_sim * mean affinity to teammates + w_comp * team complementarity.
struct SyntheticUserModel {
  double w_sim = 0.5;
  double w_comp = 0.5;
  double noise_sigma = 0.1;
  RewardKind reward = RewardKind::kGaussian;

  void validate() const;
};

double true_utility(const Participant& user, const TeamComposition& team,
                    std::span<const Participant> pool,
                    const SyntheticUserModel& model);

// Gaussian: utility + N(0, sigma) clamped to [0, 1]; sigma == 0 returns the
// utility and draws nothing. Bernoulli: 1 with probability `utility`.
double draw_reward(double utility, const SyntheticUserModel& model, Rng& rng);

double draw_reward(const Participant& user, const TeamComposition& team,
                   std::span<const Participant> pool,
                   const SyntheticUserModel& model, Rng& rng);

// True utility of every (member, candidate) cell; non-member cells are
// kInvalid. Rows follow cs.pool_ids.
PreferenceMatrix true_utility_matrix(std::span<const Participant> pool,
                                     const CandidateSet& cs,
                                     const SyntheticUserModel& model);

// Arm means with a planted best arm: best ~ U[0.7, 0.9], every other arm
// ~ U[0.1, best - gap]. Returns means and the index of the best arm.
std::vector<double> planted_arm_means(std::size_t arms, double gap, Rng& rng,
                                      std::size_t* best_index = nullptr);

// Per-user planted utilities over each user's arms, rows follow cs.pool_ids.
PreferenceMatrix planted_utility_matrix(const CandidateSet& cs, double gap,
                                        Rng& rng);

// Uniform random Big Five pool with ids p01, p02, ...
std::vector<Participant> random_pool(std::size_t n, Rng& rng);

inline constexpr std::size_t kMaxOraclePool = 12;

// Brute-force best partition: include/exclude recursion over candidates in
// index order. Shares no code with the dynamic-programming solver. Returns
// nullopt when no partition exists; throws above kMaxOraclePool members.
std::optional<PartitionChoice> enumerate_best_partition(
    const CandidateSet& cs, std::span<const double> values);

PartitionChoice oracle_best_partition(std::span<const Participant> pool,
                                      const CandidateSet& cs,
                                      const SyntheticUserModel& model);

enum class GeneratorKind { kAuto, kEnumerate, kSample };
enum class UtilityKind { kTraits, kPlanted };
enum class BaselineMode { kRandom, kSelfAssembled, kBandit };

struct EpisodeConfig {
  std::vector<Participant> pool;  // when empty, `participants` are generated
  std::size_t participants = 0;
  std::size_t team_size = 2;

  GeneratorKind generator = GeneratorKind::kAuto;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::size_t sample_max = 0;  // 0: 4 * ceil(n * sample_min / k)
  std::size_t sample_min = 3;

  BanditConfig bandit;
  std::size_t rounds = 100;
  double prior = kDefaultPrior;

  UtilityKind utility = UtilityKind::kTraits;
  SyntheticUserModel model;
  double planted_gap = 0.2;

  void validate() const;
};

struct EpisodeReport {
  std::string mode;
  std::uint64_t seed = 0;
  EpisodeConfig config;
  std::size_t candidate_count = 0;
  std::vector<std::string> users;
  // Per user, cumulative regret after each round (bandit mode only).
  std::vector<std::vector<double>> cumulative_regret;
  std::vector<bool> best_arm_hit;  // bandit mode only
  std::vector<std::vector<std::string>> teams;  // final partition
  double assignment_utility = 0.0;
  double oracle_utility = 0.0;
  double alignment_ratio = 0.0;
  double prior_fraction = 0.0;
  std::optional<double> random_utility;
  std::optional<double> self_assembled_utility;
};

// The full pipeline on simulated users: round-robin recommendation and
// top-1 feedback, then preference matrix, exact (or greedy above 24) solve,
// and comparison against the oracle partition.
EpisodeReport run_episode(const EpisodeConfig& config, std::uint64_t seed);

EpisodeReport run_baseline(BaselineMode mode, const EpisodeConfig& config,
                           std::uint64_t seed);

// Mean per-round regret over the first and final `fraction` of rounds,
// averaged over users.
struct RegretWindows {
  double early = 0.0;
  double late = 0.0;
};
RegretWindows regret_windows(const EpisodeReport& report, double fraction = 0.1);

double best_arm_hit_rate(const EpisodeReport& report);

// Single-user bandit on planted arms, used for best-arm identification.
struct ArmBenchmarkConfig {
  std::size_t arms = 10;
  std::size_t pulls = 2000;
  double gap = 0.2;
  double exploration = std::numbers::sqrt2;
  SyntheticUserModel model{1.0, 0.0, 0.1, RewardKind::kBernoulli};
};

struct ArmBenchmarkResult {
  std::vector<double> means;
  std::size_t best_arm = 0;
  std::size_t leader = 0;
  bool hit = false;
  std::vector<double> cumulative_regret;
};

ArmBenchmarkResult run_arm_benchmark(const ArmBenchmarkConfig& config,
                                     std::uint64_t seed);

const char* to_string(BaselineMode mode);
BaselineMode parse_baseline_mode(std::string_view text);

}  // namespace teamforge
