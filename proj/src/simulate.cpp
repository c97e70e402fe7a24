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

#include "teamforge/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "teamforge/kernels.hpp"

namespace teamforge {

namespace {

std::uint32_t fnv1a32(std::string_view text) {
  std::uint32_t h = 2166136261u;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 16777619u;
  }
  return h;
}

std::vector<TraitVector> member_traits(const TeamComposition& team,
                                       std::span<const Participant> pool) {
  std::vector<TraitVector> traits;
  traits.reserve(team.size());
  for (const auto& m : team.members()) {
    traits.push_back(find_participant(pool, m).traits);
  }
  return traits;
}

std::vector<Participant> resolve_pool(const EpisodeConfig& config,
                                      std::uint64_t seed) {
  std::vector<Participant> pool = config.pool;
  if (pool.empty()) {
    Rng rng = make_rng(seed, "pool");
    pool = random_pool(config.participants, rng);
  }
  validate_pool(pool);
  std::sort(pool.begin(), pool.end(),
            [](const Participant& a, const Participant& b) { return a.id < b.id; });
  return pool;
}

CandidateSet build_candidates(const EpisodeConfig& config,
                              std::span<const Participant> pool,
                              std::uint64_t seed) {
  const std::size_t n = pool.size();
  const std::size_t k = config.team_size;
  require(k >= 1 && k <= n, "team size must be between 1 and " +
                                std::to_string(n));
  const bool enumerate =
      config.generator == GeneratorKind::kEnumerate ||
      (config.generator == GeneratorKind::kAuto &&
       binomial(n, k) <= config.enumeration_cap);
  if (enumerate) return enumerate_candidates(pool, k, config.enumeration_cap);
  SamplingParams params;
  params.min_per_user = config.sample_min;
  params.max_candidates = config.sample_max != 0
                              ? config.sample_max
                              : 4 * ((n * config.sample_min + k - 1) / k);
  params.seed = make_rng(seed, "candidates")();
  return sample_candidates(pool, k, params);
}

PreferenceMatrix build_truth(const EpisodeConfig& config,
                             std::span<const Participant> pool,
                             const CandidateSet& cs, std::uint64_t seed) {
  if (config.utility == UtilityKind::kPlanted) {
    Rng rng = make_rng(seed, "planted");
    return planted_utility_matrix(cs, config.planted_gap, rng);
  }
  return true_utility_matrix(pool, cs, config.model);
}

double partition_utility(const PreferenceMatrix& truth,
                         const CandidateSet& cs,
                         std::span<const std::size_t> teams) {
  double total = 0.0;
  for (std::size_t t : teams) {
    for (const auto& m : cs.candidates[t].members()) {
      total += truth.score(truth.user_index(m), t);
    }
  }
  return total;
}

std::vector<std::vector<std::string>> team_members(
    const CandidateSet& cs, std::span<const std::size_t> teams) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t t : teams) out.push_back(cs.candidates[t].members());
  std::sort(out.begin(), out.end());
  return out;
}

PartitionChoice best_partition(const CandidateSet& cs,
                               std::span<const double> values) {
  if (cs.pool_ids.size() <= kMaxOraclePool) {
    auto best = enumerate_best_partition(cs, values);
    if (!best) {
      fail(ErrorKind::kInfeasible, "no feasible partition of the pool");
    }
    return *best;
  }
  return solve_partition_dp(cs, values);
}

// Uniformly random partition: count completions of every reachable covered
// set, then walk down choosing candidates in proportion to their counts.
std::vector<std::size_t> random_partition(const CandidateSet& cs, Rng& rng) {
  const std::size_t n = cs.pool_ids.size();
  require(n <= kMaxExactPool, "random partitions need at most " +
                                  std::to_string(kMaxExactPool) +
                                  " participants");
  const std::uint32_t full = (1u << n) - 1u;
  std::vector<std::uint32_t> masks;
  std::vector<std::vector<std::size_t>> by_member(n);
  for (std::size_t c = 0; c < cs.candidates.size(); ++c) {
    std::uint32_t mask = 0;
    for (const auto& m : cs.candidates[c].members()) {
      auto it = std::lower_bound(cs.pool_ids.begin(), cs.pool_ids.end(), m);
      mask |= 1u << static_cast<std::uint32_t>(it - cs.pool_ids.begin());
    }
    masks.push_back(mask);
    for (std::size_t p = 0; p < n; ++p) {
      if (mask & (1u << p)) by_member[p].push_back(c);
    }
  }
  std::unordered_map<std::uint32_t, long double> counts;
  auto count = [&](auto&& self, std::uint32_t covered) -> long double {
    if (covered == full) return 1.0L;
    if (auto it = counts.find(covered); it != counts.end()) return it->second;
    const std::size_t pivot = static_cast<std::size_t>(std::countr_one(covered));
    long double total = 0.0L;
    for (std::size_t c : by_member[pivot]) {
      if (masks[c] & covered) continue;
      total += self(self, covered | masks[c]);
    }
    counts.emplace(covered, total);
    return total;
  };
  if (count(count, 0) == 0.0L) {
    fail(ErrorKind::kInfeasible,
         "no feasible partition: candidates cannot split the pool exactly");
  }
  std::vector<std::size_t> chosen;
  std::uint32_t covered = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (covered != full) {
    const std::size_t pivot = static_cast<std::size_t>(std::countr_one(covered));
    const long double target =
        static_cast<long double>(unit(rng)) * count(count, covered);
    long double acc = 0.0L;
    std::size_t pick = cs.candidates.size();
    for (std::size_t c : by_member[pivot]) {
      if (masks[c] & covered) continue;
      const long double w = count(count, covered | masks[c]);
      if (w == 0.0L) continue;
      pick = c;
      acc += w;
      if (target < acc) break;
    }
    chosen.push_back(pick);
    covered |= masks[pick];
  }
  return chosen;
}

// Users in random order each found a team or join the open team that
// maximizes their own utility given the members already there.
std::vector<std::vector<std::size_t>> self_assemble(
    std::span<const Participant> pool, std::size_t k,
    const SyntheticUserModel& model, Rng& rng) {
  const std::size_t n = pool.size();
  require(n % k == 0, "self-assembled teams need the team size to divide the "
                      "pool size");
  const std::size_t team_count = n / k;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<std::size_t>> teams;
  for (std::size_t x : order) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_team = teams.size();  // teams.size() means "found"
    for (std::size_t t = 0; t < teams.size(); ++t) {
      if (teams[t].size() >= k) continue;
      double similarity = 0.0;
      std::vector<TraitVector> traits{pool[x].traits};
      for (std::size_t m : teams[t]) {
        similarity += affinity(pool[x].traits, pool[m].traits);
        traits.push_back(pool[m].traits);
      }
      similarity /= static_cast<double>(teams[t].size());
      const double value =
          model.w_sim * similarity + model.w_comp * complementarity(traits);
      if (value > best) {
        best = value;
        best_team = t;
      }
    }
    if (teams.size() < team_count && model.w_sim > best) {
      best_team = teams.size();
    }
    if (best_team == teams.size()) {
      teams.push_back({x});
    } else {
      teams[best_team].push_back(x);
    }
  }
  return teams;
}

EpisodeReport base_report(const EpisodeConfig& config, std::uint64_t seed,
                          std::string mode, std::span<const Participant> pool,
                          const CandidateSet& cs) {
  EpisodeReport report;
  report.mode = std::move(mode);
  report.seed = seed;
  report.config = config;
  report.config.pool.assign(pool.begin(), pool.end());
  report.candidate_count = cs.candidates.size();
  report.users = cs.pool_ids;
  return report;
}

void finish_ratio(EpisodeReport& report) {
  if (report.oracle_utility > 0.0) {
    report.alignment_ratio = report.assignment_utility / report.oracle_utility;
  } else {
    report.alignment_ratio = report.assignment_utility <= 0.0 ? 1.0 : 0.0;
  }
}

std::optional<double> random_baseline(const PreferenceMatrix& truth,
                                      const CandidateSet& cs,
                                      std::uint64_t seed) {
  try {
    Rng rng = make_rng(seed, "random-baseline");
    return partition_utility(truth, cs, random_partition(cs, rng));
  } catch (const Error&) {
    return std::nullopt;
  }
}

double self_assembled_total(std::span<const Participant> pool,
                            const std::vector<std::vector<std::size_t>>& teams,
                            const SyntheticUserModel& model) {
  double total = 0.0;
  for (const auto& team : teams) {
    std::vector<std::string> ids;
    for (std::size_t m : team) ids.push_back(pool[m].id);
    const TeamComposition composition = TeamComposition::from_members(ids);
    for (std::size_t m : team) {
      total += true_utility(pool[m], composition, pool, model);
    }
  }
  return total;
}

std::optional<double> self_baseline(const EpisodeConfig& config,
                                    std::span<const Participant> pool,
                                    std::uint64_t seed) {
  if (config.utility != UtilityKind::kTraits) return std::nullopt;
  if (pool.size() % config.team_size != 0) return std::nullopt;
  Rng rng = make_rng(seed, "self-baseline");
  return self_assembled_total(
      pool, self_assemble(pool, config.team_size, config.model, rng),
      config.model);
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::string_view stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), fnv1a32(stream)};
  return Rng(seq);
}

void SyntheticUserModel::validate() const {
  require(std::isfinite(w_sim) && std::isfinite(w_comp) && w_sim >= 0.0 &&
              w_comp >= 0.0,
          "utility weights must be non-negative");
  require(std::abs(w_sim + w_comp - 1.0) <= 1e-9,
          "utility weights must sum to 1");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0,
          "noise sigma must be non-negative");
}

double true_utility(const Participant& user, const TeamComposition& team,
                    std::span<const Participant> pool,
                    const SyntheticUserModel& model) {
  require(team.contains(user.id),
          "user " + user.id + " is not a member of " + team.team_id());
  if (team.size() == 1) return model.w_sim * 1.0 + model.w_comp * 0.0;
  const std::vector<TraitVector> traits = member_traits(team, pool);
  double similarity = 0.0;
  for (std::size_t i = 0; i < team.size(); ++i) {
    if (team.members()[i] == user.id) continue;
    similarity += affinity(user.traits, traits[i]);
  }
  similarity /= static_cast<double>(team.size() - 1);
  const double value =
      model.w_sim * similarity + model.w_comp * complementarity(traits);
  return std::clamp(value, 0.0, 1.0);
}

double draw_reward(double utility, const SyntheticUserModel& model, Rng& rng) {
  if (model.reward == RewardKind::kBernoulli) {
    std::bernoulli_distribution coin(std::clamp(utility, 0.0, 1.0));
    return coin(rng) ? 1.0 : 0.0;
  }
  if (model.noise_sigma == 0.0) return utility;
  std::normal_distribution<double> noise(0.0, model.noise_sigma);
  return std::clamp(utility + noise(rng), 0.0, 1.0);
}

double draw_reward(const Participant& user, const TeamComposition& team,
                   std::span<const Participant> pool,
                   const SyntheticUserModel& model, Rng& rng) {
  return draw_reward(true_utility(user, team, pool, model), model, rng);
}

PreferenceMatrix true_utility_matrix(std::span<const Participant> pool,
                                     const CandidateSet& cs,
                                     const SyntheticUserModel& model) {
  model.validate();
  std::unordered_map<std::string_view, std::size_t> pool_index;
  for (std::size_t i = 0; i < pool.size(); ++i) pool_index[pool[i].id] = i;
  const kernels::TraitColumns columns = kernels::to_columns(pool);
  std::vector<double> table(pool.size() * pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    kernels::affinity_row(columns, i,
                          std::span<double>(table).subspan(i * pool.size(),
                                                           pool.size()));
  }

  PreferenceMatrix m;
  m.users = cs.pool_ids;
  const std::size_t cols = cs.candidates.size();
  for (const auto& team : cs.candidates) m.teams.push_back(team.team_id());
  m.scores.assign(m.users.size() * cols, 0.0);
  m.sources.assign(m.users.size() * cols, CellSource::kInvalid);

  std::vector<std::size_t> members;
  std::vector<TraitVector> traits;
  for (std::size_t t = 0; t < cols; ++t) {
    const auto& team = cs.candidates[t];
    members.clear();
    traits.clear();
    for (const auto& id : team.members()) {
      auto it = pool_index.find(id);
      require(it != pool_index.end(), "team member " + id + " is not in the pool");
      members.push_back(it->second);
      traits.push_back(pool[it->second].traits);
    }
    const double comp = team.size() > 1 ? complementarity(traits) : 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      double value = model.w_sim * 1.0 + model.w_comp * 0.0;
      if (members.size() > 1) {
        double similarity = 0.0;
        for (std::size_t j = 0; j < members.size(); ++j) {
          if (j == i) continue;
          similarity += table[members[i] * pool.size() + members[j]];
        }
        similarity /= static_cast<double>(members.size() - 1);
        value = std::clamp(model.w_sim * similarity + model.w_comp * comp, 0.0,
                           1.0);
      }
      const auto row = static_cast<std::size_t>(
          std::lower_bound(m.users.begin(), m.users.end(), team.members()[i]) -
          m.users.begin());
      m.scores[row * cols + t] = value;
      m.sources[row * cols + t] = CellSource::kObserved;
    }
  }
  return m;
}

std::vector<double> planted_arm_means(std::size_t arms, double gap, Rng& rng,
                                      std::size_t* best_index) {
  require(arms >= 1, "need at least one arm");
  require(gap > 0.0 && gap <= 0.6, "planted gap must be in (0, 0.6]");
  std::uniform_real_distribution<double> best_dist(0.7, 0.9);
  const double best = best_dist(rng);
  std::uniform_int_distribution<std::size_t> position(0, arms - 1);
  const std::size_t best_at = position(rng);
  std::uniform_real_distribution<double> rest(0.1, best - gap);
  std::vector<double> means(arms);
  for (std::size_t a = 0; a < arms; ++a) {
    means[a] = a == best_at ? best : rest(rng);
  }
  if (best_index != nullptr) *best_index = best_at;
  return means;
}

PreferenceMatrix planted_utility_matrix(const CandidateSet& cs, double gap,
                                        Rng& rng) {
  PreferenceMatrix m;
  m.users = cs.pool_ids;
  const std::size_t cols = cs.candidates.size();
  for (const auto& team : cs.candidates) m.teams.push_back(team.team_id());
  m.scores.assign(m.users.size() * cols, 0.0);
  m.sources.assign(m.users.size() * cols, CellSource::kInvalid);
  for (std::size_t u = 0; u < m.users.size(); ++u) {
    std::vector<std::size_t> arms;
    for (std::size_t t = 0; t < cols; ++t) {
      if (cs.candidates[t].contains(m.users[u])) arms.push_back(t);
    }
    if (arms.empty()) continue;
    const std::vector<double> means = planted_arm_means(arms.size(), gap, rng);
    for (std::size_t a = 0; a < arms.size(); ++a) {
      m.scores[u * cols + arms[a]] = means[a];
      m.sources[u * cols + arms[a]] = CellSource::kObserved;
    }
  }
  return m;
}

std::vector<Participant> random_pool(std::size_t n, Rng& rng) {
  require(n >= 1, "need at least one participant");
  const std::size_t width = std::max<std::size_t>(2, std::to_string(n).size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Participant> pool;
  pool.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    std::string digits = std::to_string(i);
    Participant p;
    p.id = "p" + std::string(width - digits.size(), '0') + digits;
    p.display_name = "Participant " + digits;
    for (double& v : p.traits.values) v = unit(rng);
    pool.push_back(std::move(p));
  }
  return pool;
}

std::optional<PartitionChoice> enumerate_best_partition(
    const CandidateSet& cs, std::span<const double> values) {
  const std::size_t n = cs.pool_ids.size();
  require(n <= kMaxOraclePool, "pool too large for brute-force enumeration: " +
                                   std::to_string(n) + " > " +
                                   std::to_string(kMaxOraclePool));
  require(values.size() == cs.candidates.size(),
          "one value per candidate team is required");
  const std::size_t m = cs.candidates.size();

  std::vector<std::vector<std::size_t>> members(m);
  std::vector<std::size_t> last_use(n, 0);
  std::vector<bool> used_anywhere(n, false);
  for (std::size_t c = 0; c < m; ++c) {
    for (const auto& id : cs.candidates[c].members()) {
      auto it = std::lower_bound(cs.pool_ids.begin(), cs.pool_ids.end(), id);
      require(it != cs.pool_ids.end() && *it == id, "unknown member " + id);
      const auto p = static_cast<std::size_t>(it - cs.pool_ids.begin());
      members[c].push_back(p);
      last_use[p] = c;
      used_anywhere[p] = true;
    }
  }
  if (std::find(used_anywhere.begin(), used_anywhere.end(), false) !=
      used_anywhere.end()) {
    return std::nullopt;
  }

  std::vector<bool> covered(n, false);
  std::size_t covered_count = 0;
  std::vector<std::size_t> current;
  std::optional<PartitionChoice> best;

  // Include/exclude each candidate in index order.
  auto recurse = [&](auto&& self, std::size_t next, double value) -> void {
    if (covered_count == n) {
      if (!best || value > best->value) {
        best = PartitionChoice{current, value};
      }
      return;
    }
    if (next == m) return;
    for (std::size_t p = 0; p < n; ++p) {
      if (!covered[p] && last_use[p] < next) return;
    }
    const auto& team = members[next];
    const bool fits = std::none_of(team.begin(), team.end(),
                                   [&](std::size_t p) { return covered[p]; });
    if (fits) {
      for (std::size_t p : team) covered[p] = true;
      covered_count += team.size();
      current.push_back(next);
      self(self, next + 1, value + values[next]);
      current.pop_back();
      covered_count -= team.size();
      for (std::size_t p : team) covered[p] = false;
    }
    self(self, next + 1, value);
  };
  recurse(recurse, 0, 0.0);

  if (best) {
    std::sort(best->teams.begin(), best->teams.end(),
              [&](std::size_t a, std::size_t b) {
                return cs.candidates[a].team_id() < cs.candidates[b].team_id();
              });
  }
  return best;
}

PartitionChoice oracle_best_partition(std::span<const Participant> pool,
                                      const CandidateSet& cs,
                                      const SyntheticUserModel& model) {
  std::vector<double> values(cs.candidates.size(), 0.0);
  for (std::size_t t = 0; t < cs.candidates.size(); ++t) {
    for (const auto& m : cs.candidates[t].members()) {
      values[t] += true_utility(find_participant(pool, m), cs.candidates[t],
                                pool, model);
    }
  }
  auto best = enumerate_best_partition(cs, values);
  if (!best) fail(ErrorKind::kInfeasible, "no feasible partition of the pool");
  return *best;
}

void EpisodeConfig::validate() const {
  require(!pool.empty() || participants >= 1,
          "need a participant pool or a participant count");
  const std::size_t n = pool.empty() ? participants : pool.size();
  require(team_size >= 1 && team_size <= n,
          "team size must be between 1 and " + std::to_string(n));
  require(rounds >= 1, "rounds must be at least 1");
  require(std::isfinite(prior) && prior >= 0.0 && prior <= 1.0,
          "prior must be in [0, 1]");
  require(sample_min >= 1, "sample_min must be at least 1");
  require(planted_gap > 0.0 && planted_gap <= 0.6,
          "planted gap must be in (0, 0.6]");
  require(bandit.exploration > 0.0, "exploration constant must be > 0");
  require(bandit.batch >= 1, "batch size must be at least 1");
  model.validate();
}

EpisodeReport run_episode(const EpisodeConfig& config, std::uint64_t seed) {
  config.validate();
  const std::vector<Participant> pool = resolve_pool(config, seed);
  const CandidateSet cs = build_candidates(config, pool, seed);
  const PreferenceMatrix truth = build_truth(config, pool, cs, seed);

  EpisodeReport report = base_report(config, seed, "bandit", pool, cs);
  BanditState state = BanditState::for_candidates(cs, config.bandit);
  const std::size_t users = state.user_count();

  // True utility of each user's arms, in arm order.
  std::unordered_map<std::string_view, std::size_t> column;
  for (std::size_t t = 0; t < cs.candidates.size(); ++t) {
    column.emplace(cs.candidates[t].team_id(), t);
  }
  std::vector<std::vector<double>> utility(users);
  std::vector<double> best(users, 0.0);
  for (std::size_t u = 0; u < users; ++u) {
    for (const auto& team_id : state.arms(u)) {
      utility[u].push_back(truth.score(u, column.at(team_id)));
    }
    best[u] = *std::max_element(utility[u].begin(), utility[u].end());
  }

  Rng rewards = make_rng(seed, "rewards");
  report.cumulative_regret.assign(users, std::vector<double>(config.rounds));
  std::vector<double> regret(users, 0.0);
  for (std::size_t round = 0; round < config.rounds; ++round) {
    for (std::size_t u = 0; u < users; ++u) {
      const std::size_t arm = recommend_arms(state, u).front();
      const double value = utility[u][arm];
      state.record(u, arm, draw_reward(value, config.model, rewards));
      regret[u] += best[u] - value;
      report.cumulative_regret[u][round] = regret[u];
    }
  }
  for (std::size_t u = 0; u < users; ++u) {
    const auto leader = state.leader(u);
    report.best_arm_hit.push_back(leader.has_value() &&
                                  utility[u][*leader] >= best[u] - 1e-12);
  }

  const PreferenceMatrix learned = preference_matrix(state, cs, config.prior);
  const Assignment assignment = pool.size() <= kMaxExactPool
                                    ? solve_partition_exact(learned, cs)
                                    : solve_partition_greedy(learned, cs);
  std::vector<std::size_t> chosen;
  for (const auto& id : assignment.team_ids) chosen.push_back(column.at(id));
  report.teams = team_members(cs, chosen);
  report.assignment_utility = partition_utility(truth, cs, chosen);
  report.prior_fraction = assignment.prior_fraction;

  const std::vector<double> truth_values = team_values(truth, cs);
  // Above the exact limit the greedy partition stands in for the oracle.
  report.oracle_utility = pool.size() <= kMaxExactPool
                              ? best_partition(cs, truth_values).value
                              : solve_partition_greedy(truth, cs).total_value;
  finish_ratio(report);

  report.random_utility = random_baseline(truth, cs, seed);
  report.self_assembled_utility = self_baseline(config, pool, seed);
  return report;
}

EpisodeReport run_baseline(BaselineMode mode, const EpisodeConfig& config,
                           std::uint64_t seed) {
  if (mode == BaselineMode::kBandit) return run_episode(config, seed);
  config.validate();
  const std::vector<Participant> pool = resolve_pool(config, seed);
  if (mode == BaselineMode::kSelfAssembled) {
    require(pool.size() % config.team_size == 0,
            "self-assembled mode needs the team size to divide the pool size");
    require(config.utility == UtilityKind::kTraits,
            "self-assembled mode needs the trait utility model");
  }
  const CandidateSet cs = build_candidates(config, pool, seed);
  const PreferenceMatrix truth = build_truth(config, pool, cs, seed);
  EpisodeReport report = base_report(config, seed, to_string(mode), pool, cs);

  if (mode == BaselineMode::kRandom) {
    Rng rng = make_rng(seed, "random-baseline");
    const std::vector<std::size_t> chosen = random_partition(cs, rng);
    report.teams = team_members(cs, chosen);
    report.assignment_utility = partition_utility(truth, cs, chosen);
    report.random_utility = report.assignment_utility;
  } else {
    Rng rng = make_rng(seed, "self-baseline");
    const auto teams = self_assemble(pool, config.team_size, config.model, rng);
    for (const auto& team : teams) {
      std::vector<std::string> ids;
      for (std::size_t m : team) ids.push_back(pool[m].id);
      std::sort(ids.begin(), ids.end());
      report.teams.push_back(std::move(ids));
    }
    std::sort(report.teams.begin(), report.teams.end());
    report.assignment_utility = self_assembled_total(pool, teams, config.model);
    report.self_assembled_utility = report.assignment_utility;
  }
  report.oracle_utility = best_partition(cs, team_values(truth, cs)).value;
  finish_ratio(report);
  return report;
}

RegretWindows regret_windows(const EpisodeReport& report, double fraction) {
  RegretWindows out;
  if (report.cumulative_regret.empty()) return out;
  for (const auto& cum : report.cumulative_regret) {
    const std::size_t rounds = cum.size();
    const std::size_t w = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(static_cast<double>(rounds) * fraction)));
    out.early += cum[w - 1] / static_cast<double>(w);
    const double before = rounds > w ? cum[rounds - w - 1] : 0.0;
    out.late += (cum[rounds - 1] - before) / static_cast<double>(w);
  }
  const auto users = static_cast<double>(report.cumulative_regret.size());
  out.early /= users;
  out.late /= users;
  return out;
}

double best_arm_hit_rate(const EpisodeReport& report) {
  if (report.best_arm_hit.empty()) return 0.0;
  const auto hits = std::count(report.best_arm_hit.begin(),
                               report.best_arm_hit.end(), true);
  return static_cast<double>(hits) /
         static_cast<double>(report.best_arm_hit.size());
}

ArmBenchmarkResult run_arm_benchmark(const ArmBenchmarkConfig& config,
                                     std::uint64_t seed) {
  require(config.pulls >= 1, "need at least one pull");
  Rng arm_rng = make_rng(seed, "arms");
  ArmBenchmarkResult result;
  result.means = planted_arm_means(config.arms, config.gap, arm_rng,
                                   &result.best_arm);

  std::vector<std::string> arm_ids;
  for (std::size_t a = 0; a < config.arms; ++a) {
    arm_ids.push_back("arm" + std::string(a < 10 ? "0" : "") + std::to_string(a));
  }
  BanditState state({"user"}, {arm_ids}, BanditConfig{config.exploration, 1});

  Rng rewards = make_rng(seed, "rewards");
  const double best = result.means[result.best_arm];
  double regret = 0.0;
  result.cumulative_regret.reserve(config.pulls);
  for (std::size_t i = 0; i < config.pulls; ++i) {
    const std::size_t arm = recommend_arms(state, 0).front();
    state.record(0, arm, draw_reward(result.means[arm], config.model, rewards));
    regret += best - result.means[arm];
    result.cumulative_regret.push_back(regret);
  }
  result.leader = *state.leader(0);
  result.hit = result.leader == result.best_arm;
  return result;
}

const char* to_string(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::kRandom:
      return "random";
    case BaselineMode::kSelfAssembled:
      return "self_assembled";
    case BaselineMode::kBandit:
      return "bandit";
  }
  return "unknown";
}

BaselineMode parse_baseline_mode(std::string_view text) {
  if (text == "random") return BaselineMode::kRandom;
  if (text == "self" || text == "self_assembled") {
    return BaselineMode::kSelfAssembled;
  }
  if (text == "bandit") return BaselineMode::kBandit;
  fail(ErrorKind::kInvalidArgument,
       "unknown mode '" + std::string(text) + "' (random|self|bandit)");
}

}  // namespace teamforge
