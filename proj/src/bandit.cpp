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

#include "teamforge/bandit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "teamforge/kernels.hpp"

namespace teamforge {

namespace {

constexpr std::uint32_t kMaxPulls = std::numeric_limits<std::int32_t>::max();

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::vector<std::size_t> recommend_arms(const BanditState& state,
                                        std::size_t u) {
  const auto arms = state.arms(u);
  const auto pulls = state.pulls(u);
  std::vector<double> index(arms.size());
  const std::uint64_t t = state.rounds(u);
  const double log_t = t > 0 ? std::log(static_cast<double>(t)) : 0.0;
  kernels::ucb_indices(state.sums(u), pulls, log_t,
                       state.config().exploration, index);

  std::vector<std::size_t> order(arms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(state.config().batch, arms.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (index[a] != index[b]) return index[a] > index[b];
                      if (pulls[a] != pulls[b]) return pulls[a] < pulls[b];
                      return arms[a] < arms[b];
                    });
  order.resize(take);
  return order;
}

double ucb_index(const ArmStats& stats, std::uint64_t rounds,
                 double exploration) {
  if (stats.pulls == 0) return std::numeric_limits<double>::infinity();
  require(rounds >= stats.pulls, "ucb_index: rounds must be >= pulls");
  require(exploration > 0.0, "ucb_index: exploration constant must be > 0");
  const double count = static_cast<double>(stats.pulls);
  const double mean = stats.sum_reward / count;
  return mean + exploration * std::sqrt(std::log(static_cast<double>(rounds)) / count);
}

BanditState::BanditState(std::vector<std::string> users,
                         std::vector<std::vector<std::string>> arms_by_user,
                         BanditConfig config)
    : config_(config) {
  require(std::isfinite(config.exploration) && config.exploration > 0.0,
          "exploration constant must be a positive number");
  require(config.batch >= 1, "recommendation batch size must be at least 1");
  require(users.size() == arms_by_user.size(),
          "every user needs an arm list");
  std::unordered_set<std::string> seen;
  users_.reserve(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    require(seen.insert(users[i]).second, "duplicate user '" + users[i] + "'");
    std::unordered_set<std::string> arm_ids(arms_by_user[i].begin(),
                                            arms_by_user[i].end());
    require(arm_ids.size() == arms_by_user[i].size(),
            "user '" + users[i] + "' lists an arm twice");
    UserArms user;
    user.id = std::move(users[i]);
    user.team_ids = std::move(arms_by_user[i]);
    user.pulls.assign(user.team_ids.size(), 0);
    user.sums.assign(user.team_ids.size(), 0.0);
    users_.push_back(std::move(user));
  }
}

BanditState BanditState::for_candidates(const CandidateSet& cs,
                                        BanditConfig config) {
  std::vector<std::vector<std::string>> arms(cs.pool_ids.size());
  for (const auto& team : cs.candidates) {
    for (const auto& m : team.members()) {
      auto it = std::lower_bound(cs.pool_ids.begin(), cs.pool_ids.end(), m);
      require(it != cs.pool_ids.end() && *it == m,
              "team " + team.team_id() + " has unknown member " + m);
      arms[static_cast<std::size_t>(it - cs.pool_ids.begin())].push_back(
          team.team_id());
    }
  }
  return BanditState(cs.pool_ids, std::move(arms), config);
}

std::size_t BanditState::user_index(std::string_view user_id) const {
  for (std::size_t u = 0; u < users_.size(); ++u) {
    if (users_[u].id == user_id) return u;
  }
  fail(ErrorKind::kNotFound, "unknown user '" + std::string(user_id) + "'");
}

bool BanditState::has_user(std::string_view user_id) const {
  return std::any_of(users_.begin(), users_.end(),
                     [&](const UserArms& u) { return u.id == user_id; });
}

std::size_t BanditState::arm_index(std::size_t u,
                                   std::string_view team_id) const {
  const auto& ids = users_[u].team_ids;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    if (ids[a] == team_id) return a;
  }
  fail(ErrorKind::kNotFound, "team '" + std::string(team_id) +
                                 "' is not an arm of user '" + users_[u].id +
                                 "'");
}

ArmStats BanditState::stats(std::size_t u, std::size_t arm) const {
  return ArmStats{users_[u].pulls[arm], users_[u].sums[arm]};
}

std::optional<std::size_t> BanditState::leader(std::size_t u) const {
  return compute_leader(users_[u]);
}

std::optional<std::size_t> BanditState::compute_leader(
    const UserArms& user) const {
  std::optional<std::size_t> best;
  double best_mean = 0.0;
  for (std::size_t a = 0; a < user.team_ids.size(); ++a) {
    if (user.pulls[a] == 0) continue;
    const double mean = user.sums[a] / static_cast<double>(user.pulls[a]);
    if (!best || mean > best_mean ||
        (mean == best_mean && user.team_ids[a] < user.team_ids[*best])) {
      best = a;
      best_mean = mean;
    }
  }
  return best;
}

void BanditState::record(const Feedback& feedback) {
  require(std::isfinite(feedback.reward) && feedback.reward >= 0.0 &&
              feedback.reward <= 1.0,
          "reward must be in [0, 1]");
  const std::size_t u = user_index(feedback.participant_id);
  record(u, arm_index(u, feedback.team_id), feedback.reward);
}

void BanditState::record(std::size_t u, std::size_t a, double reward) {
  require(std::isfinite(reward) && reward >= 0.0 && reward <= 1.0,
          "reward must be in [0, 1]");
  require(u < users_.size() && a < users_[u].team_ids.size(),
          "arm index out of range");
  UserArms& user = users_[u];
  if (user.pulls[a] >= kMaxPulls) {
    fail(ErrorKind::kConflict, "pull counter overflow");
  }
  ++user.pulls[a];
  user.sums[a] += reward;
  ++user.rounds;
  user.leaders.push_back(static_cast<std::int32_t>(*compute_leader(user)));
}

std::vector<std::string> select_recommendations(const BanditState& state,
                                                std::string_view user_id) {
  const std::size_t u = state.user_index(user_id);
  require(!state.arms(u).empty(),
          "user '" + std::string(user_id) + "' has no arms");
  const auto arms = state.arms(u);
  std::vector<std::string> out;
  for (std::size_t a : recommend_arms(state, u)) out.push_back(arms[a]);
  return out;
}

void update(BanditState& state, const Feedback& feedback) {
  state.record(feedback);
}

bool has_converged(const BanditState& state, std::string_view user_id,
                   std::size_t window, double epsilon) {
  require(window >= 1, "convergence window must be at least 1");
  const std::size_t u = state.user_index(user_id);
  const auto history = state.leader_history(u);
  if (history.size() < window) return false;
  const auto tail = history.subspan(history.size() - window);
  if (std::adjacent_find(tail.begin(), tail.end(), std::not_equal_to<>()) !=
      tail.end()) {
    return false;
  }
  const auto arms = state.arms(u);
  if (arms.size() == 1) return true;

  double first = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  std::size_t pulled = 0;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const auto mean = state.stats(u, a).mean_reward();
    if (!mean) continue;
    ++pulled;
    if (*mean > first) {
      second = first;
      first = *mean;
    } else if (*mean > second) {
      second = *mean;
    }
  }
  // An unexplored alternative leaves the gap undefined.
  if (pulled < 2) return false;
  return first - second >= epsilon;
}

std::size_t PreferenceMatrix::user_index(std::string_view id) const {
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (users[u] == id) return u;
  }
  return npos;
}

std::size_t PreferenceMatrix::team_index(std::string_view id) const {
  for (std::size_t t = 0; t < teams.size(); ++t) {
    if (teams[t] == id) return t;
  }
  return npos;
}

PreferenceMatrix preference_matrix(const BanditState& state,
                                   const CandidateSet& cs, double prior) {
  require(std::isfinite(prior) && prior >= 0.0 && prior <= 1.0,
          "prior must be in [0, 1]");
  PreferenceMatrix m;
  m.users.reserve(state.user_count());
  for (std::size_t u = 0; u < state.user_count(); ++u) {
    m.users.push_back(state.user_id(u));
  }
  std::unordered_map<std::string_view, std::size_t> column;
  m.teams.reserve(cs.candidates.size());
  for (std::size_t t = 0; t < cs.candidates.size(); ++t) {
    m.teams.push_back(cs.candidates[t].team_id());
    column.emplace(cs.candidates[t].team_id(), t);
  }
  const std::size_t cols = m.teams.size();
  m.scores.assign(m.users.size() * cols, 0.0);
  m.sources.assign(m.users.size() * cols, CellSource::kInvalid);

  for (std::size_t u = 0; u < m.users.size(); ++u) {
    for (std::size_t t = 0; t < cols; ++t) {
      if (cs.candidates[t].contains(m.users[u])) {
        m.scores[u * cols + t] = prior;
        m.sources[u * cols + t] = CellSource::kPrior;
      }
    }
    const auto arms = state.arms(u);
    for (std::size_t a = 0; a < arms.size(); ++a) {
      auto it = column.find(arms[a]);
      if (it == column.end()) continue;
      const std::size_t cell = u * cols + it->second;
      if (m.sources[cell] == CellSource::kInvalid) continue;
      if (const auto mean = state.stats(u, a).mean_reward()) {
        m.scores[cell] = *mean;
        m.sources[cell] = CellSource::kObserved;
      }
    }
  }
  return m;
}

std::string to_csv(const PreferenceMatrix& matrix) {
  std::string out = "user";
  for (const auto& t : matrix.teams) {
    out += ',';
    out += csv_field(t);
  }
  out += '\n';
  for (std::size_t u = 0; u < matrix.users.size(); ++u) {
    out += csv_field(matrix.users[u]);
    for (std::size_t t = 0; t < matrix.teams.size(); ++t) {
      out += ',';
      switch (matrix.source(u, t)) {
        case CellSource::kInvalid:
          break;
        case CellSource::kPrior:
          out += format_double(matrix.score(u, t));
          out += '*';
          break;
        case CellSource::kObserved:
          out += format_double(matrix.score(u, t));
          break;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace teamforge
