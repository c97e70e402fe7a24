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
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "teamforge/bandit.hpp"
#include "teamforge/candidates.hpp"
#include "teamforge/core.hpp"
#include "teamforge/matching.hpp"
#include "teamforge/serialize.hpp"

namespace teamforge {

struct SessionConfig {
  std::size_t team_size = 2;
  std::size_t batch = 3;
  double exploration = std::numbers::sqrt2;
  double prior = kDefaultPrior;
  std::size_t convergence_window = 5;
  double convergence_epsilon = 0.05;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  // Used when enumeration exceeds the cap. 0 means 4 * ceil(n * min / k).
  std::size_t sample_max = 0;
  std::size_t sample_min = 3;
  std::uint64_t sample_seed = 0;

  void validate() const;
};

Json to_json(const SessionConfig& config);
// Missing keys keep their defaults.
SessionConfig session_config_from_json(const Json& j);

enum class Phase { kCollecting, kConverged, kFinalized };

enum class EventKind {
  kSessionCreated,
  kParticipantRegistered,
  kRecommendationIssued,
  kFeedbackReceived,
  kSessionFinalized,
};

const char* to_string(Phase phase);
const char* to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

// One line of the event log. Every payload carries "session_id".
struct EventRecord {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kSessionCreated;
  Json payload;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

Json to_json(const EventRecord& event);
EventRecord event_from_json(const Json& j);

struct TeamCard {
  std::string team_id;
  std::vector<Participant> members;
  std::uint64_t times_shown = 0;
};

Json to_json(const TeamCard& card);

struct FeedbackAck {
  bool ok = true;
  bool converged = false;
};

// Event-sourced session. Every state change is an EventRecord passed through
// apply(); live operations validate, build the event and apply it, so a
// replay of the log goes through exactly the same code.
class Session {
 public:
  // Builds the creation events without applying them.
  static std::vector<EventRecord> creation_events(
      std::string session_id, const SessionConfig& config,
      std::vector<Participant> pool, std::int64_t now_ms);

  // Throws Error(kCorrupt) naming the offending sequence number.
  void apply(const EventRecord& event);

  // Returns the cached list when one is pending, otherwise the event to
  // append (apply it, then call current_cards()).
  std::optional<EventRecord> plan_recommendations(
      std::string_view participant_id, std::int64_t now_ms) const;
  EventRecord plan_feedback(std::string_view participant_id,
                            std::string_view team_id, int rating,
                            std::int64_t now_ms) const;
  EventRecord plan_finalize(bool force, std::int64_t now_ms) const;

  std::vector<TeamCard> current_cards(std::string_view participant_id) const;
  bool participant_converged(std::string_view participant_id) const;

  const std::string& id() const { return id_; }
  Phase phase() const { return phase_; }
  std::uint64_t last_seq() const { return last_seq_; }
  const SessionConfig& config() const { return config_; }
  const std::vector<Participant>& pool() const { return pool_; }
  const CandidateSet& candidates() const { return candidates_; }
  const BanditState& bandit() const { return bandit_; }
  const std::optional<Assignment>& assignment() const { return assignment_; }
  bool ready() const { return bandit_ready_; }

  // Complete state as canonical JSON; equal JSON means equal sessions.
  Json state_json() const;
  std::string state_hash() const { return content_hash(state_json()); }
  // Phase, per-user progress and counts for GET /sessions/{id}.
  Json summary_json() const;

 private:
  void apply_created(const Json& payload);
  void apply_registered(const Json& payload);
  void apply_recommendation(const Json& payload);
  void apply_feedback(const Json& payload);
  void apply_finalized(const Json& payload);
  void require_mutable(std::string_view what) const;
  std::size_t participant_index(std::string_view participant_id) const;
  bool all_converged() const;

  std::string id_;
  SessionConfig config_;
  std::int64_t created_at_ms_ = 0;
  std::size_t expected_participants_ = 0;
  std::vector<Participant> pool_;  // sorted by id once complete
  CandidateSet candidates_;
  BanditState bandit_;
  bool bandit_ready_ = false;
  Phase phase_ = Phase::kCollecting;
  std::uint64_t last_seq_ = 0;
  // Indexed like bandit users.
  std::vector<std::vector<std::string>> pending_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> shown_;
  std::optional<Assignment> assignment_;
};

// Rebuilds one session from its events. Rejects an empty log, a log that
// does not start with SessionCreated and any gap or malformed record.
Session replay(std::span<const EventRecord> events);

// Groups a multi-session JSON-lines log by session id and replays each.
std::map<std::string, Session> replay_log(const std::filesystem::path& path);
std::vector<EventRecord> read_event_log(const std::filesystem::path& path);

// Serialized append of JSON lines; each record is flushed before returning.
class EventSink {
 public:
  EventSink() = default;
  explicit EventSink(const std::filesystem::path& path);

  void append(const EventRecord& event);
  void flush();

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

struct ServiceOptions {
  std::optional<std::filesystem::path> log_path;
  std::function<std::string()> make_session_id;  // default: 128-bit token
  std::function<std::int64_t()> clock;           // default: system clock ms
};

// Session registry. Sessions are independent; operations on one session are
// serialized through that session's writer lock and reads take a shared lock.
class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {});

  std::string create_session(const SessionConfig& config,
                             std::vector<Participant> pool);
  std::vector<TeamCard> get_recommendations(std::string_view session_id,
                                            std::string_view participant_id);
  FeedbackAck submit_feedback(std::string_view session_id,
                              std::string_view participant_id,
                              std::string_view team_id, int rating);
  Assignment finalize(std::string_view session_id, bool force);

  Json summary(std::string_view session_id) const;
  std::vector<EventRecord> events(std::string_view session_id,
                                  std::uint64_t since = 0) const;
  std::string state_hash(std::string_view session_id) const;
  Json state_json(std::string_view session_id) const;
  std::vector<std::string> session_ids() const;

  void flush();

 private:
  struct Slot {
    mutable std::shared_mutex mutex;
    Session session;
    std::vector<EventRecord> log;
  };

  Slot& slot(std::string_view session_id) const;
  void commit(Slot& slot, const EventRecord& event);

  ServiceOptions options_;
  std::unique_ptr<EventSink> sink_;
  mutable std::shared_mutex registry_mutex_;
  std::unordered_map<std::string, std::unique_ptr<Slot>> sessions_;
};

// Maps a 1..5 rating onto [0, 1]: (rating - 1) / 4.
double rating_to_reward(int rating);

}  // namespace teamforge
