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

#include "teamforge/service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace teamforge {

namespace {

std::string default_session_id() {
  std::random_device device;
  std::string id;
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 0; i < 4; ++i) {
    std::uint32_t word = device();
    for (int nibble = 0; nibble < 8; ++nibble) {
      id += kHex[word & 0xf];
      word >>= 4;
    }
  }
  return id;
}

std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch())
      .count();
}

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    out = it->get<T>();
  }
}

[[noreturn]] void corrupt(std::uint64_t seq, const std::string& what) {
  fail(ErrorKind::kCorrupt,
       "event " + std::to_string(seq) + ": " + what);
}

CandidateSet generate_candidates(const SessionConfig& config,
                                 std::span<const Participant> pool) {
  const std::size_t n = pool.size();
  const std::size_t k = config.team_size;
  if (binomial(n, k) <= config.enumeration_cap) {
    return enumerate_candidates(pool, k, config.enumeration_cap);
  }
  SamplingParams params;
  params.min_per_user = config.sample_min;
  params.max_candidates = config.sample_max != 0
                              ? config.sample_max
                              : 4 * ((n * config.sample_min + k - 1) / k);
  params.seed = config.sample_seed;
  return sample_candidates(pool, k, params);
}

}  // namespace

double rating_to_reward(int rating) {
  require(rating >= 1 && rating <= 5, "rating must be an integer in 1..5");
  return static_cast<double>(rating - 1) / 4.0;
}

void SessionConfig::validate() const {
  require(team_size >= 1, "team_size must be at least 1");
  require(batch >= 1, "batch must be at least 1");
  require(std::isfinite(exploration) && exploration > 0.0,
          "exploration must be a positive number");
  require(std::isfinite(prior) && prior >= 0.0 && prior <= 1.0,
          "prior must be in [0, 1]");
  require(convergence_window >= 1, "convergence_window must be at least 1");
  require(std::isfinite(convergence_epsilon) && convergence_epsilon >= 0.0,
          "convergence_epsilon must be non-negative");
  require(sample_min >= 1, "sample_min must be at least 1");
}

Json to_json(const SessionConfig& c) {
  return Json{{"team_size", c.team_size},
              {"batch", c.batch},
              {"exploration", c.exploration},
              {"prior", c.prior},
              {"convergence_window", c.convergence_window},
              {"convergence_epsilon", c.convergence_epsilon},
              {"enumeration_cap", c.enumeration_cap},
              {"sample_max", c.sample_max},
              {"sample_min", c.sample_min},
              {"sample_seed", c.sample_seed}};
}

SessionConfig session_config_from_json(const Json& j) {
  require(j.is_object(), "config must be a JSON object");
  SessionConfig c;
  try {
    read_if(j, "k", c.team_size);
    read_if(j, "team_size", c.team_size);
    read_if(j, "batch", c.batch);
    read_if(j, "exploration", c.exploration);
    read_if(j, "prior", c.prior);
    read_if(j, "convergence_window", c.convergence_window);
    read_if(j, "convergence_epsilon", c.convergence_epsilon);
    read_if(j, "enumeration_cap", c.enumeration_cap);
    read_if(j, "sample_max", c.sample_max);
    read_if(j, "sample_min", c.sample_min);
    read_if(j, "sample_seed", c.sample_seed);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kInvalidArgument, std::string("malformed config: ") + e.what());
  }
  return c;
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::kCollecting:
      return "collecting";
    case Phase::kConverged:
      return "converged";
    case Phase::kFinalized:
      return "finalized";
  }
  return "unknown";
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kSessionCreated:
      return "SessionCreated";
    case EventKind::kParticipantRegistered:
      return "ParticipantRegistered";
    case EventKind::kRecommendationIssued:
      return "RecommendationIssued";
    case EventKind::kFeedbackReceived:
      return "FeedbackReceived";
    case EventKind::kSessionFinalized:
      return "SessionFinalized";
  }
  return "unknown";
}

EventKind parse_event_kind(std::string_view text) {
  for (auto kind : {EventKind::kSessionCreated, EventKind::kParticipantRegistered,
                    EventKind::kRecommendationIssued,
                    EventKind::kFeedbackReceived, EventKind::kSessionFinalized}) {
    if (text == to_string(kind)) return kind;
  }
  fail(ErrorKind::kCorrupt, "unknown event kind '" + std::string(text) + "'");
}

Json to_json(const EventRecord& event) {
  return Json{{"seq", event.seq},
              {"kind", to_string(event.kind)},
              {"payload", event.payload},
              {"timestamp", event.timestamp_ms}};
}

EventRecord event_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("seq") || !j["seq"].is_number_unsigned() ||
      !j.contains("kind") || !j["kind"].is_string() || !j.contains("payload") ||
      !j["payload"].is_object() || !j.contains("timestamp") ||
      !j["timestamp"].is_number_integer()) {
    fail(ErrorKind::kCorrupt, "malformed event record");
  }
  EventRecord e;
  e.seq = j["seq"].get<std::uint64_t>();
  e.kind = parse_event_kind(j["kind"].get<std::string>());
  e.payload = j["payload"];
  e.timestamp_ms = j["timestamp"].get<std::int64_t>();
  return e;
}

Json to_json(const TeamCard& card) {
  return Json{{"team_id", card.team_id},
              {"members", card.members},
              {"times_shown", card.times_shown}};
}

// -- Session ------------------------------------------------------------------

std::vector<EventRecord> Session::creation_events(std::string session_id,
                                                  const SessionConfig& config,
                                                  std::vector<Participant> pool,
                                                  std::int64_t now_ms) {
  config.validate();
  validate_pool(pool);
  const std::size_t n = pool.size();
  require(n >= 1, "session needs at least one participant");
  require(config.team_size <= n,
          "team size " + std::to_string(config.team_size) +
              " exceeds the number of participants " + std::to_string(n));
  require(n % config.team_size == 0,
          "team size " + std::to_string(config.team_size) +
              " must divide the number of participants " + std::to_string(n));
  std::sort(pool.begin(), pool.end(),
            [](const Participant& a, const Participant& b) { return a.id < b.id; });
  const CandidateSet cs = generate_candidates(config, pool);

  std::vector<EventRecord> events;
  events.push_back({1, EventKind::kSessionCreated,
                    Json{{"session_id", session_id},
                         {"config", to_json(config)},
                         {"created_at", now_ms},
                         {"participant_count", n},
                         {"candidates", to_json(cs)}},
                    now_ms});
  for (const auto& p : pool) {
    events.push_back({events.size() + 1, EventKind::kParticipantRegistered,
                      Json{{"session_id", session_id}, {"participant", p}},
                      now_ms});
  }
  return events;
}

void Session::apply(const EventRecord& event) {
  if (event.seq != last_seq_ + 1) {
    corrupt(event.seq, "expected sequence number " +
                           std::to_string(last_seq_ + 1));
  }
  try {
    if (event.kind == EventKind::kSessionCreated) {
      if (last_seq_ != 0) corrupt(event.seq, "SessionCreated after start");
    } else {
      if (last_seq_ == 0) corrupt(event.seq, "log must start with SessionCreated");
      if (event.payload.at("session_id").get<std::string>() != id_) {
        corrupt(event.seq, "event belongs to another session");
      }
    }
    switch (event.kind) {
      case EventKind::kSessionCreated:
        apply_created(event.payload);
        break;
      case EventKind::kParticipantRegistered:
        apply_registered(event.payload);
        break;
      case EventKind::kRecommendationIssued:
        apply_recommendation(event.payload);
        break;
      case EventKind::kFeedbackReceived:
        apply_feedback(event.payload);
        break;
      case EventKind::kSessionFinalized:
        apply_finalized(event.payload);
        break;
    }
  } catch (const Json::exception& e) {
    corrupt(event.seq, std::string("malformed payload: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kCorrupt) throw;
    corrupt(event.seq, e.what());
  }
  last_seq_ = event.seq;
}

void Session::apply_created(const Json& payload) {
  id_ = payload.at("session_id").get<std::string>();
  config_ = session_config_from_json(payload.at("config"));
  config_.validate();
  created_at_ms_ = payload.at("created_at").get<std::int64_t>();
  expected_participants_ = payload.at("participant_count").get<std::size_t>();
  candidates_ = candidate_set_from_json(payload.at("candidates"));
  require(candidates_.pool_ids.size() == expected_participants_,
          "candidate teams do not cover the declared participants");
}

void Session::apply_registered(const Json& payload) {
  require(!bandit_ready_, "all participants are already registered");
  Participant p = payload.at("participant").get<Participant>();
  require(std::binary_search(candidates_.pool_ids.begin(),
                             candidates_.pool_ids.end(), p.id),
          "participant " + p.id + " is not in the candidate pool");
  pool_.push_back(std::move(p));
  validate_pool(pool_);
  if (pool_.size() == expected_participants_) {
    std::sort(pool_.begin(), pool_.end(),
              [](const Participant& a, const Participant& b) { return a.id < b.id; });
    bandit_ = BanditState::for_candidates(
        candidates_, BanditConfig{config_.exploration, config_.batch});
    pending_.assign(pool_.size(), {});
    bandit_ready_ = true;
  }
}

void Session::apply_recommendation(const Json& payload) {
  require(bandit_ready_, "participants are still registering");
  require_mutable("recommend");
  const auto pid = payload.at("participant_id").get<std::string>();
  const std::size_t u = participant_index(pid);
  auto teams = payload.at("team_ids").get<std::vector<std::string>>();
  for (const auto& t : teams) {
    bandit_.arm_index(u, t);
    ++shown_[{pid, t}];
  }
  pending_[u] = std::move(teams);
}

void Session::apply_feedback(const Json& payload) {
  require(bandit_ready_, "participants are still registering");
  require_mutable("accept feedback");
  const auto pid = payload.at("participant_id").get<std::string>();
  const auto team = payload.at("team_id").get<std::string>();
  const int rating = payload.at("rating").get<int>();
  const std::size_t u = participant_index(pid);
  const auto& pending = pending_[u];
  if (std::find(pending.begin(), pending.end(), team) == pending.end()) {
    fail(ErrorKind::kConflict,
         "team " + team + " is not currently recommended to " + pid);
  }
  Feedback feedback;
  feedback.participant_id = pid;
  feedback.team_id = team;
  feedback.reward = rating_to_reward(rating);
  feedback.round = bandit_.rounds(u);
  bandit_.record(feedback);
  pending_[u].clear();
  if (phase_ == Phase::kCollecting && all_converged()) {
    phase_ = Phase::kConverged;
  }
}

void Session::apply_finalized(const Json& payload) {
  require(bandit_ready_, "participants are still registering");
  require_mutable("finalize");
  assignment_ = assignment_from_json(payload.at("assignment"));
  phase_ = Phase::kFinalized;
}

void Session::require_mutable(std::string_view what) const {
  if (phase_ == Phase::kFinalized) {
    fail(ErrorKind::kConflict,
         "session already finalized; cannot " + std::string(what));
  }
}

std::size_t Session::participant_index(std::string_view participant_id) const {
  if (!bandit_ready_) {
    fail(ErrorKind::kNotFound, "session is not ready");
  }
  return bandit_.user_index(participant_id);
}

bool Session::participant_converged(std::string_view participant_id) const {
  participant_index(participant_id);
  return has_converged(bandit_, participant_id, config_.convergence_window,
                       config_.convergence_epsilon);
}

bool Session::all_converged() const {
  for (std::size_t u = 0; u < bandit_.user_count(); ++u) {
    if (!has_converged(bandit_, bandit_.user_id(u), config_.convergence_window,
                       config_.convergence_epsilon)) {
      return false;
    }
  }
  return true;
}

std::optional<EventRecord> Session::plan_recommendations(
    std::string_view participant_id, std::int64_t now_ms) const {
  require_mutable("recommend");
  const std::size_t u = participant_index(participant_id);
  if (!pending_[u].empty()) return std::nullopt;
  return EventRecord{last_seq_ + 1, EventKind::kRecommendationIssued,
                     Json{{"session_id", id_},
                          {"participant_id", participant_id},
                          {"team_ids", select_recommendations(bandit_, participant_id)}},
                     now_ms};
}

EventRecord Session::plan_feedback(std::string_view participant_id,
                                   std::string_view team_id, int rating,
                                   std::int64_t now_ms) const {
  require_mutable("accept feedback");
  const double reward = rating_to_reward(rating);
  const std::size_t u = participant_index(participant_id);
  const auto& pending = pending_[u];
  if (std::find(pending.begin(), pending.end(), team_id) == pending.end()) {
    fail(ErrorKind::kConflict, "team " + std::string(team_id) +
                                   " is not currently recommended to " +
                                   std::string(participant_id));
  }
  return EventRecord{last_seq_ + 1, EventKind::kFeedbackReceived,
                     Json{{"session_id", id_},
                          {"participant_id", participant_id},
                          {"team_id", team_id},
                          {"rating", rating},
                          {"reward", reward},
                          {"round", bandit_.rounds(u)}},
                     now_ms};
}

EventRecord Session::plan_finalize(bool force, std::int64_t now_ms) const {
  require_mutable("finalize");
  if (!bandit_ready_) fail(ErrorKind::kConflict, "session is not ready");
  if (!force && !all_converged()) {
    fail(ErrorKind::kConflict,
         "not every participant has converged; pass force to finalize anyway");
  }
  const PreferenceMatrix matrix =
      preference_matrix(bandit_, candidates_, config_.prior);
  const Assignment assignment = pool_.size() <= kMaxExactPool
                                    ? solve_partition_exact(matrix, candidates_)
                                    : solve_partition_greedy(matrix, candidates_);
  return EventRecord{last_seq_ + 1, EventKind::kSessionFinalized,
                     Json{{"session_id", id_},
                          {"force", force},
                          {"assignment", to_json(assignment)}},
                     now_ms};
}

std::vector<TeamCard> Session::current_cards(
    std::string_view participant_id) const {
  const std::size_t u = participant_index(participant_id);
  std::vector<TeamCard> cards;
  for (const auto& team_id : pending_[u]) {
    TeamCard card;
    card.team_id = team_id;
    for (const auto& m : candidates_.team(team_id).members()) {
      card.members.push_back(find_participant(pool_, m));
    }
    auto it = shown_.find({std::string(participant_id), team_id});
    card.times_shown = it == shown_.end() ? 0 : it->second;
    cards.push_back(std::move(card));
  }
  return cards;
}

Json Session::state_json() const {
  Json pending = Json::object();
  for (std::size_t u = 0; u < pending_.size(); ++u) {
    pending[bandit_.user_id(u)] = pending_[u];
  }
  Json shown = Json::array();
  for (const auto& [key, count] : shown_) {
    shown.push_back({key.first, key.second, count});
  }
  return Json{{"session_id", id_},
              {"config", to_json(config_)},
              {"created_at", created_at_ms_},
              {"phase", to_string(phase_)},
              {"last_seq", last_seq_},
              {"pool", pool_},
              {"candidates", to_json(candidates_)},
              {"bandit", bandit_ready_ ? to_json(bandit_) : Json(nullptr)},
              {"pending", std::move(pending)},
              {"shown", std::move(shown)},
              {"assignment", assignment_ ? to_json(*assignment_) : Json(nullptr)}};
}

Json Session::summary_json() const {
  Json participants = Json::array();
  std::size_t converged = 0;
  for (const auto& p : pool_) {
    const bool done = bandit_ready_ && participant_converged(p.id);
    converged += done ? 1 : 0;
    participants.push_back(
        {{"id", p.id},
         {"name", p.display_name},
         {"rounds", bandit_ready_ ? bandit_.rounds(bandit_.user_index(p.id)) : 0},
         {"converged", done}});
  }
  Json j{{"session_id", id_},
         {"phase", to_string(phase_)},
         {"team_size", config_.team_size},
         {"batch", config_.batch},
         {"participant_count", pool_.size()},
         {"candidate_count", candidates_.candidates.size()},
         {"converged_count", converged},
         {"participants", std::move(participants)},
         {"last_seq", last_seq_},
         {"state_hash", state_hash()}};
  if (assignment_) j["assignment"] = to_json(*assignment_);
  return j;
}

Session replay(std::span<const EventRecord> events) {
  if (events.empty()) {
    fail(ErrorKind::kCorrupt, "empty event log: no SessionCreated record");
  }
  Session session;
  for (const auto& e : events) session.apply(e);
  return session;
}

std::vector<EventRecord> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kNotFound, "cannot read event log " + path.string());
  std::vector<EventRecord> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      events.push_back(event_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      fail(ErrorKind::kCorrupt, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return events;
}

std::map<std::string, Session> replay_log(const std::filesystem::path& path) {
  std::map<std::string, std::vector<EventRecord>> by_session;
  for (auto& e : read_event_log(path)) {
    if (!e.payload.contains("session_id") || !e.payload["session_id"].is_string()) {
      corrupt(e.seq, "payload has no session_id");
    }
    by_session[e.payload["session_id"].get<std::string>()].push_back(std::move(e));
  }
  std::map<std::string, Session> sessions;
  for (const auto& [id, events] : by_session) sessions.emplace(id, replay(events));
  return sessions;
}

// -- EventSink ----------------------------------------------------------------

EventSink::EventSink(const std::filesystem::path& path)
    : out_(path, std::ios::app) {
  if (!out_) fail(ErrorKind::kInvalidArgument, "cannot open event log " + path.string());
}

void EventSink::append(const EventRecord& event) {
  std::lock_guard lock(mutex_);
  if (!out_.is_open()) return;
  out_ << to_json(event).dump() << '\n';
  out_.flush();
}

void EventSink::flush() {
  std::lock_guard lock(mutex_);
  if (out_.is_open()) out_.flush();
}

// -- SessionService -----------------------------------------------------------

SessionService::SessionService(ServiceOptions options)
    : options_(std::move(options)) {
  if (!options_.make_session_id) options_.make_session_id = default_session_id;
  if (!options_.clock) options_.clock = system_clock_ms;
  if (options_.log_path) sink_ = std::make_unique<EventSink>(*options_.log_path);
}

SessionService::Slot& SessionService::slot(std::string_view session_id) const {
  std::shared_lock lock(registry_mutex_);
  auto it = sessions_.find(std::string(session_id));
  if (it == sessions_.end()) {
    fail(ErrorKind::kNotFound, "unknown session '" + std::string(session_id) + "'");
  }
  return *it->second;
}

void SessionService::commit(Slot& slot, const EventRecord& event) {
  slot.session.apply(event);
  slot.log.push_back(event);
  if (sink_) sink_->append(event);
}

std::string SessionService::create_session(const SessionConfig& config,
                                           std::vector<Participant> pool) {
  std::string id = options_.make_session_id();
  auto events = Session::creation_events(id, config, std::move(pool),
                                         options_.clock());
  auto fresh = std::make_unique<Slot>();
  std::unique_lock lock(registry_mutex_);
  require(sessions_.count(id) == 0, "session id collision");
  for (const auto& e : events) commit(*fresh, e);
  sessions_.emplace(id, std::move(fresh));
  return id;
}

std::vector<TeamCard> SessionService::get_recommendations(
    std::string_view session_id, std::string_view participant_id) {
  Slot& s = slot(session_id);
  std::unique_lock lock(s.mutex);
  if (auto event = s.session.plan_recommendations(participant_id, options_.clock())) {
    commit(s, *event);
  }
  return s.session.current_cards(participant_id);
}

FeedbackAck SessionService::submit_feedback(std::string_view session_id,
                                            std::string_view participant_id,
                                            std::string_view team_id,
                                            int rating) {
  Slot& s = slot(session_id);
  std::unique_lock lock(s.mutex);
  commit(s, s.session.plan_feedback(participant_id, team_id, rating,
                                    options_.clock()));
  return FeedbackAck{true, s.session.participant_converged(participant_id)};
}

Assignment SessionService::finalize(std::string_view session_id, bool force) {
  Slot& s = slot(session_id);
  std::unique_lock lock(s.mutex);
  commit(s, s.session.plan_finalize(force, options_.clock()));
  return *s.session.assignment();
}

Json SessionService::summary(std::string_view session_id) const {
  Slot& s = slot(session_id);
  std::shared_lock lock(s.mutex);
  return s.session.summary_json();
}

std::vector<EventRecord> SessionService::events(std::string_view session_id,
                                                std::uint64_t since) const {
  Slot& s = slot(session_id);
  std::shared_lock lock(s.mutex);
  std::vector<EventRecord> out;
  for (const auto& e : s.log) {
    if (e.seq > since) out.push_back(e);
  }
  return out;
}

std::string SessionService::state_hash(std::string_view session_id) const {
  Slot& s = slot(session_id);
  std::shared_lock lock(s.mutex);
  return s.session.state_hash();
}

Json SessionService::state_json(std::string_view session_id) const {
  Slot& s = slot(session_id);
  std::shared_lock lock(s.mutex);
  return s.session.state_json();
}

std::vector<std::string> SessionService::session_ids() const {
  std::shared_lock lock(registry_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void SessionService::flush() {
  if (sink_) sink_->flush();
}

}  // namespace teamforge
