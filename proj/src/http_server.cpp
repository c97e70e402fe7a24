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

#include "teamforge/http_server.hpp"

#include "httplib.h"

namespace teamforge {

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return 400;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kConflict:
      return 409;
    case ErrorKind::kInfeasible:
      return 422;
    case ErrorKind::kCorrupt:
      return 500;
  }
  return 500;
}

void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kInvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

// Runs a handler and turns exceptions into JSON error responses.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_json(res, Json{{"error", e.what()}}, status_for(e.kind()));
    } catch (const Json::exception& e) {
      send_json(res, Json{{"error", std::string("bad request: ") + e.what()}}, 400);
    } catch (const std::exception& e) {
      send_json(res, Json{{"error", e.what()}}, 500);
    }
  };
}

}  // namespace

HttpServer::HttpServer(SessionService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) fail(ErrorKind::kInvalidArgument, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    fail(ErrorKind::kInvalidArgument,
         "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

void HttpServer::install_routes() {
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server_->Options(R"(/sessions.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server_->Post("/sessions", guarded([this](const httplib::Request& req,
                                            httplib::Response& res) {
    const Json body = parse_body(req);
    require(body.contains("participants"), "body needs \"participants\"");
    const SessionConfig config =
        session_config_from_json(body.value("config", Json::object()));
    std::vector<Participant> pool;
    try {
      pool = parse_pool(body["participants"]);
    } catch (const Json::exception& e) {
      fail(ErrorKind::kInvalidArgument, std::string("bad participants: ") + e.what());
    }
    const std::string id = service_.create_session(config, std::move(pool));
    send_json(res, Json{{"session_id", id}}, 201);
  }));

  server_->Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req,
                                                      httplib::Response& res) {
    send_json(res, service_.summary(req.matches[1].str()));
  }));

  server_->Get(R"(/sessions/([^/]+)/recommendations)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 require(req.has_param("participant"),
                         "query parameter \"participant\" is required");
                 const auto cards = service_.get_recommendations(
                     req.matches[1].str(), req.get_param_value("participant"));
                 Json teams = Json::array();
                 for (const auto& card : cards) teams.push_back(to_json(card));
                 send_json(res, Json{{"teams", std::move(teams)}});
               }));

  server_->Post(R"(/sessions/([^/]+)/feedback)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const Json body = parse_body(req);
                  require(body.contains("participant_id") && body.contains("team_id") &&
                              body.contains("rating"),
                          "body needs participant_id, team_id and rating");
                  require(body["rating"].is_number_integer(),
                          "rating must be an integer in 1..5");
                  const FeedbackAck ack = service_.submit_feedback(
                      req.matches[1].str(), body["participant_id"].get<std::string>(),
                      body["team_id"].get<std::string>(), body["rating"].get<int>());
                  send_json(res, Json{{"ok", ack.ok}, {"converged", ack.converged}});
                }));

  server_->Post(R"(/sessions/([^/]+)/finalize)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const Json body = parse_body(req);
                  const bool force = body.value("force", false);
                  send_json(res, to_json(service_.finalize(req.matches[1].str(), force)));
                }));

  server_->Get(R"(/sessions/([^/]+)/events)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 std::uint64_t since = 0;
                 if (req.has_param("since")) {
                   try {
                     since = std::stoull(req.get_param_value("since"));
                   } catch (const std::exception&) {
                     fail(ErrorKind::kInvalidArgument, "since must be a sequence number");
                   }
                 }
                 Json events = Json::array();
                 for (const auto& e : service_.events(req.matches[1].str(), since)) {
                   events.push_back(to_json(e));
                 }
                 send_json(res, Json{{"events", std::move(events)}});
               }));
}

}  // namespace teamforge
