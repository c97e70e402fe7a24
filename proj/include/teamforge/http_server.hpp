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

#include <memory>
#include <string>

#include "teamforge/service.hpp"

namespace httplib {
class Server;
}

namespace teamforge {

// HTTP + JSON front end for SessionService.
//
//   POST /sessions                         {config, participants}
//   GET  /sessions/{id}
//   GET  /sessions/{id}/recommendations?participant={pid}
//   POST /sessions/{id}/feedback           {participant_id, team_id, rating}
//   POST /sessions/{id}/finalize           {force}
//   GET  /sessions/{id}/events?since={seq}
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds without serving; port 0 picks an ephemeral port. Returns the bound
  // port or throws.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();

 private:
  void install_routes();

  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace teamforge
