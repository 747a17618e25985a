// Copyright 2026 The Counterbot Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "counterbot/curation.hpp"
#include "counterbot/error.hpp"
#include "counterbot/pipeline.hpp"

namespace httplib {
class Server;
}

namespace counterbot {

/// HTTP status used for an error code in API responses.
int http_status_for(ErrorCode code);

/// Environment variable holding the operator bearer token.
inline constexpr const char* kOperatorTokenEnv = "COUNTERBOT_OPERATOR_TOKEN";

struct OperatorApiOptions {
  /// Required as "Authorization: Bearer <token>" unless dev_mode.
  std::string token;
  bool dev_mode = false;
};

/// Operator control and ingestion endpoints:
///   GET  /stats
///   GET  /config/threshold            current value and history
///   PUT  /config/threshold            {"theta", "operator"}
///   GET  /curation?state=
///   POST /curation                    {"text", "credit_handle"?}
///   POST /curation/{id}/review        {"action", "new_text"?, "operator"}
///   POST /ingest                      Tweet object; 202 admitted, 200 filtered
///   GET  /healthz                     unauthenticated
/// Errors are {"error": {"code", "message"}} with a 4xx/5xx status.
class OperatorServer {
 public:
  /// `stats` and `runner` may be null; without a runner /ingest answers 503.
  OperatorServer(OperatorConfig& config, PositivitweetLibrary& library, std::function<PipelineStats()> stats,
                 LiveRunner* runner, OperatorApiOptions options);
  ~OperatorServer();

  OperatorServer(const OperatorServer&) = delete;
  OperatorServer& operator=(const OperatorServer&) = delete;

  /// Serves on a background thread; port 0 picks a free port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void listen_blocking(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  void install_routes();
  bool authorized(const std::string& header) const;

  OperatorConfig& config_;
  PositivitweetLibrary& library_;
  std::function<PipelineStats()> stats_;
  LiveRunner* runner_;
  OperatorApiOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace counterbot
