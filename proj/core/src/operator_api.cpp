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

#include "counterbot/operator_api.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

namespace counterbot {

using nlohmann::json;

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kTooLong:
    case ErrorCode::kEmptyText:
    case ErrorCode::kMissingColumn:
    case ErrorCode::kUnknownLabel:
      return 400;
    case ErrorCode::kUnauthorized: return 401;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kInvalidTransition:
    case ErrorCode::kDuplicateHandle:
      return 409;
    case ErrorCode::kPrecondition: return 503;
    default: return 500;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status_for(code), {{"error", {{"code", to_string(code)}, {"message", message}}}});
}

json parse_body(const httplib::Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kParse, "request body must be a JSON object");
  return j;
}

std::string string_field(const json& j, const char* name, bool required) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) {
    if (required) throw Error(ErrorCode::kInvalidArgument, fmt::format("missing field '{}'", name));
    return {};
  }
  if (!it->is_string()) throw Error(ErrorCode::kInvalidArgument, fmt::format("field '{}' must be a string", name));
  return it->get<std::string>();
}

json theta_json(const OperatorConfig& config) {
  json history = json::array();
  for (const auto& c : config.history()) {
    history.push_back({{"theta", c.theta}, {"at", format_instant(c.at)}, {"operator", c.operator_name}});
  }
  const auto& l = config.limits();
  return {{"theta", config.theta()},
          {"daily_cap", l.daily_cap},
          {"min_interval_seconds", std::chrono::duration<double>(l.min_interval).count()},
          {"history", std::move(history)}};
}

}  // namespace

OperatorServer::OperatorServer(OperatorConfig& config, PositivitweetLibrary& library,
                               std::function<PipelineStats()> stats, LiveRunner* runner, OperatorApiOptions options)
    : config_(config),
      library_(library),
      stats_(std::move(stats)),
      runner_(runner),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  if (!options_.dev_mode && options_.token.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "operator API needs a token outside dev mode");
  }
  server_->set_tcp_nodelay(true);
  install_routes();
}

OperatorServer::~OperatorServer() { stop(); }

bool OperatorServer::authorized(const std::string& header) const {
  if (options_.dev_mode) return true;
  return header == "Bearer " + options_.token;
}

void OperatorServer::install_routes() {
  // Wraps a handler with auth and error translation.
  const auto guarded = [this](auto handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req.get_header_value("Authorization"))) {
        send_error(res, ErrorCode::kUnauthorized, "missing or invalid bearer token");
        return;
      }
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const std::exception& e) {
        send_error(res, ErrorCode::kStorage, e.what());
      }
    };
  };

  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"ok", true}}); });

  server_->Get("/stats", guarded([this](const httplib::Request&, httplib::Response& res) {
    PipelineStats s;
    if (stats_) {
      s = stats_();
    } else {
      s.approved_library_size = library_.approved_count();
      s.current_theta = config_.theta();
    }
    send_json(res, 200, s.to_json());
  }));

  server_->Get("/config/threshold", guarded([this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, theta_json(config_));
  }));

  server_->Put("/config/threshold", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    auto it = body.find("theta");
    if (it == body.end() || !it->is_number()) throw Error(ErrorCode::kInvalidArgument, "field 'theta' must be a number");
    std::string op = string_field(body, "operator", false);
    if (op.empty()) op = "operator";
    config_.set_threshold(it->get<double>(), op);
    send_json(res, 200, theta_json(config_));
  }));

  server_->Get("/curation", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::optional<EntryState> state;
    if (req.has_param("state") && !req.get_param_value("state").empty()) {
      state = parse_entry_state(req.get_param_value("state"));
    }
    json entries = json::array();
    for (const auto& e : library_.list(state)) entries.push_back(entry_to_json(e));
    send_json(res, 200, {{"entries", std::move(entries)}});
  }));

  server_->Post("/curation", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const std::string text = string_field(body, "text", true);
    std::optional<std::string> credit;
    if (auto c = string_field(body, "credit_handle", false); !c.empty()) credit = std::move(c);
    send_json(res, 201, entry_to_json(library_.submit(text, credit)));
  }));

  server_->Post(R"(/curation/([^/]+)/review)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const std::string action = string_field(body, "action", true);
    std::optional<std::string> new_text;
    if (body.contains("new_text") && !body["new_text"].is_null()) new_text = string_field(body, "new_text", true);
    std::string op = string_field(body, "operator", false);
    if (op.empty()) op = "operator";
    const auto entry = library_.review(req.matches[1].str(), ReviewAction::parse(action, new_text), op);
    send_json(res, 200, entry_to_json(entry));
  }));

  server_->Post("/ingest", guarded([this](const httplib::Request& req, httplib::Response& res) {
    if (!runner_) throw Error(ErrorCode::kPrecondition, "ingestion is not enabled on this server");
    const json body = parse_body(req);
    Tweet t = tweet_from_json(body);
    const std::string id = t.id;
    const AdmitDecision d = runner_->submit(std::move(t));
    if (d.admitted) {
      send_json(res, 202, {{"status", "accepted"}, {"id", id}});
    } else {
      send_json(res, 200, {{"status", "filtered"}, {"id", id}, {"reason", d.reason}});
    }
  }));
}

int OperatorServer::start(const std::string& host, int port) {
  if (thread_.joinable()) throw Error(ErrorCode::kPrecondition, "operator server already running");
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw Error(ErrorCode::kIo, fmt::format("cannot bind operator API to {}:{}", host, port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void OperatorServer::listen_blocking(const std::string& host, int port) {
  port_ = port;
  if (!server_->listen(host, port)) throw Error(ErrorCode::kIo, fmt::format("cannot listen on {}:{}", host, port));
}

void OperatorServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace counterbot
