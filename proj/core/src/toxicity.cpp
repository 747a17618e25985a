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

#include "counterbot/toxicity.hpp"

#include <fstream>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "counterbot/error.hpp"

namespace counterbot {

using nlohmann::json;

namespace {

AttributeScores parse_score_map(const json& j, const char* what) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, fmt::format("{} must be an object", what));
  AttributeScores out;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number()) throw Error(ErrorCode::kParse, fmt::format("{}.{} is not a number", what, name));
    const double v = value.get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kOutOfRange, fmt::format("{}.{} = {} is outside [0, 1]", what, name, v));
    }
    out.emplace(name, v);
  }
  return out;
}

std::string error_body(std::string_view code, std::string_view message) {
  return json{{"error", {{"code", code}, {"message", message}}}}.dump();
}

}  // namespace

// ---------------------------------------------------------------------------
// ToxicityRules
// ---------------------------------------------------------------------------

ToxicityRules ToxicityRules::from_json(const json& j) {
  ToxicityRules rules;
  try {
    if (j.contains("default")) rules.defaults_ = parse_score_map(j.at("default"), "default");
    if (j.contains("rules")) {
      for (const auto& r : j.at("rules")) {
        rules.add_rule(r.at("pattern").get<std::string>(), parse_score_map(r.at("scores"), "scores"));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad toxicity rules: {}", e.what()));
  }
  return rules;
}

ToxicityRules ToxicityRules::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open rules file '{}'", path.string()));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("rules file '{}': {}", path.string(), e.what()));
  }
  return from_json(j);
}

void ToxicityRules::add_rule(const std::string& pattern, AttributeScores scores) {
  try {
    rules_.push_back({pattern, std::regex(pattern, std::regex::ECMAScript | std::regex::optimize), std::move(scores)});
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad rule pattern '{}': {}", pattern, e.what()));
  }
}

AttributeScores ToxicityRules::evaluate(std::string_view text, const std::vector<std::string>& attributes) const {
  const AttributeScores* override_scores = nullptr;
  for (const auto& rule : rules_) {
    if (std::regex_search(text.begin(), text.end(), rule.regex)) {
      override_scores = &rule.scores;
      break;
    }
  }
  AttributeScores out;
  for (const auto& attr : attributes) {
    if (override_scores) {
      if (auto it = override_scores->find(attr); it != override_scores->end()) {
        out.emplace(attr, it->second);
        continue;
      }
    }
    auto it = defaults_.find(attr);
    if (it == defaults_.end()) throw Error(ErrorCode::kMissingAttribute, fmt::format("no score for attribute '{}'", attr));
    out.emplace(attr, it->second);
  }
  return out;
}

AttributeScores RuleToxicityScorer::score(std::string_view text, const std::vector<std::string>& attributes,
                                          Deadline) {
  if (text.empty()) throw Error(ErrorCode::kPrecondition, "cannot score empty text");
  return rules_.evaluate(text, attributes);
}

// ---------------------------------------------------------------------------
// HttpToxicityClient
// ---------------------------------------------------------------------------

HttpToxicityClient::HttpToxicityClient(HttpScorerOptions options) : options_(std::move(options)) {
  if (options_.url.empty()) throw Error(ErrorCode::kInvalidArgument, "scorer url is empty");
  if (options_.max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, "max_attempts must be at least 1");
  if (options_.pool_size == 0) options_.pool_size = 1;
  // Validates the URL eagerly.
  httplib::Client probe(options_.url);
  if (!probe.is_valid()) throw Error(ErrorCode::kInvalidArgument, fmt::format("invalid scorer url '{}'", options_.url));
}

HttpToxicityClient::~HttpToxicityClient() = default;

std::unique_ptr<httplib::Client> HttpToxicityClient::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !idle_.empty() || created_ < options_.pool_size; });
  if (!idle_.empty()) {
    auto c = std::move(idle_.back());
    idle_.pop_back();
    return c;
  }
  ++created_;
  lock.unlock();
  auto c = std::make_unique<httplib::Client>(options_.url);
  c->set_keep_alive(true);
  c->set_tcp_nodelay(true);
  return c;
}

void HttpToxicityClient::release(std::unique_ptr<httplib::Client> client) {
  {
    std::lock_guard lock(mu_);
    if (client) {
      idle_.push_back(std::move(client));
    } else {
      --created_;
    }
  }
  cv_.notify_one();
}

AttributeScores HttpToxicityClient::parse_response(std::string_view body, const std::vector<std::string>& attributes) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kMalformedResponse, "scorer response is not a JSON object");
  auto it = j.find("scores");
  if (it == j.end() || !it->is_object()) throw Error(ErrorCode::kMalformedResponse, "scorer response lacks a 'scores' object");
  AttributeScores out;
  for (const auto& attr : attributes) {
    auto v = it->find(attr);
    if (v == it->end()) throw Error(ErrorCode::kMissingAttribute, fmt::format("scorer response lacks attribute '{}'", attr));
    if (!v->is_number()) throw Error(ErrorCode::kMalformedResponse, fmt::format("score for '{}' is not a number", attr));
    const double x = v->get<double>();
    if (!(x >= 0.0 && x <= 1.0)) {
      throw Error(ErrorCode::kMalformedResponse, fmt::format("score for '{}' = {} is outside [0, 1]", attr, x));
    }
    out.emplace(attr, x);
  }
  return out;
}

AttributeScores HttpToxicityClient::score(std::string_view text, const std::vector<std::string>& attributes,
                                          Deadline deadline) {
  if (text.empty()) throw Error(ErrorCode::kPrecondition, "cannot score empty text");
  if (attributes.empty()) throw Error(ErrorCode::kPrecondition, "no attributes requested");

  const std::string body = json{{"text", text}, {"attributes", attributes}}.dump();
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("x-api-key", options_.api_key);

  using std::chrono::steady_clock;
  Millis backoff = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    Millis budget = options_.request_timeout;
    if (deadline != Deadline::max()) {
      const auto left = std::chrono::duration_cast<Millis>(deadline - steady_clock::now());
      if (left <= Millis{0}) throw Error(ErrorCode::kTimeout, fmt::format("scorer deadline exceeded ({})", last_error));
      budget = std::min(budget, left);
    }

    auto client = acquire();
    client->set_connection_timeout(budget);
    client->set_read_timeout(budget);
    client->set_write_timeout(budget);
    auto res = client->Post("/v1/score", headers, body, "application/json");
    if (!res) {
      last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
      client->stop();
      release(nullptr);
    } else {
      release(std::move(client));
      const int status = res->status;
      if (status == 200) return parse_response(res->body, attributes);
      last_error = fmt::format("HTTP {}", status);
      if (status == 422) throw Error(ErrorCode::kMissingAttribute, fmt::format("scorer could not score: {}", res->body));
      if (status != 429 && status < 500) throw Error(ErrorCode::kHttpStatus, fmt::format("scorer returned {}", last_error));
    }

    if (attempt == options_.max_attempts) break;
    spdlog::debug("scorer attempt {} failed ({}); retrying in {} ms", attempt, last_error, backoff.count());
    if (deadline != Deadline::max() && steady_clock::now() + backoff >= deadline) {
      throw Error(ErrorCode::kTimeout, fmt::format("scorer deadline exceeded ({})", last_error));
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
  const bool transport = last_error.starts_with("transport");
  throw Error(transport ? ErrorCode::kTransport : ErrorCode::kHttpStatus,
              fmt::format("scorer failed after {} attempts: {}", options_.max_attempts, last_error));
}

// ---------------------------------------------------------------------------
// MockToxicityServer
// ---------------------------------------------------------------------------

MockToxicityServer::MockToxicityServer(ToxicityRules rules, std::string required_api_key)
    : rules_(std::move(rules)), api_key_(std::move(required_api_key)), server_(std::make_unique<httplib::Server>()) {
  server_->set_keep_alive_max_count(1u << 20);
  server_->set_tcp_nodelay(true);
  install_routes();
}

MockToxicityServer::~MockToxicityServer() { stop(); }

void MockToxicityServer::install_routes() {
  server_->Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
    requests_.fetch_add(1);
    {
      std::lock_guard lock(inject_mu_);
      if (inject_remaining_ > 0) {
        --inject_remaining_;
        res.status = inject_status_;
        res.set_content(inject_body_, "application/json");
        return;
      }
    }
    if (!api_key_.empty() && req.get_header_value("x-api-key") != api_key_) {
      res.status = 401;
      res.set_content(error_body("unauthorized", "bad or missing api key"), "application/json");
      return;
    }
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string() ||
        !j.contains("attributes") || !j["attributes"].is_array()) {
      res.status = 400;
      res.set_content(error_body("invalid_argument", "expected {\"text\": string, \"attributes\": [string]}"),
                      "application/json");
      return;
    }
    const auto text = j["text"].get<std::string>();
    std::vector<std::string> attributes;
    for (const auto& a : j["attributes"]) {
      if (!a.is_string()) {
        res.status = 400;
        res.set_content(error_body("invalid_argument", "attribute names must be strings"), "application/json");
        return;
      }
      attributes.push_back(a.get<std::string>());
    }
    if (text.empty()) {
      res.status = 400;
      res.set_content(error_body("precondition", "empty text"), "application/json");
      return;
    }
    try {
      const auto scores = rules_.evaluate(text, attributes);
      res.set_content(json{{"scores", scores}}.dump(), "application/json");
    } catch (const Error& e) {
      res.status = 422;
      res.set_content(error_body(to_string(e.code()), e.what()), "application/json");
    }
  });
}

int MockToxicityServer::start(const std::string& host, int port) {
  if (thread_.joinable()) throw Error(ErrorCode::kPrecondition, "mock scorer already running");
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw Error(ErrorCode::kIo, fmt::format("cannot bind mock scorer to {}:{}", host, port));
  host_ = host;
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockToxicityServer::listen_blocking(const std::string& host, int port) {
  port_ = port;
  host_ = host;
  if (!server_->listen(host, port)) throw Error(ErrorCode::kIo, fmt::format("cannot listen on {}:{}", host, port));
}

void MockToxicityServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockToxicityServer::url() const { return fmt::format("http://{}:{}", host_, port_); }

void MockToxicityServer::fail_next(int n, int status) {
  respond_next(n, status, error_body("injected", fmt::format("injected HTTP {}", status)));
}

void MockToxicityServer::respond_next(int n, int status, std::string body) {
  std::lock_guard lock(inject_mu_);
  inject_remaining_ = n;
  inject_status_ = status;
  inject_body_ = std::move(body);
}

}  // namespace counterbot
