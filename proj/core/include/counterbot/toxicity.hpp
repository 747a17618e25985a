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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "counterbot/time.hpp"

namespace httplib {
class Client;
class Server;
}  // namespace httplib

namespace counterbot {

/// Attribute name -> probability in [0, 1].
using AttributeScores = std::map<std::string, double>;

using Deadline = std::chrono::steady_clock::time_point;

/// Source of toxicity attribute scores. Implementations must be safe to call
/// from several threads at once.
class ToxicityScorer {
 public:
  virtual ~ToxicityScorer() = default;

  /// Exactly one score per requested attribute. Errors are Error with codes
  /// kPrecondition (empty text), kTransport, kHttpStatus, kTimeout,
  /// kMalformedResponse or kMissingAttribute.
  virtual AttributeScores score(std::string_view text, const std::vector<std::string>& attributes,
                                Deadline deadline) = 0;

  AttributeScores score(std::string_view text, const std::vector<std::string>& attributes) {
    return score(text, attributes, Deadline::max());
  }
};

// ---------------------------------------------------------------------------
// Deterministic rule-based scoring (the mock server's engine)
// ---------------------------------------------------------------------------

/// Rules file:
///   {"default": {"TOXICITY": 0.1, ...},
///    "rules": [{"pattern": "regex", "scores": {"TOXICITY": 0.95}}, ...]}
/// The first rule whose pattern is found in the text overrides the default
/// entries it names.
class ToxicityRules {
 public:
  ToxicityRules() = default;

  static ToxicityRules from_json(const nlohmann::json& j);
  static ToxicityRules load(const std::filesystem::path& path);

  /// Throws Error(kMissingAttribute) when an attribute has no score.
  AttributeScores evaluate(std::string_view text, const std::vector<std::string>& attributes) const;

  AttributeScores& defaults() { return defaults_; }
  void add_rule(const std::string& pattern, AttributeScores scores);

 private:
  struct Rule {
    std::string pattern;
    std::regex regex;
    AttributeScores scores;
  };
  AttributeScores defaults_;
  std::vector<Rule> rules_;
};

/// In-process ToxicityScorer backed by ToxicityRules.
class RuleToxicityScorer final : public ToxicityScorer {
 public:
  explicit RuleToxicityScorer(ToxicityRules rules) : rules_(std::move(rules)) {}
  using ToxicityScorer::score;
  AttributeScores score(std::string_view text, const std::vector<std::string>& attributes,
                        Deadline deadline) override;

 private:
  ToxicityRules rules_;
};

// ---------------------------------------------------------------------------
// HTTP client for POST /v1/score
// ---------------------------------------------------------------------------

struct HttpScorerOptions {
  /// Base URL, e.g. "http://127.0.0.1:8081".
  std::string url;
  /// Sent as "x-api-key" when non-empty.
  std::string api_key;
  int max_attempts = 3;
  Millis initial_backoff{50};
  Millis request_timeout{2000};
  std::size_t pool_size = 4;
};

/// Environment variable consulted for the scorer API key.
inline constexpr const char* kScorerApiKeyEnv = "COUNTERBOT_SCORER_API_KEY";

class HttpToxicityClient final : public ToxicityScorer {
 public:
  explicit HttpToxicityClient(HttpScorerOptions options);
  ~HttpToxicityClient() override;

  HttpToxicityClient(const HttpToxicityClient&) = delete;
  HttpToxicityClient& operator=(const HttpToxicityClient&) = delete;

  using ToxicityScorer::score;
  /// Transport failures, 429 and 5xx are retried with exponential backoff up
  /// to max_attempts; other statuses fail immediately.
  AttributeScores score(std::string_view text, const std::vector<std::string>& attributes,
                        Deadline deadline) override;

  /// Checks a decoded response body against the requested attributes.
  static AttributeScores parse_response(std::string_view body, const std::vector<std::string>& attributes);

 private:
  std::unique_ptr<httplib::Client> acquire();
  void release(std::unique_ptr<httplib::Client> client);

  HttpScorerOptions options_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<httplib::Client>> idle_;
  std::size_t created_ = 0;
};

// ---------------------------------------------------------------------------
// Mock server
// ---------------------------------------------------------------------------

/// Serves the scoring protocol from a rule set. 200 only when every requested
/// attribute has a score; 400 on bad requests, 422 on unknown attributes.
/// Failure injection hooks let tests exercise client retry paths.
class MockToxicityServer {
 public:
  explicit MockToxicityServer(ToxicityRules rules, std::string required_api_key = {});
  ~MockToxicityServer();

  MockToxicityServer(const MockToxicityServer&) = delete;
  MockToxicityServer& operator=(const MockToxicityServer&) = delete;

  /// Binds to host:port (port 0 picks a free port) and serves on a
  /// background thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  void listen_blocking(const std::string& host, int port);
  void stop();

  int port() const { return port_; }
  std::string url() const;
  std::size_t request_count() const { return requests_.load(); }

  /// The next `n` requests answer with `status` instead of scoring.
  void fail_next(int n, int status = 503);
  /// The next `n` requests answer with a fixed status and body.
  void respond_next(int n, int status, std::string body);

 private:
  void install_routes();

  ToxicityRules rules_;
  std::string api_key_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
  std::mutex inject_mu_;
  int inject_remaining_ = 0;
  int inject_status_ = 503;
  std::string inject_body_;
};

}  // namespace counterbot
