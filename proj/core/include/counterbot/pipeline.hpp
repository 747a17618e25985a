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
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "counterbot/corpus.hpp"
#include "counterbot/curation.hpp"
#include "counterbot/featurize.hpp"
#include "counterbot/records.hpp"
#include "counterbot/store.hpp"
#include "counterbot/time.hpp"

namespace counterbot {

// ---------------------------------------------------------------------------
// Admission
// ---------------------------------------------------------------------------

struct StreamFilterConfig {
  std::set<std::string> tracked_handles;  // lowercase, no '@'
  std::string required_lang = "en";
  bool exclude_retweets = true;
  std::string self_handle;

  /// Lowercases and strips '@' from the given handles.
  static StreamFilterConfig from_handles(const std::vector<std::string>& handles, std::string self_handle = {});
  /// Throws Error(kPrecondition) when no handle is tracked.
  void validate() const;
};

struct AdmitDecision {
  bool admitted = false;
  /// Empty when admitted; otherwise lang, retweet, self or untracked.
  std::string reason;
};

AdmitDecision check_admission(const Tweet& tweet, const StreamFilterConfig& cfg);
inline bool admit(const Tweet& tweet, const StreamFilterConfig& cfg) { return check_admission(tweet, cfg).admitted; }

// ---------------------------------------------------------------------------
// Responding
// ---------------------------------------------------------------------------

/// Daily cap per UTC day plus a minimum spacing between responses. Requests
/// earlier than the last response are refused, so accepted times never go
/// backwards.
class RateLimiter {
 public:
  explicit RateLimiter(RateLimitConfig config = {});

  bool permits(Instant now) const;
  /// Records a response at `now` when permitted.
  bool try_acquire(Instant now);
  /// Records a response unconditionally (restoring persisted state).
  void record(Instant now);

  const RateLimitConfig& config() const { return config_; }
  std::optional<Instant> last() const { return last_; }
  int sent_on(std::int64_t utc_day_index) const { return day_ == utc_day_index ? day_count_ : 0; }

 private:
  RateLimitConfig config_;
  std::optional<Instant> last_;
  std::int64_t day_ = 0;
  int day_count_ = 0;
};

/// Adapter boundary toward the posting platform.
class ResponsePublisher {
 public:
  virtual ~ResponsePublisher() = default;
  virtual void publish(const ResponseEvent& event, const std::string& text) = 0;
};

/// Logs posts at debug level.
class LogPublisher final : public ResponsePublisher {
 public:
  void publish(const ResponseEvent& event, const std::string& text) override;
};

struct ResponderCounters {
  std::int64_t sent = 0;
  std::int64_t suppressed = 0;
  std::int64_t library_empty = 0;
};

/// Single consumer of decided records. Draws approved positivitweets
/// uniformly without repetition until each approved entry has been used once
/// in the current cycle, then starts a new cycle.
class Responder {
 public:
  Responder(RateLimiter limiter, const PositivitweetLibrary& library, std::uint64_t seed, Store* store = nullptr,
            ResponsePublisher* publisher = nullptr);

  /// Throws Error(kPrecondition) unless record.decided.
  std::optional<ResponseEvent> maybe_respond(const ScoreRecord& record, Instant now);

  ResponderCounters counters() const;
  /// Raised when a decision found no approved entry; cleared by the next send.
  bool library_alert() const { return alert_.load(); }
  std::optional<Instant> last_sent() const;

 private:
  mutable std::mutex mu_;
  RateLimiter limiter_;
  const PositivitweetLibrary& library_;
  std::mt19937_64 rng_;
  Store* store_;
  ResponsePublisher* publisher_;
  std::set<std::string> drawn_;
  std::uint64_t next_seq_ = 1;
  ResponderCounters counters_;
  std::atomic<bool> alert_{false};
};

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Output of the scoring stage for one tweet.
struct Analysis {
  std::string clean_text;
  std::vector<double> features;
  double toxicity = 0.0;
  bool ok = false;
  std::string error_code;
  std::string error_message;
};

struct PipelineStats {
  std::int64_t analysed = 0;
  std::int64_t abusive = 0;
  std::int64_t sent = 0;
  std::int64_t suppressed = 0;
  std::int64_t unscored = 0;
  std::int64_t filtered = 0;
  std::int64_t duplicates = 0;
  std::size_t approved_library_size = 0;
  double current_theta = 0.0;
  std::optional<Instant> last_response_at;
  bool library_alert = false;

  nlohmann::json to_json() const;
};

struct PipelineDeps {
  Store& store;
  ScorerSet scorers;
  std::shared_ptr<const FeatureRegistry> registry;
  OperatorConfig& config;
  const PositivitweetLibrary& library;
  const Clock& clock;
  ResponsePublisher* publisher = nullptr;
};

class Pipeline {
 public:
  /// The registry must contain the trigger attribute (Error(kInvalidArgument)).
  Pipeline(PipelineDeps deps, StreamFilterConfig filter, std::uint64_t seed);

  AdmitDecision admit(const Tweet& tweet);
  /// Clean and featurize; never throws for scorer failures.
  Analysis analyze(const Tweet& tweet) const;
  /// Persists tweet and score and decides against one threshold snapshot.
  /// Returns nullopt for an already-stored tweet unless `retry` is set.
  std::optional<ScoreRecord> commit(const Tweet& tweet, const Analysis& analysis, Instant received_at,
                                    bool retry = false);
  std::optional<ScoreRecord> process(const Tweet& tweet, Instant received_at);
  /// Passes a decided record to the responder.
  std::optional<ResponseEvent> respond(const ScoreRecord& record);
  /// Re-scores tweets whose every attempt failed; returns how many succeeded.
  std::size_t retry_failed();

  PipelineStats stats() const;
  const StreamFilterConfig& filter() const { return filter_; }
  Store& store() { return deps_.store; }

 private:
  PipelineDeps deps_;
  StreamFilterConfig filter_;
  std::size_t trigger_index_ = 0;
  Responder responder_;
  std::atomic<std::int64_t> analysed_{0};
  std::atomic<std::int64_t> abusive_{0};
  std::atomic<std::int64_t> unscored_{0};
  std::atomic<std::int64_t> filtered_{0};
  std::atomic<std::int64_t> duplicates_{0};
};

/// Live processing: admitted tweets are scored on worker threads and
/// decided records flow to one responder thread.
class LiveRunner {
 public:
  LiveRunner(Pipeline& pipeline, unsigned workers = 4);
  ~LiveRunner();

  LiveRunner(const LiveRunner&) = delete;
  LiveRunner& operator=(const LiveRunner&) = delete;

  /// Runs admission inline; admitted tweets are queued for scoring.
  AdmitDecision submit(Tweet tweet);
  /// Blocks until every queued tweet and decision has been handled.
  void drain();
  void stop();

 private:
  void work();
  void respond_loop();

  Pipeline& pipeline_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::pair<Tweet, Instant>> tweets_;
  std::deque<ScoreRecord> decisions_;
  std::size_t busy_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
  std::thread responder_;
};

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

struct ReplayOptions {
  /// Wall-clock pacing in tweets per second; 0 replays unthrottled.
  double rate = 0.0;
  unsigned workers = 4;
  std::size_t batch = 256;
};

struct ReplaySummary {
  std::int64_t lines = 0;
  std::int64_t malformed = 0;
  std::int64_t filtered = 0;
  std::int64_t duplicates = 0;
  std::int64_t admitted = 0;
  std::int64_t scored = 0;
  std::int64_t failed = 0;
  std::int64_t decided = 0;
  std::int64_t sent = 0;
  std::int64_t suppressed = 0;
  double elapsed_seconds = 0.0;

  nlohmann::json to_json() const;
};

/// Replays a JSON Lines fixture in event time: `clock` follows each tweet's
/// timestamp. Scoring runs on worker threads; persistence and decisions are
/// committed in fixture order, so results depend only on the fixture, the
/// scorers and the seed. Malformed lines are skipped and counted.
ReplaySummary replay(std::istream& fixture, Pipeline& pipeline, ManualClock& clock, const ReplayOptions& options = {});

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

struct ElectionReport {
  Period period;
  std::int64_t total_analysed = 0;
  std::int64_t total_abusive = 0;
  std::int64_t total_sent = 0;
  std::int64_t total_unscored = 0;
  std::vector<ThetaChange> theta_history;

  /// Throws Error(kInvalidArgument) when counts are negative or
  /// sent > abusive > analysed ordering is violated.
  static ElectionReport from_counts(std::int64_t analysed, std::int64_t abusive, std::int64_t sent);

  bool empty() const { return total_analysed == 0; }
  double abusive_rate() const;
  double sent_rate() const;

  /// Full-precision rates.
  nlohmann::json to_json() const;
  /// Rates as percentages with two decimals.
  std::string to_text() const;
};

/// "4.38%" style rendering of a rate.
std::string format_percent(double rate);

ElectionReport build_report(const Store& store, const Period& period);

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

struct FixtureSpec {
  std::size_t count = 1000;
  /// Tweets carrying an insult the bundled mock rules score at 0.95.
  std::size_t abusive = 100;
  /// Extra tweets the stream filter rejects (other language or retweets).
  std::size_t filtered = 0;
  std::uint64_t seed = 0;
  Instant start{};
  Millis spacing{60000};
  std::vector<std::string> handles;
};

/// Writes count + filtered JSON Lines tweets in timestamp order.
void write_fixture(std::ostream& out, const FixtureSpec& spec);

}  // namespace counterbot
