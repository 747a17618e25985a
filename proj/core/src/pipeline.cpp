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

#include "counterbot/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "counterbot/error.hpp"
#include "counterbot/gbdt.hpp"
#include "counterbot/textprep.hpp"

namespace counterbot {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Admission
// ---------------------------------------------------------------------------

StreamFilterConfig StreamFilterConfig::from_handles(const std::vector<std::string>& handles, std::string self_handle) {
  StreamFilterConfig cfg;
  for (const auto& h : handles) {
    std::string_view v = h;
    if (!v.empty() && v.front() == '@') v.remove_prefix(1);
    if (!v.empty()) cfg.tracked_handles.insert(ascii_lower(v));
  }
  if (!self_handle.empty() && self_handle.front() == '@') self_handle.erase(0, 1);
  cfg.self_handle = ascii_lower(self_handle);
  return cfg;
}

void StreamFilterConfig::validate() const {
  if (tracked_handles.empty()) throw Error(ErrorCode::kPrecondition, "no tracked handles configured");
}

AdmitDecision check_admission(const Tweet& tweet, const StreamFilterConfig& cfg) {
  if (ascii_lower(tweet.lang) != cfg.required_lang) return {false, "lang"};
  if (cfg.exclude_retweets && tweet.is_retweet) return {false, "retweet"};
  if (!cfg.self_handle.empty() && ascii_lower(tweet.author_handle) == cfg.self_handle) return {false, "self"};
  for (const auto& h : tweet.mentioned_handles) {
    if (cfg.tracked_handles.contains(ascii_lower(h))) return {true, {}};
  }
  return {false, "untracked"};
}

// ---------------------------------------------------------------------------
// RateLimiter
// ---------------------------------------------------------------------------

RateLimiter::RateLimiter(RateLimitConfig config) : config_(config) { config_.validate(); }

bool RateLimiter::permits(Instant now) const {
  if (last_ && now < *last_ + config_.min_interval) return false;
  if (last_ && now < *last_) return false;
  const int today = utc_day(now) == day_ ? day_count_ : 0;
  return today < config_.daily_cap;
}

bool RateLimiter::try_acquire(Instant now) {
  if (!permits(now)) return false;
  record(now);
  return true;
}

void RateLimiter::record(Instant now) {
  const std::int64_t day = utc_day(now);
  if (day != day_) {
    day_ = day;
    day_count_ = 0;
  }
  ++day_count_;
  if (!last_ || now > *last_) last_ = now;
}

void LogPublisher::publish(const ResponseEvent& event, const std::string& text) {
  spdlog::debug("posted {} for {}: {}", event.response_id, event.tweet_id, text);
}

// ---------------------------------------------------------------------------
// Responder
// ---------------------------------------------------------------------------

Responder::Responder(RateLimiter limiter, const PositivitweetLibrary& library, std::uint64_t seed, Store* store,
                     ResponsePublisher* publisher)
    : limiter_(std::move(limiter)), library_(library), rng_(seed), store_(store), publisher_(publisher) {
  if (store_) {
    const auto past = store_->responses();
    for (const auto& r : past) limiter_.record(r.sent_at);
    counters_.sent = static_cast<std::int64_t>(past.size());
    next_seq_ = past.size() + 1;
  }
}

std::optional<ResponseEvent> Responder::maybe_respond(const ScoreRecord& record, Instant now) {
  if (!record.decided) throw Error(ErrorCode::kPrecondition, "only decided records may trigger a response");
  std::lock_guard lock(mu_);
  const auto approved = library_.approved_ids();
  if (approved.empty()) {
    ++counters_.library_empty;
    if (!alert_.exchange(true)) spdlog::warn("no approved positivitweets; decision for {} dropped", record.tweet_id);
    return std::nullopt;
  }
  if (!limiter_.permits(now)) {
    ++counters_.suppressed;
    return std::nullopt;
  }
  std::vector<const std::string*> candidates;
  for (const auto& id : approved) {
    if (!drawn_.contains(id)) candidates.push_back(&id);
  }
  if (candidates.empty()) {
    drawn_.clear();
    for (const auto& id : approved) candidates.push_back(&id);
  }
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const std::string chosen = *candidates[pick(rng_)];

  ResponseEvent event{fmt::format("r-{:08d}", next_seq_), record.tweet_id, chosen, now};
  if (store_) store_->insert_response(event);
  ++next_seq_;
  limiter_.record(now);
  drawn_.insert(chosen);
  ++counters_.sent;
  alert_.store(false);
  if (publisher_) publisher_->publish(event, library_.text_of(chosen).value_or(std::string()));
  return event;
}

ResponderCounters Responder::counters() const {
  std::lock_guard lock(mu_);
  return counters_;
}

std::optional<Instant> Responder::last_sent() const {
  std::lock_guard lock(mu_);
  return limiter_.last();
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

json PipelineStats::to_json() const {
  return {{"analysed", analysed},
          {"abusive", abusive},
          {"sent", sent},
          {"suppressed", suppressed},
          {"unscored", unscored},
          {"filtered", filtered},
          {"duplicates", duplicates},
          {"approved_library_size", approved_library_size},
          {"current_theta", current_theta},
          {"last_response_at", last_response_at ? json(format_instant(*last_response_at)) : json(nullptr)},
          {"library_alert", library_alert}};
}

namespace {

std::size_t trigger_column(const std::shared_ptr<const FeatureRegistry>& registry) {
  if (!registry) throw Error(ErrorCode::kInvalidArgument, "pipeline needs a feature registry");
  auto idx = registry->index_of(kTriggerAttribute);
  if (!idx) throw Error(ErrorCode::kInvalidArgument, fmt::format("registry lacks the {} attribute", kTriggerAttribute));
  return *idx;
}

}  // namespace

Pipeline::Pipeline(PipelineDeps deps, StreamFilterConfig filter, std::uint64_t seed)
    : deps_(std::move(deps)),
      filter_(std::move(filter)),
      trigger_index_(trigger_column(deps_.registry)),
      responder_(RateLimiter(deps_.config.limits()), deps_.library, seed, &deps_.store, deps_.publisher) {
  filter_.validate();
  const StoreCounts c = deps_.store.counts();
  analysed_ = c.analysed;
  abusive_ = c.abusive;
  unscored_ = c.unscored;
}

AdmitDecision Pipeline::admit(const Tweet& tweet) {
  auto d = check_admission(tweet, filter_);
  if (!d.admitted) ++filtered_;
  return d;
}

Analysis Pipeline::analyze(const Tweet& tweet) const {
  Analysis a;
  const CleanText text = clean(tweet.text);
  a.clean_text = text.value();
  try {
    FeatureVector fv = featurize(text, deps_.registry, deps_.scorers);
    a.toxicity = fv.values[trigger_index_];
    a.features = std::move(fv.values);
    a.ok = true;
  } catch (const Error& e) {
    a.error_code = std::string(to_string(e.code()));
    a.error_message = e.what();
  } catch (const std::exception& e) {
    a.error_code = std::string(to_string(ErrorCode::kScorerFailure));
    a.error_message = e.what();
  }
  return a;
}

std::optional<ScoreRecord> Pipeline::commit(const Tweet& tweet, const Analysis& analysis, Instant received_at,
                                            bool retry) {
  Store::Transaction tx(deps_.store);
  if (!retry && !deps_.store.insert_tweet(tweet, received_at)) {
    ++duplicates_;
    return std::nullopt;
  }
  const ThetaSnapshot snap = deps_.config.snapshot();
  ScoreRecord r;
  r.tweet_id = tweet.id;
  r.clean_text = analysis.clean_text;
  r.received_at = received_at;
  r.scored_at = snap.at;
  if (analysis.ok) {
    r.status = ScoreStatus::kOk;
    r.features = analysis.features;
    r.toxicity = analysis.toxicity;
    r.decided = threshold_decide(analysis.toxicity, snap.theta);
    r.theta_at_decision = snap.theta;
    r.config_version = snap.version;
  } else {
    r.status = ScoreStatus::kFailed;
    r.error_code = analysis.error_code;
    r.error_message = analysis.error_message;
  }
  deps_.store.insert_score(r);
  tx.commit();
  if (r.ok()) {
    ++analysed_;
    if (r.decided) ++abusive_;
    if (retry) --unscored_;
  } else if (!retry) {
    ++unscored_;
    spdlog::warn("scoring failed for tweet {}: {}", tweet.id, analysis.error_message);
  }
  return r;
}

std::optional<ScoreRecord> Pipeline::process(const Tweet& tweet, Instant received_at) {
  return commit(tweet, analyze(tweet), received_at);
}

std::optional<ResponseEvent> Pipeline::respond(const ScoreRecord& record) {
  if (!record.decided) return std::nullopt;
  return responder_.maybe_respond(record, deps_.clock.now());
}

std::size_t Pipeline::retry_failed() {
  std::size_t recovered = 0;
  for (const Tweet& t : deps_.store.pending_retries()) {
    auto rec = commit(t, analyze(t), deps_.clock.now(), true);
    if (rec && rec->ok()) {
      ++recovered;
      respond(*rec);
    }
  }
  return recovered;
}

PipelineStats Pipeline::stats() const {
  const ResponderCounters rc = responder_.counters();
  PipelineStats s;
  s.analysed = analysed_.load();
  s.abusive = abusive_.load();
  s.sent = rc.sent;
  s.suppressed = rc.suppressed;
  s.unscored = unscored_.load();
  s.filtered = filtered_.load();
  s.duplicates = duplicates_.load();
  s.approved_library_size = deps_.library.approved_count();
  s.current_theta = deps_.config.theta();
  s.last_response_at = responder_.last_sent();
  s.library_alert = responder_.library_alert();
  return s;
}

// ---------------------------------------------------------------------------
// LiveRunner
// ---------------------------------------------------------------------------

LiveRunner::LiveRunner(Pipeline& pipeline, unsigned workers) : pipeline_(pipeline) {
  workers = std::max(1u, workers);
  for (unsigned i = 0; i < workers; ++i) workers_.emplace_back([this] { work(); });
  responder_ = std::thread([this] { respond_loop(); });
}

LiveRunner::~LiveRunner() { stop(); }

AdmitDecision LiveRunner::submit(Tweet tweet) {
  AdmitDecision d = pipeline_.admit(tweet);
  if (!d.admitted) return d;
  {
    std::lock_guard lock(mu_);
    if (stopping_) throw Error(ErrorCode::kPrecondition, "runner is stopping");
    tweets_.emplace_back(std::move(tweet), Instant{});
  }
  cv_.notify_all();
  return d;
}

void LiveRunner::work() {
  for (;;) {
    std::pair<Tweet, Instant> item;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || !tweets_.empty(); });
      if (tweets_.empty()) return;
      item = std::move(tweets_.front());
      tweets_.pop_front();
      ++busy_;
    }
    std::optional<ScoreRecord> rec;
    try {
      rec = pipeline_.process(item.first, std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now()));
    } catch (const std::exception& e) {
      spdlog::error("processing tweet {} failed: {}", item.first.id, e.what());
    }
    {
      std::lock_guard lock(mu_);
      if (rec && rec->decided) decisions_.push_back(std::move(*rec));
      --busy_;
    }
    cv_.notify_all();
    idle_cv_.notify_all();
  }
}

void LiveRunner::respond_loop() {
  for (;;) {
    ScoreRecord rec;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return !decisions_.empty() || (stopping_ && tweets_.empty() && busy_ == 0); });
      if (decisions_.empty()) return;
      rec = std::move(decisions_.front());
      decisions_.pop_front();
      ++busy_;
    }
    try {
      pipeline_.respond(rec);
    } catch (const std::exception& e) {
      spdlog::error("responding to {} failed: {}", rec.tweet_id, e.what());
    }
    {
      std::lock_guard lock(mu_);
      --busy_;
    }
    idle_cv_.notify_all();
  }
}

void LiveRunner::drain() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return tweets_.empty() && decisions_.empty() && busy_ == 0; });
}

void LiveRunner::stop() {
  {
    std::lock_guard lock(mu_);
    if (stopping_ && workers_.empty()) return;
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
  cv_.notify_all();
  if (responder_.joinable()) responder_.join();
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

json ReplaySummary::to_json() const {
  return {{"lines", lines},         {"malformed", malformed}, {"filtered", filtered}, {"duplicates", duplicates},
          {"admitted", admitted},   {"scored", scored},       {"failed", failed},     {"decided", decided},
          {"sent", sent},           {"suppressed", suppressed}, {"elapsed_seconds", elapsed_seconds}};
}

ReplaySummary replay(std::istream& fixture, Pipeline& pipeline, ManualClock& clock, const ReplayOptions& options) {
  using steady = std::chrono::steady_clock;
  const auto wall_start = steady::now();
  const std::size_t batch = std::max<std::size_t>(1, options.batch);
  const unsigned workers = std::max(1u, options.workers);
  const PipelineStats before = pipeline.stats();

  ReplaySummary s;
  std::vector<Tweet> pending;
  std::vector<Analysis> analyses;
  std::int64_t paced = 0;

  const auto flush = [&] {
    if (pending.empty()) return;
    analyses.assign(pending.size(), Analysis{});
    const std::int64_t base = paced;
    std::atomic<std::size_t> next{0};
    const auto run = [&] {
      for (std::size_t i = next++; i < pending.size(); i = next++) {
        if (options.rate > 0.0) {
          const auto due = wall_start + std::chrono::duration_cast<steady::duration>(
                                            std::chrono::duration<double>(static_cast<double>(base + static_cast<std::int64_t>(i)) / options.rate));
          std::this_thread::sleep_until(due);
        }
        analyses[i] = pipeline.analyze(pending[i]);
      }
    };
    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, pending.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    paced += static_cast<std::int64_t>(pending.size());

    Store::Transaction tx(pipeline.store());
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const Tweet& t = pending[i];
      clock.set(t.timestamp);
      auto rec = pipeline.commit(t, analyses[i], t.timestamp);
      if (!rec) {
        ++s.duplicates;
        continue;
      }
      if (!rec->ok()) {
        ++s.failed;
        continue;
      }
      ++s.scored;
      if (rec->decided) {
        ++s.decided;
        pipeline.respond(*rec);
      }
    }
    tx.commit();
    pending.clear();
  };

  std::string line;
  while (std::getline(fixture, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++s.lines;
    Tweet t;
    try {
      json j = json::parse(line);
      t = tweet_from_json(j);
    } catch (const std::exception& e) {
      ++s.malformed;
      spdlog::debug("skipping malformed fixture line {}: {}", s.lines, e.what());
      continue;
    }
    if (!pipeline.admit(t).admitted) {
      ++s.filtered;
      continue;
    }
    ++s.admitted;
    pending.push_back(std::move(t));
    if (pending.size() >= batch) flush();
  }
  flush();

  const PipelineStats after = pipeline.stats();
  s.sent = after.sent - before.sent;
  s.suppressed = after.suppressed - before.suppressed;
  s.elapsed_seconds = std::chrono::duration<double>(steady::now() - wall_start).count();
  return s;
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

ElectionReport ElectionReport::from_counts(std::int64_t analysed, std::int64_t abusive, std::int64_t sent) {
  if (analysed < 0 || abusive < 0 || sent < 0) throw Error(ErrorCode::kInvalidArgument, "report counts must be non-negative");
  if (abusive > analysed) throw Error(ErrorCode::kInvalidArgument, "abusive count exceeds analysed count");
  if (sent > abusive) throw Error(ErrorCode::kInvalidArgument, "sent count exceeds abusive count");
  ElectionReport r;
  r.total_analysed = analysed;
  r.total_abusive = abusive;
  r.total_sent = sent;
  return r;
}

double ElectionReport::abusive_rate() const {
  return total_analysed == 0 ? 0.0 : static_cast<double>(total_abusive) / static_cast<double>(total_analysed);
}

double ElectionReport::sent_rate() const {
  return total_analysed == 0 ? 0.0 : static_cast<double>(total_sent) / static_cast<double>(total_analysed);
}

std::string format_percent(double rate) { return fmt::format("{:.2f}%", rate * 100.0); }

json ElectionReport::to_json() const {
  json history = json::array();
  for (const auto& c : theta_history) {
    history.push_back({{"theta", c.theta}, {"at", format_instant(c.at)}, {"operator", c.operator_name}});
  }
  return {{"period",
           {{"from", period.from ? json(format_instant(*period.from)) : json(nullptr)},
            {"to", period.to ? json(format_instant(*period.to)) : json(nullptr)}}},
          {"total_analysed", total_analysed},
          {"total_abusive", total_abusive},
          {"total_sent", total_sent},
          {"total_unscored", total_unscored},
          {"abusive_rate", abusive_rate()},
          {"sent_rate", sent_rate()},
          {"empty", empty()},
          {"theta_history", std::move(history)}};
}

std::string ElectionReport::to_text() const {
  std::string out;
  out += fmt::format("Period:                 {} to {}\n", period.from ? format_instant(*period.from) : "(start)",
                     period.to ? format_instant(*period.to) : "(end)");
  out += fmt::format("Tweets analysed:        {}\n", total_analysed);
  out += fmt::format("Tweets above threshold: {}\n", total_abusive);
  out += fmt::format("Positivitweets sent:    {}\n", total_sent);
  out += fmt::format("Unscored tweets:        {}\n", total_unscored);
  out += fmt::format("Abusive rate:           {}\n", format_percent(abusive_rate()));
  out += fmt::format("Sent rate:              {}\n", format_percent(sent_rate()));
  if (theta_history.empty()) {
    out += "Thresholds:             (none recorded)\n";
  } else {
    out += "Thresholds:\n";
    for (const auto& c : theta_history) {
      out += fmt::format("  {} from {} ({})\n", c.theta, format_instant(c.at), c.operator_name);
    }
  }
  if (empty()) out += "No scored tweets in this period.\n";
  return out;
}

ElectionReport build_report(const Store& store, const Period& period) {
  const StoreCounts c = store.counts(period);
  ElectionReport r;
  r.period = period;
  r.total_analysed = c.analysed;
  r.total_abusive = c.abusive;
  r.total_sent = c.sent;
  r.total_unscored = c.unscored;
  // The value in force at the period start, then every change inside it.
  const auto all = store.theta_history();
  std::optional<std::size_t> in_force;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (period.from && all[i].at <= *period.from) {
      in_force = i;
      continue;
    }
    if (period.to && all[i].at >= *period.to) break;
    if (in_force) {
      r.theta_history.push_back(all[*in_force]);
      in_force.reset();
    }
    r.theta_history.push_back(all[i]);
  }
  if (in_force) r.theta_history.push_back(all[*in_force]);
  return r;
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

namespace {

constexpr std::array kTopics = {"transit",  "housing",  "health care", "climate", "schools",
                                "pensions", "taxes",    "child care",  "jobs",    "broadband"};
constexpr std::array kPlaces = {"the library", "the market", "the rink", "the legion hall", "the campus",
                                "the plant",   "main street"};
constexpr std::array kBenign = {
    "{h} thanks for visiting {p} today",           "{h} what is your plan for {t}?",
    "{h} good answer on {t} at the debate",        "{h} will you support more {t} funding?",
    "{h} see you at {p} for the town hall",        "{h} my neighbours keep asking about {t}",
    "{h} appreciated the update on {t} this week", "{h} congratulations on the nomination"};
constexpr std::array kAbusive = {"{h} you are an {i}", "{h} what a {i}, resign now",
                                 "{h} nobody wants a {i} like you", "{h} go away you {i}"};
constexpr std::array kInsults = {"idiot", "moron", "clown", "disgrace", "loser"};

template <typename Arr>
const auto& pick_from(const Arr& arr, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, arr.size() - 1);
  return arr[d(rng)];
}

}  // namespace

void write_fixture(std::ostream& out, const FixtureSpec& spec) {
  if (spec.abusive > spec.count) throw Error(ErrorCode::kInvalidArgument, "abusive count exceeds tweet count");
  std::vector<std::string> handles = spec.handles;
  if (handles.empty()) throw Error(ErrorCode::kInvalidArgument, "fixture needs at least one handle");
  std::mt19937_64 rng(spec.seed);

  const std::size_t total = spec.count + spec.filtered;
  // Line kinds: 0 benign, 1 abusive, 2 filtered.
  std::vector<std::uint8_t> kind(total, 0);
  std::fill(kind.begin(), kind.begin() + static_cast<std::ptrdiff_t>(spec.abusive), 1);
  std::fill(kind.begin() + static_cast<std::ptrdiff_t>(spec.count), kind.end(), 2);
  std::shuffle(kind.begin(), kind.end(), rng);

  std::uniform_int_distribution<int> author(1, 99999);
  std::size_t filtered_seen = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const std::string handle = pick_from(handles, rng);
    const std::string mention = "@" + handle;
    std::string text;
    if (kind[i] == 1) {
      text = fmt::format(fmt::runtime(pick_from(kAbusive, rng)), fmt::arg("h", mention),
                         fmt::arg("i", pick_from(kInsults, rng)));
    } else {
      text = fmt::format(fmt::runtime(pick_from(kBenign, rng)), fmt::arg("h", mention),
                         fmt::arg("t", pick_from(kTopics, rng)), fmt::arg("p", pick_from(kPlaces, rng)));
    }
    Tweet t;
    t.id = fmt::format("{}", 1179000000000000000ULL + i);
    t.text = std::move(text);
    t.lang = "en";
    t.author_handle = fmt::format("voter{:05d}", author(rng));
    t.mentioned_handles = {handle};
    t.timestamp = spec.start + spec.spacing * static_cast<std::int64_t>(i);
    if (kind[i] == 2) {
      if (filtered_seen++ % 2 == 0) {
        t.lang = "fr";
      } else {
        t.is_retweet = true;
        t.text = "RT " + t.text;
      }
    }
    out << tweet_to_json(t).dump() << '\n';
  }
}

}  // namespace counterbot
