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

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "counterbot/data.hpp"
#include "counterbot/pipeline.hpp"
#include "counterbot/sentiment.hpp"
#include "counterbot/toxicity.hpp"
#include "error_matchers.hpp"

namespace counterbot {
namespace {

using namespace std::chrono_literals;
using testing::code_of;

Instant at(const char* s) { return parse_instant(s); }

Tweet tweet(std::string id, std::string text, std::vector<std::string> handles = {"alice_north"}) {
  Tweet t;
  t.id = std::move(id);
  t.text = std::move(text);
  t.lang = "en";
  t.author_handle = "voter00001";
  t.mentioned_handles = std::move(handles);
  t.timestamp = at("2019-10-01T00:00:00Z");
  return t;
}

TEST(Admission, FilterReasons) {
  const auto cfg = StreamFilterConfig::from_handles({"@Alice_North"}, "counterbot");
  auto t = tweet("1", "hello @Alice_North");
  EXPECT_TRUE(admit(t, cfg));
  t.is_retweet = true;
  EXPECT_EQ(check_admission(t, cfg).reason, "retweet");
  t.is_retweet = false;
  t.lang = "fr";
  EXPECT_EQ(check_admission(t, cfg).reason, "lang");
  t.lang = "en";
  t.mentioned_handles = {"someone_else"};
  EXPECT_EQ(check_admission(t, cfg).reason, "untracked");
  t.mentioned_handles = {"ALICE_NORTH"};
  t.author_handle = "CounterBot";
  EXPECT_EQ(check_admission(t, cfg).reason, "self");
  EXPECT_EQ(code_of([] { StreamFilterConfig{}.validate(); }), ErrorCode::kPrecondition);
}

TEST(RateLimiter, CapAndInterval) {
  RateLimiter lim({2, Millis{60000}});
  const Instant t0 = at("2019-10-01T08:00:00Z");
  EXPECT_TRUE(lim.try_acquire(t0));
  EXPECT_FALSE(lim.try_acquire(t0 + 59s));
  EXPECT_TRUE(lim.try_acquire(t0 + 60s));
  EXPECT_FALSE(lim.try_acquire(t0 + 2h));
  EXPECT_EQ(lim.sent_on(utc_day(t0)), 2);
  EXPECT_TRUE(lim.try_acquire(at("2019-10-02T00:00:00Z")));
  EXPECT_FALSE(lim.permits(t0));
}

TEST(RateLimiter, FuzzNeverBreaksLimits) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const RateLimitConfig cfg{1 + trial % 7, Millis{1000 * (trial % 5)}};
    RateLimiter lim(cfg);
    Instant now = at("2019-10-01T00:00:00Z");
    std::vector<Instant> sent;
    std::uniform_int_distribution<int> step(0, 4 * 3600);
    for (int i = 0; i < 500; ++i) {
      now += std::chrono::seconds(step(rng)) / 10;
      if (lim.try_acquire(now)) sent.push_back(now);
    }
    std::map<std::int64_t, int> per_day;
    for (std::size_t i = 0; i < sent.size(); ++i) {
      ++per_day[utc_day(sent[i])];
      if (i > 0) EXPECT_GE(sent[i] - sent[i - 1], cfg.min_interval);
    }
    for (const auto& [day, n] : per_day) EXPECT_LE(n, cfg.daily_cap);
  }
}

class ResponderTest : public ::testing::Test {
 protected:
  void approve(int n) {
    for (int i = 0; i < n; ++i) {
      const auto e = lib_.submit("message " + std::to_string(i));
      lib_.review(e.id, ReviewAction::parse("approve", std::nullopt), "ops");
    }
  }
  ScoreRecord decided(int i) {
    ScoreRecord r;
    r.tweet_id = std::to_string(i);
    r.decided = true;
    r.toxicity = 0.95;
    return r;
  }
  ManualClock clock_{at("2019-10-01T00:00:00Z")};
  PositivitweetLibrary lib_{clock_};
};

TEST_F(ResponderTest, CyclesThroughLibraryWithoutRepeats) {
  approve(3);
  Responder r(RateLimiter({100, Millis{0}}), lib_, 1);
  std::vector<std::string> picks;
  for (int i = 0; i < 5; ++i) {
    const auto ev = r.maybe_respond(decided(i), at("2019-10-01T01:00:00Z") + std::chrono::minutes(i));
    ASSERT_TRUE(ev);
    picks.push_back(ev->positivitweet_id);
  }
  EXPECT_EQ(std::set<std::string>(picks.begin(), picks.begin() + 3).size(), 3u);
  EXPECT_NE(picks[3], picks[4]);
  EXPECT_EQ(r.counters().sent, 5);
}

TEST_F(ResponderTest, EmptyLibraryRaisesAlert) {
  Responder r(RateLimiter({100, Millis{0}}), lib_, 1);
  EXPECT_FALSE(r.maybe_respond(decided(1), clock_.now()));
  EXPECT_TRUE(r.library_alert());
  EXPECT_EQ(r.counters().library_empty, 1);
  approve(1);
  EXPECT_TRUE(r.maybe_respond(decided(2), clock_.now()));
  EXPECT_FALSE(r.library_alert());
}

TEST_F(ResponderTest, CapConsumedSuppresses) {
  approve(2);
  Responder r(RateLimiter({1, Millis{0}}), lib_, 1);
  EXPECT_TRUE(r.maybe_respond(decided(1), clock_.now()));
  EXPECT_FALSE(r.maybe_respond(decided(2), clock_.now() + 1h));
  EXPECT_EQ(r.counters().suppressed, 1);
  ScoreRecord undecided;
  EXPECT_EQ(code_of([&] { r.maybe_respond(undecided, clock_.now()); }), ErrorCode::kPrecondition);
}

TEST_F(ResponderTest, PermitsBoundResponses) {
  approve(10);
  Responder r(RateLimiter({973, Millis{0}}), lib_, 5);
  int sent = 0;
  for (int i = 0; i < 1468; ++i) {
    if (r.maybe_respond(decided(i), at("2019-10-01T00:00:00Z") + std::chrono::seconds(i))) ++sent;
  }
  EXPECT_EQ(sent, 973);
  EXPECT_EQ(r.counters().suppressed, 1468 - 973);
}

class FailingToxicity final : public ToxicityScorer {
 public:
  explicit FailingToxicity(ToxicityRules rules) : inner_(std::move(rules)) {}
  using ToxicityScorer::score;
  AttributeScores score(std::string_view text, const std::vector<std::string>& attrs, Deadline d) override {
    if (down) throw Error(ErrorCode::kTransport, "connection refused");
    return inner_.score(text, attrs, d);
  }
  std::atomic<bool> down{false};

 private:
  RuleToxicityScorer inner_;
};

class PipelineTest : public ::testing::Test {
 protected:
  PipelineTest()
      : scorer_(ToxicityRules::load(data_file("mock_rules.json"))),
        config_(0.9, clock_, &store_, "startup", RateLimitConfig{50, Millis{30000}}),
        pipeline_(make_pipeline()) {
    std::ifstream in(data_file("positivitweets.jsonl"));
    lib_.import_jsonl(in);
  }

  Pipeline make_pipeline() {
    PipelineDeps deps{store_,
                      ScorerSet{&scorer_, &SentimentAnalyzer::bundled(), nullptr},
                      std::make_shared<const FeatureRegistry>(
                          FeatureRegistry::with_families({FeatureFamily::kToxicity, FeatureFamily::kSentiment})),
                      config_,
                      lib_,
                      clock_};
    return Pipeline(deps, StreamFilterConfig::from_handles({"alice_north"}), 42);
  }

  ManualClock clock_{at("2019-10-01T00:00:00Z")};
  Store store_{":memory:"};
  FailingToxicity scorer_;
  PositivitweetLibrary lib_{clock_, &store_};
  OperatorConfig config_;
  Pipeline pipeline_;
};

TEST_F(PipelineTest, DecidesAgainstThreshold) {
  const auto hot = pipeline_.process(tweet("1", "@alice_north you clown"), clock_.now());
  ASSERT_TRUE(hot);
  EXPECT_TRUE(hot->decided);
  EXPECT_EQ(hot->theta_at_decision, 0.9);
  const auto calm = pipeline_.process(tweet("2", "@alice_north nice speech"), clock_.now());
  ASSERT_TRUE(calm);
  EXPECT_FALSE(calm->decided);
  EXPECT_FALSE(pipeline_.process(tweet("1", "@alice_north you clown"), clock_.now()));
  const auto s = pipeline_.stats();
  EXPECT_EQ(s.analysed, 2);
  EXPECT_EQ(s.abusive, 1);
  EXPECT_EQ(s.duplicates, 1);
}

TEST_F(PipelineTest, ScorerOutageRecordedAndRetried) {
  scorer_.down = true;
  const auto rec = pipeline_.process(tweet("1", "@alice_north you clown"), clock_.now());
  ASSERT_TRUE(rec);
  EXPECT_FALSE(rec->ok());
  EXPECT_FALSE(rec->decided);
  EXPECT_EQ(rec->error_code, "transport");
  EXPECT_EQ(pipeline_.stats().analysed, 0);
  EXPECT_EQ(pipeline_.stats().unscored, 1);
  EXPECT_EQ(store_.pending_retries().size(), 1u);
  scorer_.down = false;
  EXPECT_EQ(pipeline_.retry_failed(), 1u);
  EXPECT_EQ(pipeline_.stats().analysed, 1);
  EXPECT_TRUE(store_.pending_retries().empty());
}

TEST_F(PipelineTest, ThresholdChangeKeepsEarlierDecisions) {
  config_.set_threshold(0.5, "ops");
  const auto before = pipeline_.process(tweet("1", "@alice_north stop it, shut up"), clock_.now());
  clock_.advance(24h);
  config_.set_threshold(0.8, "ops");
  const auto after = pipeline_.process(tweet("2", "@alice_north stop it, shut up"), clock_.now());
  ASSERT_TRUE(before && after);
  EXPECT_EQ(before->theta_at_decision, 0.5);
  EXPECT_TRUE(before->decided);
  EXPECT_EQ(after->theta_at_decision, 0.8);
  EXPECT_FALSE(after->decided);
  for (const auto& r : store_.scores()) {
    EXPECT_EQ(config_.theta_at(r.scored_at), r.theta_at_decision);
    EXPECT_EQ(r.decided, r.toxicity >= *r.theta_at_decision);
  }
}

TEST_F(PipelineTest, LiveRunnerDrains) {
  LiveRunner runner(pipeline_, 2);
  for (int i = 0; i < 20; ++i) {
    auto t = tweet(std::to_string(i), i % 4 == 0 ? "@alice_north loser" : "@alice_north thanks");
    runner.submit(t);
  }
  auto rt = tweet("rt", "RT @alice_north loser");
  rt.is_retweet = true;
  EXPECT_EQ(runner.submit(rt).reason, "retweet");
  runner.drain();
  const auto s = pipeline_.stats();
  EXPECT_EQ(s.analysed, 20);
  EXPECT_EQ(s.abusive, 5);
  EXPECT_EQ(s.filtered, 1);
  EXPECT_GE(s.sent, 1);
  runner.stop();
}

TEST_F(PipelineTest, ReplaySkipsMalformedLines) {
  std::istringstream in("\nnot json\n{\"id\":\"5\"}\n");
  const auto s = replay(in, pipeline_, clock_);
  EXPECT_EQ(s.lines, 2);
  EXPECT_EQ(s.malformed, 2);
  EXPECT_EQ(s.admitted, 0);
}

std::string run_fixture(std::uint64_t seed) {
  FixtureSpec spec;
  spec.seed = seed;
  spec.start = at("2019-10-01T00:00:00Z");
  spec.handles = {"alice_north", "ben_okafor"};
  spec.filtered = 10;
  std::stringstream fixture;
  write_fixture(fixture, spec);

  ManualClock clock(spec.start);
  Store store(":memory:");
  RuleToxicityScorer tox(ToxicityRules::load(data_file("mock_rules.json")));
  PositivitweetLibrary lib(clock, &store);
  std::ifstream in(data_file("positivitweets.jsonl"));
  lib.import_jsonl(in);
  OperatorConfig cfg(0.9, clock, &store, "startup", {50, Millis{30000}});
  PipelineDeps deps{store,
                    ScorerSet{&tox, &SentimentAnalyzer::bundled(), nullptr},
                    std::make_shared<const FeatureRegistry>(FeatureRegistry::with_families({FeatureFamily::kToxicity})),
                    cfg,
                    lib,
                    clock};
  Pipeline p(deps, StreamFilterConfig::from_handles(spec.handles), seed);
  const auto summary = replay(fixture, p, clock);
  EXPECT_EQ(summary.filtered, 10);
  const auto report = build_report(store, {});
  EXPECT_EQ(report.total_analysed, 1000);
  EXPECT_EQ(report.total_abusive, 100);
  EXPECT_EQ(report.total_sent, 50);
  std::string ids;
  for (const auto& r : store.responses()) ids += r.positivitweet_id + ",";
  return report.to_json().dump() + ids;
}

TEST(Replay, FixtureCountsAndDeterminism) { EXPECT_EQ(run_fixture(7), run_fixture(7)); }

TEST(Report, RateArithmetic) {
  const auto federal = ElectionReport::from_counts(228255, 9987, 0);
  EXPECT_EQ(format_percent(federal.abusive_rate()), "4.38%");
  const auto provincial = ElectionReport::from_counts(12726, 1468, 973);
  EXPECT_EQ(format_percent(provincial.abusive_rate()), "11.54%");
  EXPECT_EQ(format_percent(provincial.sent_rate()), "7.65%");
  const auto j = provincial.to_json();
  EXPECT_TRUE(j.contains("abusive_rate"));
  EXPECT_TRUE(j.contains("sent_rate"));
  const auto empty = ElectionReport::from_counts(0, 0, 0);
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.abusive_rate(), 0.0);
  EXPECT_EQ(code_of([] { ElectionReport::from_counts(10, 11, 0); }), ErrorCode::kInvalidArgument);
}

TEST(Report, EmptyStoreIsZero) {
  Store store(":memory:");
  const auto r = build_report(store, {});
  EXPECT_EQ(r.total_analysed, 0);
  EXPECT_EQ(r.total_sent, 0);
  EXPECT_TRUE(r.to_json().at("empty").get<bool>());
}

}  // namespace
}  // namespace counterbot
