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

#include <filesystem>

#include "counterbot/store.hpp"
#include "error_matchers.hpp"

namespace counterbot {
namespace {

Instant at(const char* s) { return parse_instant(s); }

Tweet make_tweet(const std::string& id, const char* when) {
  Tweet t;
  t.id = id;
  t.text = "hello @cand";
  t.lang = "en";
  t.author_handle = "voter";
  t.mentioned_handles = {"cand"};
  t.timestamp = at(when);
  return t;
}

ScoreRecord ok_record(const std::string& id, double tox, bool decided, const char* when) {
  ScoreRecord r;
  r.tweet_id = id;
  r.clean_text = "hello MENTION";
  r.features = {tox, 0.25, -0.5};
  r.toxicity = tox;
  r.decided = decided;
  r.theta_at_decision = 0.5;
  r.config_version = 0;
  r.received_at = at(when);
  r.scored_at = at(when);
  return r;
}

TEST(Store, TweetsAreUnique) {
  Store s(":memory:");
  EXPECT_TRUE(s.insert_tweet(make_tweet("1", "2019-10-01T00:00:00Z"), at("2019-10-01T00:00:01Z")));
  EXPECT_FALSE(s.insert_tweet(make_tweet("1", "2019-10-01T00:00:00Z"), at("2019-10-01T00:00:01Z")));
  EXPECT_TRUE(s.has_tweet("1"));
  const auto t = s.tweet("1");
  ASSERT_TRUE(t);
  EXPECT_EQ(t->mentioned_handles, std::vector<std::string>{"cand"});
  EXPECT_FALSE(s.tweet("2"));
}

TEST(Store, ScoresRoundTrip) {
  Store s(":memory:");
  s.insert_tweet(make_tweet("1", "2019-10-01T00:00:00Z"), at("2019-10-01T00:00:00Z"));
  s.insert_score(ok_record("1", 0.75, true, "2019-10-01T00:00:00Z"));
  const auto rows = s.scores();
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].features, (std::vector<double>{0.75, 0.25, -0.5}));
  EXPECT_TRUE(rows[0].decided);
  EXPECT_EQ(rows[0].theta_at_decision, 0.5);
  EXPECT_EQ(rows[0].scored_at, at("2019-10-01T00:00:00Z"));
}

TEST(Store, CountsRespectPeriod) {
  Store s(":memory:");
  const char* days[] = {"2019-10-01T10:00:00Z", "2019-10-02T10:00:00Z", "2019-10-03T10:00:00Z"};
  for (int i = 0; i < 3; ++i) {
    const std::string id = std::to_string(i);
    s.insert_tweet(make_tweet(id, days[i]), at(days[i]));
    s.insert_score(ok_record(id, 0.9, i != 1, days[i]));
    if (i == 2) s.insert_response({"r-1", id, "pt-000001", at(days[i])});
  }
  ScoreRecord failed;
  failed.tweet_id = "x";
  failed.status = ScoreStatus::kFailed;
  failed.error_code = "transport";
  failed.received_at = failed.scored_at = at(days[0]);
  s.insert_tweet(make_tweet("x", days[0]), at(days[0]));
  s.insert_score(failed);

  const auto all = s.counts();
  EXPECT_EQ(all.analysed, 3);
  EXPECT_EQ(all.abusive, 2);
  EXPECT_EQ(all.sent, 1);
  EXPECT_EQ(all.unscored, 1);
  const auto mid = s.counts({at("2019-10-02T00:00:00Z"), at("2019-10-03T00:00:00Z")});
  EXPECT_EQ(mid.analysed, 1);
  EXPECT_EQ(mid.abusive, 0);
  EXPECT_EQ(mid.sent, 0);
  EXPECT_EQ(s.pending_retries().size(), 1u);
  s.insert_score(ok_record("x", 0.1, false, days[1]));
  EXPECT_TRUE(s.pending_retries().empty());
  EXPECT_EQ(s.last_response_at(), at(days[2]));
}

TEST(Store, TransactionRollsBackUnlessCommitted) {
  Store s(":memory:");
  {
    Store::Transaction tx(s);
    s.insert_tweet(make_tweet("a", "2019-10-01T00:00:00Z"), at("2019-10-01T00:00:00Z"));
  }
  EXPECT_FALSE(s.has_tweet("a"));
  {
    Store::Transaction outer(s);
    {
      Store::Transaction inner(s);
      s.insert_tweet(make_tweet("b", "2019-10-01T00:00:00Z"), at("2019-10-01T00:00:00Z"));
      inner.commit();
    }
    outer.commit();
  }
  EXPECT_TRUE(s.has_tweet("b"));
}

TEST(Store, PersistsAcrossReopen) {
  const auto path = std::filesystem::temp_directory_path() / "counterbot_store_test.db";
  std::filesystem::remove(path);
  {
    Store s(path);
    EXPECT_EQ(s.append_theta_change({0.5, at("2019-10-01T00:00:00Z"), "startup"}), 0);
    EXPECT_EQ(s.append_theta_change({0.8, at("2019-10-02T00:00:00Z"), "ops"}), 1);
  }
  {
    Store s(path);
    const auto h = s.theta_history();
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[1].theta, 0.8);
    EXPECT_EQ(h[1].operator_name, "ops");
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + "-wal");
  std::filesystem::remove(path.string() + "-shm");
}

}  // namespace
}  // namespace counterbot
