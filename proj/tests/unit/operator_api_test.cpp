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

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "counterbot/data.hpp"
#include "counterbot/operator_api.hpp"
#include "counterbot/sentiment.hpp"
#include "counterbot/toxicity.hpp"

namespace counterbot {
namespace {

using nlohmann::json;

class OperatorApiTest : public ::testing::Test {
 protected:
  OperatorApiTest()
      : tox_(ToxicityRules::load(data_file("mock_rules.json"))),
        config_(0.5, clock_, &store_),
        pipeline_(PipelineDeps{store_,
                               ScorerSet{&tox_, &SentimentAnalyzer::bundled(), nullptr},
                               std::make_shared<const FeatureRegistry>(
                                   FeatureRegistry::with_families({FeatureFamily::kToxicity})),
                               config_, lib_, clock_},
                  StreamFilterConfig::from_handles({"alice_north"}), 1),
        runner_(pipeline_, 1),
        server_(config_, lib_, [this] { return pipeline_.stats(); }, &runner_, OperatorApiOptions{"s3cret", false}) {}

  void SetUp() override {
    port_ = server_.start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_.stop();
    runner_.stop();
  }

  httplib::Headers auth() const { return {{"Authorization", "Bearer s3cret"}}; }

  ManualClock clock_{parse_instant("2019-10-01T00:00:00Z")};
  Store store_{":memory:"};
  RuleToxicityScorer tox_;
  PositivitweetLibrary lib_{clock_, &store_};
  OperatorConfig config_;
  Pipeline pipeline_;
  LiveRunner runner_;
  OperatorServer server_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(OperatorApiTest, RequiresToken) {
  auto res = client_->Get("/stats");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 401);
  EXPECT_EQ(json::parse(res->body)["error"]["code"], "unauthorized");
  auto ok = client_->Get("/healthz");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
}

TEST_F(OperatorApiTest, FreshStatsAreZero) {
  auto a = client_->Get("/stats", auth());
  auto b = client_->Get("/stats", auth());
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->status, 200);
  const auto j = json::parse(a->body);
  EXPECT_EQ(j["analysed"], 0);
  EXPECT_EQ(j["sent"], 0);
  EXPECT_EQ(j["current_theta"], 0.5);
  EXPECT_EQ(a->body, b->body);
}

TEST_F(OperatorApiTest, ThresholdRoundTrip) {
  auto res = client_->Put("/config/threshold", auth(), R"({"theta":0.8,"operator":"ops"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto j = json::parse(res->body);
  EXPECT_EQ(j["theta"], 0.8);
  ASSERT_EQ(j["history"].size(), 2u);
  EXPECT_EQ(j["history"][1]["operator"], "ops");
  auto bad = client_->Put("/config/threshold", auth(), R"({"theta":1.5})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body)["error"]["code"], "out_of_range");
  EXPECT_EQ(config_.theta(), 0.8);
}

TEST_F(OperatorApiTest, CurationFlow) {
  auto created = client_->Post("/curation", auth(), R"({"text":"You are doing great","credit_handle":"fan"})",
                               "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = json::parse(created->body)["id"];
  auto pending = client_->Get("/curation?state=submitted", auth());
  ASSERT_TRUE(pending);
  EXPECT_EQ(json::parse(pending->body)["entries"].size(), 1u);
  auto reviewed = client_->Post("/curation/" + id + "/review", auth(),
                                R"({"action":"edit_and_approve","new_text":"You are doing great!","operator":"ed"})",
                                "application/json");
  ASSERT_TRUE(reviewed);
  EXPECT_EQ(reviewed->status, 200);
  EXPECT_EQ(json::parse(reviewed->body)["state"], "approved");
  pending = client_->Get("/curation?state=submitted", auth());
  EXPECT_TRUE(json::parse(pending->body)["entries"].empty());
  auto again = client_->Post("/curation/" + id + "/review", auth(), R"({"action":"reject"})", "application/json");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->status, 409);
  auto missing = client_->Post("/curation/pt-424242/review", auth(), R"({"action":"reject"})", "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto too_long = client_->Post("/curation", auth(), json{{"text", std::string(281, 'x')}}.dump(), "application/json");
  ASSERT_TRUE(too_long);
  EXPECT_EQ(too_long->status, 400);
  EXPECT_EQ(json::parse(too_long->body)["error"]["code"], "too_long");
}

TEST_F(OperatorApiTest, IngestAdmitsAndFilters) {
  json t = {{"id", "100"},
            {"text", "@alice_north you moron"},
            {"lang", "en"},
            {"author_handle", "voter1"},
            {"mentioned_handles", {"alice_north"}},
            {"is_retweet", false},
            {"timestamp", "2019-10-01T00:00:00Z"}};
  auto res = client_->Post("/ingest", auth(), t.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 202);
  t["id"] = "101";
  t["lang"] = "fr";
  res = client_->Post("/ingest", auth(), t.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["reason"], "lang");
  res = client_->Post("/ingest", auth(), "{", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  runner_.drain();
  const auto stats = json::parse(client_->Get("/stats", auth())->body);
  EXPECT_EQ(stats["analysed"], 1);
  EXPECT_EQ(stats["abusive"], 1);
}

}  // namespace
}  // namespace counterbot
