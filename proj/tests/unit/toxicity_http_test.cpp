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

#include "counterbot/data.hpp"
#include "counterbot/registry.hpp"
#include "counterbot/toxicity.hpp"
#include "error_matchers.hpp"

namespace counterbot {
namespace {

using testing::code_of;

class HttpScorerTest : public ::testing::Test {
 protected:
  void SetUp() override { port_ = server_.start(); }

  HttpToxicityClient client(int attempts = 3, std::string key = "k1") {
    HttpScorerOptions o;
    o.url = server_.url();
    o.api_key = std::move(key);
    o.max_attempts = attempts;
    o.initial_backoff = Millis{1};
    return HttpToxicityClient(o);
  }

  MockToxicityServer server_{ToxicityRules::load(data_file("mock_rules.json")), "k1"};
  int port_ = 0;
  const std::vector<std::string> attrs_ = {"TOXICITY", "INSULT"};
};

TEST_F(HttpScorerTest, ScoresThroughMock) {
  auto c = client();
  const auto s = c.score("you absolute clown", attrs_);
  EXPECT_DOUBLE_EQ(s.at("TOXICITY"), 0.95);
  EXPECT_DOUBLE_EQ(s.at("INSULT"), 0.93);
  EXPECT_EQ(s.size(), 2u);
}

TEST_F(HttpScorerTest, FixedResponsePassesThrough) {
  server_.respond_next(1, 200, R"({"scores":{"TOXICITY":0.25,"INSULT":0.5}})");
  auto c = client();
  const auto s = c.score("text", attrs_);
  EXPECT_EQ(s, (AttributeScores{{"TOXICITY", 0.25}, {"INSULT", 0.5}}));
}

TEST_F(HttpScorerTest, RetriesTransientFailures) {
  server_.fail_next(2, 503);
  auto c = client(3);
  EXPECT_DOUBLE_EQ(c.score("calm words", attrs_).at("TOXICITY"), 0.1);
  EXPECT_EQ(server_.request_count(), 3u);
}

TEST_F(HttpScorerTest, GivesUpAfterMaxAttempts) {
  server_.fail_next(5, 500);
  auto c = client(2);
  EXPECT_EQ(code_of([&] { c.score("calm", attrs_); }), ErrorCode::kHttpStatus);
  EXPECT_EQ(server_.request_count(), 2u);
}

TEST_F(HttpScorerTest, ClientErrorsAreNotRetried) {
  server_.fail_next(5, 400);
  auto c = client(3);
  EXPECT_EQ(code_of([&] { c.score("calm", attrs_); }), ErrorCode::kHttpStatus);
  EXPECT_EQ(server_.request_count(), 1u);
}

TEST_F(HttpScorerTest, WrongKeyRejected) {
  auto c = client(1, "nope");
  EXPECT_EQ(code_of([&] { c.score("calm", attrs_); }), ErrorCode::kHttpStatus);
}

TEST_F(HttpScorerTest, UnknownAttributeIsMissing) {
  auto c = client();
  EXPECT_EQ(code_of([&] { c.score("calm", {"TOXICITY", "MADE_UP"}); }), ErrorCode::kMissingAttribute);
}

TEST_F(HttpScorerTest, IncompleteResponseIsMissing) {
  server_.respond_next(1, 200, R"({"scores":{"INSULT":0.5}})");
  auto c = client();
  EXPECT_EQ(code_of([&] { c.score("calm", attrs_); }), ErrorCode::kMissingAttribute);
}

TEST_F(HttpScorerTest, EmptyTextNeverReachesServer) {
  auto c = client();
  EXPECT_EQ(code_of([&] { c.score("", attrs_); }), ErrorCode::kPrecondition);
  EXPECT_EQ(server_.request_count(), 0u);
}

TEST_F(HttpScorerTest, ExpiredDeadlineTimesOut) {
  server_.fail_next(100, 503);
  HttpScorerOptions o;
  o.url = server_.url();
  o.api_key = "k1";
  o.max_attempts = 100;
  o.initial_backoff = Millis{20};
  HttpToxicityClient c(o);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(60);
  EXPECT_EQ(code_of([&] { c.score("calm", attrs_, deadline); }), ErrorCode::kTimeout);
}

TEST_F(HttpScorerTest, MockValidatesRequests) {
  httplib::Client raw("127.0.0.1", port_);
  httplib::Headers h{{"x-api-key", "k1"}};
  auto bad = raw.Post("/v1/score", h, "{\"text\": 3}", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_NE(bad->body.find("\"error\""), std::string::npos);
  auto empty = raw.Post("/v1/score", h, R"({"text":"","attributes":["TOXICITY"]})", "application/json");
  ASSERT_TRUE(empty);
  EXPECT_EQ(empty->status, 400);
  auto unknown = raw.Post("/v1/score", h, R"({"text":"x","attributes":["NOPE"]})", "application/json");
  ASSERT_TRUE(unknown);
  EXPECT_EQ(unknown->status, 422);
}

TEST(HttpScorer, UnreachableServerIsTransportError) {
  HttpScorerOptions o;
  o.url = "http://127.0.0.1:1";
  o.max_attempts = 2;
  o.initial_backoff = Millis{1};
  o.request_timeout = Millis{200};
  HttpToxicityClient c(o);
  EXPECT_EQ(code_of([&] { c.score("calm", {"TOXICITY"}); }), ErrorCode::kTransport);
}

TEST(HttpScorer, ParseResponseChecksValues) {
  const std::vector<std::string> a = {"TOXICITY"};
  EXPECT_EQ(code_of([&] { HttpToxicityClient::parse_response("[]", a); }), ErrorCode::kMalformedResponse);
  EXPECT_EQ(code_of([&] { HttpToxicityClient::parse_response(R"({"scores":{"TOXICITY":"hi"}})", a); }),
            ErrorCode::kMalformedResponse);
  EXPECT_EQ(code_of([&] { HttpToxicityClient::parse_response(R"({"scores":{"TOXICITY":1.2}})", a); }),
            ErrorCode::kMalformedResponse);
  EXPECT_DOUBLE_EQ(HttpToxicityClient::parse_response(R"({"scores":{"TOXICITY":0.3,"X":1}})", a).at("TOXICITY"), 0.3);
}

}  // namespace
}  // namespace counterbot
