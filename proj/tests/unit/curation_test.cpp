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
#include <sstream>

#include "counterbot/curation.hpp"
#include "counterbot/data.hpp"
#include "counterbot/store.hpp"
#include "error_matchers.hpp"

namespace counterbot {
namespace {

using testing::code_of;

class CurationTest : public ::testing::Test {
 protected:
  ManualClock clock_{parse_instant("2019-09-01T00:00:00Z")};
  Store store_{":memory:"};
  PositivitweetLibrary lib_{clock_, &store_};
};

TEST_F(CurationTest, SubmitValidatesLength) {
  const auto e = lib_.submit(std::string(100, 'a'));
  EXPECT_EQ(e.state, EntryState::kSubmitted);
  EXPECT_EQ(e.id, "pt-000001");
  EXPECT_NO_THROW(lib_.submit(std::string(280, 'b')));
  EXPECT_EQ(code_of([&] { lib_.submit(std::string(281, 'c')); }), ErrorCode::kTooLong);
  EXPECT_EQ(code_of([&] { lib_.submit("   "); }), ErrorCode::kEmptyText);
  // 280 two-byte code points fit.
  std::string accented;
  for (int i = 0; i < 280; ++i) accented += "\xc3\xa9";
  EXPECT_NO_THROW(lib_.submit(accented));
}

TEST_F(CurationTest, HostileTextStillQueued) {
  const auto e = lib_.submit("you are all idiots");
  EXPECT_EQ(e.state, EntryState::kSubmitted);
  EXPECT_EQ(lib_.list(EntryState::kSubmitted).size(), 1u);
  EXPECT_EQ(lib_.approved_count(), 0u);
}

TEST_F(CurationTest, StateMachine) {
  const auto a = lib_.submit("keep going");
  const auto b = lib_.submit("rubbish");
  const auto c = lib_.submit("typo heer");
  lib_.review(a.id, ReviewAction::parse("approve", std::nullopt), "ops");
  lib_.review(b.id, ReviewAction::parse("reject", std::nullopt), "ops");
  const auto edited = lib_.review(c.id, ReviewAction::parse("edit_and_approve", "typo here"), "ed");
  EXPECT_EQ(edited.text, "typo here");
  ASSERT_EQ(edited.history.size(), 1u);
  EXPECT_EQ(edited.history[0].old_text, "typo heer");
  EXPECT_EQ(edited.history[0].editor, "ed");
  EXPECT_EQ(lib_.approved_ids(), (std::vector<std::string>{a.id, c.id}));
  EXPECT_EQ(code_of([&] { lib_.review(a.id, ReviewAction::parse("reject", std::nullopt), "ops"); }),
            ErrorCode::kInvalidTransition);
  EXPECT_EQ(code_of([&] { lib_.review(b.id, ReviewAction::parse("approve", std::nullopt), "ops"); }),
            ErrorCode::kInvalidTransition);
  EXPECT_EQ(code_of([&] { lib_.review("pt-999999", ReviewAction::parse("approve", std::nullopt), "ops"); }),
            ErrorCode::kNotFound);
  EXPECT_EQ(code_of([] { ReviewAction::parse("edit_and_approve", std::nullopt); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { ReviewAction::parse("publish", std::nullopt); }), ErrorCode::kInvalidArgument);
}

TEST_F(CurationTest, EditBeyondLimitRejected) {
  const auto e = lib_.submit("short");
  EXPECT_EQ(code_of([&] { lib_.review(e.id, ReviewAction::parse("edit_and_approve", std::string(281, 'x')), "o"); }),
            ErrorCode::kTooLong);
  EXPECT_EQ(lib_.find(e.id)->state, EntryState::kSubmitted);
}

TEST_F(CurationTest, StoreRestoresLibrary) {
  const auto e = lib_.submit("stay strong");
  lib_.review(e.id, ReviewAction::parse("approve", std::nullopt), "ops");
  PositivitweetLibrary again(clock_, &store_);
  EXPECT_EQ(again.approved_ids(), std::vector<std::string>{e.id});
  EXPECT_EQ(again.submit("next").id, "pt-000002");
}

TEST_F(CurationTest, JsonlRoundTrip) {
  std::ifstream in(data_file("positivitweets.jsonl"));
  const auto n = lib_.import_jsonl(in);
  EXPECT_GT(n, 5u);
  EXPECT_EQ(lib_.approved_count(), n);
  std::stringstream buf;
  lib_.export_jsonl(buf);
  PositivitweetLibrary other(clock_);
  EXPECT_EQ(other.import_jsonl(buf), n);
  EXPECT_EQ(other.approved_ids(), lib_.approved_ids());
  std::stringstream again;
  lib_.export_jsonl(again);
  EXPECT_EQ(code_of([&] { lib_.import_jsonl(again); }), ErrorCode::kInvalidArgument);
}

TEST(OperatorConfig, HistoryAndLookup) {
  ManualClock clock(parse_instant("2019-09-11T00:00:00Z"));
  Store store(":memory:");
  OperatorConfig cfg(0.5, clock, &store);
  EXPECT_EQ(cfg.theta(), 0.5);
  clock.advance(std::chrono::hours(24));
  cfg.set_threshold(0.8, "ops");
  cfg.set_threshold(0.8, "ops");
  EXPECT_EQ(cfg.history().size(), 3u);
  EXPECT_EQ(cfg.theta_at(parse_instant("2019-09-11T12:00:00Z")), 0.5);
  EXPECT_EQ(cfg.theta_at(parse_instant("2019-09-12T12:00:00Z")), 0.8);
  EXPECT_FALSE(cfg.theta_at(parse_instant("2019-09-10T00:00:00Z")));
  EXPECT_EQ(code_of([&] { cfg.set_threshold(1.5, "ops"); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(cfg.theta(), 0.8);
  EXPECT_EQ(cfg.snapshot().version, 2);
  OperatorConfig reopened(0.9, clock, &store, "restart");
  EXPECT_EQ(reopened.history().size(), 4u);
}

TEST(Codepoints, CountsUtf8) {
  EXPECT_EQ(codepoint_count("abc"), 3u);
  EXPECT_EQ(codepoint_count("\xc3\xa9\xe2\x82\xac\xf0\x9f\x98\x80"), 3u);
}

}  // namespace
}  // namespace counterbot
