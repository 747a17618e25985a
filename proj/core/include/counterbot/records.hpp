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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "counterbot/time.hpp"

namespace counterbot {

// ---------------------------------------------------------------------------
// Pipeline records
// ---------------------------------------------------------------------------

enum class ScoreStatus { kOk, kFailed };

/// One scoring attempt for an admitted tweet. Failed attempts carry the
/// error and no decision.
struct ScoreRecord {
  std::string tweet_id;
  std::string clean_text;
  std::vector<double> features;
  ScoreStatus status = ScoreStatus::kOk;
  std::string error_code;
  std::string error_message;
  double toxicity = 0.0;
  bool decided = false;
  std::optional<double> theta_at_decision;
  /// Index into the threshold history of the value used.
  std::optional<std::int64_t> config_version;
  Instant received_at{};
  Instant scored_at{};

  bool ok() const { return status == ScoreStatus::kOk; }
};

/// A posted positivitweet. Holds ids only: the triggering tweet's text and
/// author never travel with a response.
struct ResponseEvent {
  std::string response_id;
  std::string tweet_id;
  std::string positivitweet_id;
  Instant sent_at{};
};

// ---------------------------------------------------------------------------
// Curation records
// ---------------------------------------------------------------------------

enum class EntryState { kSubmitted, kApproved, kRejected };

std::string_view to_string(EntryState s);
/// Throws Error(kInvalidArgument).
EntryState parse_entry_state(std::string_view s);

struct Revision {
  std::string editor;
  std::string old_text;
  Instant at{};
};

struct PositivitweetEntry {
  std::string id;
  std::string text;
  std::optional<std::string> credit_handle;
  EntryState state = EntryState::kSubmitted;
  std::vector<Revision> history;
  Instant submitted_at{};
  std::optional<Instant> reviewed_at;
  std::optional<std::string> reviewer;
};

nlohmann::json entry_to_json(const PositivitweetEntry& e);
/// Throws Error(kParse).
PositivitweetEntry entry_from_json(const nlohmann::json& j);

struct ThetaChange {
  double theta = 0.0;
  Instant at{};
  std::string operator_name;
};

}  // namespace counterbot
