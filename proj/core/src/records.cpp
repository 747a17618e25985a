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

#include "counterbot/records.hpp"

#include <fmt/format.h>

#include "counterbot/error.hpp"

namespace counterbot {

using nlohmann::json;

std::string_view to_string(EntryState s) {
  switch (s) {
    case EntryState::kSubmitted: return "submitted";
    case EntryState::kApproved: return "approved";
    case EntryState::kRejected: return "rejected";
  }
  return "submitted";
}

EntryState parse_entry_state(std::string_view s) {
  if (s == "submitted") return EntryState::kSubmitted;
  if (s == "approved") return EntryState::kApproved;
  if (s == "rejected") return EntryState::kRejected;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown entry state '{}'", s));
}

json entry_to_json(const PositivitweetEntry& e) {
  json history = json::array();
  for (const auto& r : e.history) {
    history.push_back({{"editor", r.editor}, {"old_text", r.old_text}, {"at", format_instant(r.at)}});
  }
  json j{{"id", e.id},
         {"text", e.text},
         {"credit_handle", e.credit_handle ? json(*e.credit_handle) : json(nullptr)},
         {"state", to_string(e.state)},
         {"history", std::move(history)},
         {"submitted_at", format_instant(e.submitted_at)},
         {"reviewed_at", e.reviewed_at ? json(format_instant(*e.reviewed_at)) : json(nullptr)},
         {"reviewer", e.reviewer ? json(*e.reviewer) : json(nullptr)}};
  return j;
}

PositivitweetEntry entry_from_json(const json& j) {
  PositivitweetEntry e;
  try {
    e.id = j.at("id").get<std::string>();
    e.text = j.at("text").get<std::string>();
    if (j.contains("credit_handle") && !j["credit_handle"].is_null()) e.credit_handle = j["credit_handle"].get<std::string>();
    e.state = parse_entry_state(j.value("state", std::string("submitted")));
    if (j.contains("history")) {
      for (const auto& r : j["history"]) {
        e.history.push_back({r.at("editor").get<std::string>(), r.at("old_text").get<std::string>(),
                             parse_instant(r.at("at").get<std::string>())});
      }
    }
    if (j.contains("submitted_at") && !j["submitted_at"].is_null()) {
      e.submitted_at = parse_instant(j["submitted_at"].get<std::string>());
    }
    if (j.contains("reviewed_at") && !j["reviewed_at"].is_null()) {
      e.reviewed_at = parse_instant(j["reviewed_at"].get<std::string>());
    }
    if (j.contains("reviewer") && !j["reviewer"].is_null()) e.reviewer = j["reviewer"].get<std::string>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kParse, fmt::format("bad positivitweet entry: {}", ex.what()));
  }
  if (e.id.empty()) throw Error(ErrorCode::kParse, "positivitweet entry has an empty id");
  return e;
}

}  // namespace counterbot
