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

#include "counterbot/curation.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>

#include <fmt/format.h>

#include "counterbot/error.hpp"

namespace counterbot {

using nlohmann::json;

std::size_t codepoint_count(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

namespace {

std::string trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string validated_text(std::string_view raw) {
  std::string text = trim(raw);
  if (text.empty()) throw Error(ErrorCode::kEmptyText, "positivitweet text is empty");
  const std::size_t len = codepoint_count(text);
  if (len > kMaxPositivitweetLength) {
    throw Error(ErrorCode::kTooLong,
                fmt::format("positivitweet is {} characters, the limit is {}", len, kMaxPositivitweetLength));
  }
  return text;
}

std::optional<std::uint64_t> id_sequence(std::string_view id) {
  if (!id.starts_with("pt-")) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(id.data() + 3, id.data() + id.size(), v);
  if (ec != std::errc() || ptr != id.data() + id.size()) return std::nullopt;
  return v;
}

}  // namespace

ReviewAction ReviewAction::parse(std::string_view action, std::optional<std::string> new_text) {
  if (action == "approve") return {Kind::kApprove, {}};
  if (action == "reject") return {Kind::kReject, {}};
  if (action == "edit_and_approve") {
    if (!new_text) throw Error(ErrorCode::kInvalidArgument, "edit_and_approve needs new_text");
    return {Kind::kEditAndApprove, std::move(*new_text)};
  }
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown review action '{}'", action));
}

// ---------------------------------------------------------------------------
// PositivitweetLibrary
// ---------------------------------------------------------------------------

PositivitweetLibrary::PositivitweetLibrary(const Clock& clock, Store* store) : clock_(clock), store_(store) {
  if (store_) {
    for (auto& e : store_->positivitweets()) {
      if (auto seq = id_sequence(e.id)) next_seq_ = std::max(next_seq_, *seq + 1);
      entries_.emplace(e.id, std::move(e));
    }
  }
  recount();
}

std::string PositivitweetLibrary::next_id() {
  std::string id;
  do {
    id = fmt::format("pt-{:06d}", next_seq_++);
  } while (entries_.contains(id));
  return id;
}

void PositivitweetLibrary::persist(const PositivitweetEntry& e) {
  if (store_) store_->upsert_positivitweet(e);
}

void PositivitweetLibrary::recount() {
  approved_.store(static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [](const auto& kv) { return kv.second.state == EntryState::kApproved; })));
}

PositivitweetEntry PositivitweetLibrary::submit(std::string_view text, std::optional<std::string> credit_handle) {
  PositivitweetEntry e;
  e.text = validated_text(text);
  if (credit_handle) {
    std::string h = trim(*credit_handle);
    if (!h.empty() && h.front() == '@') h.erase(0, 1);
    if (!h.empty()) e.credit_handle = std::move(h);
  }
  e.state = EntryState::kSubmitted;
  std::unique_lock lock(mu_);
  e.id = next_id();
  e.submitted_at = clock_.now();
  persist(e);
  entries_.emplace(e.id, e);
  return e;
}

PositivitweetEntry PositivitweetLibrary::review(const std::string& id, const ReviewAction& action,
                                                const std::string& operator_name) {
  std::string edited;
  if (action.kind == ReviewAction::Kind::kEditAndApprove) edited = validated_text(action.new_text);
  std::unique_lock lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::kNotFound, fmt::format("no positivitweet '{}'", id));
  PositivitweetEntry updated = it->second;
  if (updated.state != EntryState::kSubmitted) {
    throw Error(ErrorCode::kInvalidTransition,
                fmt::format("positivitweet '{}' is already {}", id, to_string(updated.state)));
  }
  const Instant now = clock_.now();
  switch (action.kind) {
    case ReviewAction::Kind::kApprove:
      updated.state = EntryState::kApproved;
      break;
    case ReviewAction::Kind::kEditAndApprove:
      updated.history.push_back({operator_name, updated.text, now});
      updated.text = std::move(edited);
      updated.state = EntryState::kApproved;
      break;
    case ReviewAction::Kind::kReject:
      updated.state = EntryState::kRejected;
      break;
  }
  updated.reviewed_at = now;
  updated.reviewer = operator_name;
  persist(updated);
  it->second = updated;
  if (updated.state == EntryState::kApproved) approved_.fetch_add(1);
  return updated;
}

std::optional<PositivitweetEntry> PositivitweetLibrary::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<PositivitweetEntry> PositivitweetLibrary::list(std::optional<EntryState> state) const {
  std::shared_lock lock(mu_);
  std::vector<PositivitweetEntry> out;
  for (const auto& [id, e] : entries_) {
    if (!state || e.state == *state) out.push_back(e);
  }
  return out;
}

std::vector<std::string> PositivitweetLibrary::approved_ids() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, e] : entries_) {
    if (e.state == EntryState::kApproved) out.push_back(id);
  }
  return out;
}

std::optional<std::string> PositivitweetLibrary::text_of(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.text;
}

std::size_t PositivitweetLibrary::import_jsonl(std::istream& in) {
  std::vector<PositivitweetEntry> parsed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kParse, fmt::format("line {}: not valid JSON", line_no));
    PositivitweetEntry e;
    try {
      const bool fresh = !j.contains("id") || j["id"] == "";
      if (fresh) j["id"] = "_";
      e = entry_from_json(j);
      if (fresh) e.id.clear();
      e.text = validated_text(e.text);
      for (const auto& r : e.history) {
        if (codepoint_count(r.old_text) > kMaxPositivitweetLength) {
          throw Error(ErrorCode::kTooLong, "a revision exceeds the length limit");
        }
      }
    } catch (const Error& err) {
      throw Error(err.code(), fmt::format("line {}: {}", line_no, err.what()));
    }
    parsed.push_back(std::move(e));
  }
  std::unique_lock lock(mu_);
  for (const auto& e : parsed) {
    if (!e.id.empty() && entries_.contains(e.id)) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("positivitweet '{}' already exists", e.id));
    }
  }
  for (auto& e : parsed) {
    if (e.id.empty()) {
      e.id = next_id();
    } else if (auto seq = id_sequence(e.id)) {
      next_seq_ = std::max(next_seq_, *seq + 1);
    }
    if (e.submitted_at == Instant{}) e.submitted_at = clock_.now();
    persist(e);
    entries_.emplace(e.id, std::move(e));
  }
  recount();
  return parsed.size();
}

void PositivitweetLibrary::export_jsonl(std::ostream& out) const {
  std::shared_lock lock(mu_);
  for (const auto& [id, e] : entries_) out << entry_to_json(e).dump() << '\n';
}

// ---------------------------------------------------------------------------
// OperatorConfig
// ---------------------------------------------------------------------------

void RateLimitConfig::validate() const {
  if (daily_cap < 0) throw Error(ErrorCode::kInvalidArgument, "daily_cap must be non-negative");
  if (min_interval < Millis{0}) throw Error(ErrorCode::kInvalidArgument, "min_interval must be non-negative");
}

OperatorConfig::OperatorConfig(double initial_theta, const Clock& clock, Store* store, std::string operator_name,
                               RateLimitConfig limits)
    : clock_(clock), store_(store), limits_(limits) {
  limits_.validate();
  if (store_) history_ = store_->theta_history();
  set_threshold(initial_theta, operator_name);
}

ThetaSnapshot OperatorConfig::snapshot() const {
  std::shared_lock lock(mu_);
  return {theta_.load(), static_cast<std::int64_t>(history_.size()) - 1, clock_.now()};
}

ThetaChange OperatorConfig::set_threshold(double theta, const std::string& operator_name) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, fmt::format("theta {} is outside [0, 1]", theta));
  }
  std::unique_lock lock(mu_);
  ThetaChange change{theta, clock_.now(), operator_name};
  if (store_) store_->append_theta_change(change);
  history_.push_back(change);
  theta_.store(theta);
  return change;
}

std::vector<ThetaChange> OperatorConfig::history() const {
  std::shared_lock lock(mu_);
  return history_;
}

std::optional<double> OperatorConfig::theta_at(Instant t) const {
  std::shared_lock lock(mu_);
  std::optional<double> out;
  for (const auto& c : history_) {
    if (c.at <= t) out = c.theta;
  }
  return out;
}

}  // namespace counterbot
