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
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "counterbot/records.hpp"
#include "counterbot/store.hpp"
#include "counterbot/time.hpp"

namespace counterbot {

inline constexpr std::size_t kMaxPositivitweetLength = 280;

/// Number of UTF-8 code points (malformed bytes count one each).
std::size_t codepoint_count(std::string_view utf8);

struct ReviewAction {
  enum class Kind { kApprove, kEditAndApprove, kReject };
  Kind kind = Kind::kApprove;
  std::string new_text;

  /// "approve", "edit_and_approve" (needs new_text) or "reject".
  static ReviewAction parse(std::string_view action, std::optional<std::string> new_text);
};

/// The positivitweet library and its review state machine:
/// submitted -> approved | rejected, both terminal. Thread-safe; writes go
/// through to the store when one is attached.
class PositivitweetLibrary {
 public:
  explicit PositivitweetLibrary(const Clock& clock, Store* store = nullptr);

  /// Trims the text. Throws Error(kEmptyText) or Error(kTooLong).
  PositivitweetEntry submit(std::string_view text, std::optional<std::string> credit_handle = std::nullopt);
  /// Throws Error(kNotFound), Error(kInvalidTransition) from a terminal
  /// state, or the submit errors for an edit.
  PositivitweetEntry review(const std::string& id, const ReviewAction& action, const std::string& operator_name);

  std::optional<PositivitweetEntry> find(const std::string& id) const;
  std::vector<PositivitweetEntry> list(std::optional<EntryState> state = std::nullopt) const;
  /// Approved ids in ascending order.
  std::vector<std::string> approved_ids() const;
  std::size_t approved_count() const { return approved_.load(); }
  std::optional<std::string> text_of(const std::string& id) const;

  /// JSON Lines of entries. Import validates every entry and rejects ids
  /// already present; returns the number imported.
  std::size_t import_jsonl(std::istream& in);
  void export_jsonl(std::ostream& out) const;

 private:
  std::string next_id();
  void persist(const PositivitweetEntry& e);
  void recount();

  const Clock& clock_;
  Store* store_;
  mutable std::shared_mutex mu_;
  std::map<std::string, PositivitweetEntry> entries_;
  std::uint64_t next_seq_ = 1;
  std::atomic<std::size_t> approved_{0};
};

struct RateLimitConfig {
  int daily_cap = 100;
  Millis min_interval{30000};

  /// Throws Error(kInvalidArgument) for a negative cap or interval.
  void validate() const;
};

/// Threshold value together with its history position and the instant it
/// was read.
struct ThetaSnapshot {
  double theta = 0.0;
  std::int64_t version = 0;
  Instant at{};
};

/// Operator-controlled settings. The threshold is read atomically by the
/// pipeline; every change, including a no-op, is appended to the history.
class OperatorConfig {
 public:
  /// Loads any history already in the store, then records `initial_theta`.
  OperatorConfig(double initial_theta, const Clock& clock, Store* store = nullptr,
                 std::string operator_name = "startup", RateLimitConfig limits = {});

  double theta() const { return theta_.load(); }
  ThetaSnapshot snapshot() const;
  /// Throws Error(kOutOfRange) unless theta is in [0, 1].
  ThetaChange set_threshold(double theta, const std::string& operator_name);
  std::vector<ThetaChange> history() const;
  /// Value in force at `t` (the last change at or before t).
  std::optional<double> theta_at(Instant t) const;
  const RateLimitConfig& limits() const { return limits_; }

 private:
  const Clock& clock_;
  Store* store_;
  RateLimitConfig limits_;
  mutable std::shared_mutex mu_;
  std::vector<ThetaChange> history_;
  std::atomic<double> theta_{0.0};
};

}  // namespace counterbot
