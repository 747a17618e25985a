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

#include <string>
#include <string_view>

namespace counterbot {

/// Text that has been through clean(). Only clean() constructs one, so a
/// CleanText in hand always satisfies: no newlines, no doubled spaces, no
/// leading/trailing space, no URL, no @-mention.
class CleanText {
 public:
  CleanText() = default;

  const std::string& value() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend bool operator==(const CleanText&, const CleanText&) = default;

 private:
  explicit CleanText(std::string value) : value_(std::move(value)) {}
  friend CleanText clean(std::string_view text);

  std::string value_;
};

/// Literal that replaces @-mentions.
inline constexpr std::string_view kMentionTag = "MENTION";

/// Normalizes a tweet, applying in order:
///   1. ASCII lowercase
///   2. drop URLs: "http://", "https://" or "www." plus the following
///      non-whitespace run
///   3. newlines become spaces
///   4. whitespace runs collapse to one space; ends trimmed
///   5. "@" runs followed by [A-Za-z0-9_]+ become MENTION
/// The tag survives because substitution happens after lowercasing.
CleanText clean(std::string_view text);

/// Count of @-mentions rule 5 would replace in `text`.
std::size_t count_mentions(std::string_view text);

}  // namespace counterbot
