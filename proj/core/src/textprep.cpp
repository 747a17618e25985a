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

#include "counterbot/textprep.hpp"

namespace counterbot {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_handle_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::size_t url_prefix_length(std::string_view s, std::size_t pos) {
  const std::string_view rest = s.substr(pos);
  for (std::string_view prefix : {"https://", "http://", "www."}) {
    if (rest.substr(0, prefix.size()) == prefix) return prefix.size();
  }
  return 0;
}

}  // namespace

std::size_t count_mentions(std::string_view text) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '@') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] == '@') ++j;
    if (j < text.size() && is_handle_char(text[j])) {
      ++n;
      while (j < text.size() && is_handle_char(text[j])) ++j;
    }
    i = j;
  }
  return n;
}

CleanText clean(std::string_view text) {
  // 1. lowercase
  std::string lowered(text);
  for (char& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }

  // 2. URLs
  std::string no_urls;
  no_urls.reserve(lowered.size());
  for (std::size_t i = 0; i < lowered.size();) {
    if (const std::size_t prefix = url_prefix_length(lowered, i)) {
      i += prefix;
      while (i < lowered.size() && !is_space(lowered[i])) ++i;
    } else {
      no_urls.push_back(lowered[i++]);
    }
  }

  // 3 + 4. Newlines are whitespace, so one collapse pass covers both.
  std::string collapsed;
  collapsed.reserve(no_urls.size());
  bool pending_space = false;
  for (char c : no_urls) {
    if (is_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(c);
  }

  // 5. mentions
  std::string out;
  out.reserve(collapsed.size() + 8);
  for (std::size_t i = 0; i < collapsed.size();) {
    if (collapsed[i] == '@') {
      std::size_t j = i;
      while (j < collapsed.size() && collapsed[j] == '@') ++j;
      if (j < collapsed.size() && is_handle_char(collapsed[j])) {
        while (j < collapsed.size() && is_handle_char(collapsed[j])) ++j;
        out.append(kMentionTag);
        i = j;
        continue;
      }
      out.append(collapsed, i, j - i);
      i = j;
      continue;
    }
    out.push_back(collapsed[i++]);
  }
  return CleanText(std::move(out));
}

}  // namespace counterbot
