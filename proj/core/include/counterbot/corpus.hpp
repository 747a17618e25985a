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
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "counterbot/textprep.hpp"
#include "counterbot/time.hpp"

namespace counterbot {

// ---------------------------------------------------------------------------
// Candidates and gender lookup
// ---------------------------------------------------------------------------

enum class GenderCategory { kFemale, kMostlyFemale, kMale, kMostlyMale, kAmbiguous, kUnknown };

std::string_view to_string(GenderCategory g);
/// Accepts the to_string spellings. Throws Error(kParse) otherwise.
GenderCategory parse_gender(std::string_view text);

/// First name -> category, keyed by ASCII-lowercased name.
class NameTable {
 public:
  NameTable() = default;

  /// Reads "name<TAB>category" lines; '#' starts a comment line.
  static NameTable load(const std::filesystem::path& path);
  static NameTable parse(std::istream& in);

  void insert(std::string_view name, GenderCategory category);
  std::optional<GenderCategory> find(std::string_view name) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, GenderCategory> table_;
};

/// Case-insensitive exact lookup; names absent from the table are kUnknown.
GenderCategory predict_gender(std::string_view first_name, const NameTable& table);

struct Candidate {
  std::string handle;  // no leading '@'
  std::string display_name;
  std::string first_name;
  std::optional<GenderCategory> gender_declared;
  GenderCategory gender_predicted = GenderCategory::kUnknown;
  std::string party;
  bool tracked = true;

  GenderCategory effective_gender() const { return gender_declared.value_or(gender_predicted); }
};

class Roster {
 public:
  Roster() = default;

  /// Throws Error(kDuplicateHandle) naming the handle. Handles compare
  /// case-insensitively, as on the platform.
  void add(Candidate candidate);

  const std::vector<Candidate>& candidates() const { return candidates_; }
  std::size_t size() const { return candidates_.size(); }
  bool empty() const { return candidates_.empty(); }
  const Candidate* find(std::string_view handle) const;

  /// Lowercased handles of candidates with tracked = true.
  std::vector<std::string> tracked_handles() const;

 private:
  std::vector<Candidate> candidates_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Roster CSV: handle,display_name,first_name,gender_declared,party,tracked.
/// gender_declared may be empty; tracked accepts true/false/1/0/yes/no.
Roster load_roster(const std::filesystem::path& path, const NameTable& names);
Roster read_roster(std::istream& in, const NameTable& names);
void write_roster(std::ostream& out, const Roster& roster);

// ---------------------------------------------------------------------------
// Stream items
// ---------------------------------------------------------------------------

struct Tweet {
  std::string id;
  std::string text;
  std::string lang;
  std::string author_handle;
  std::vector<std::string> mentioned_handles;  // deduplicated, no '@'
  bool is_retweet = false;
  Instant timestamp{};
};

/// Strips leading '@' and drops duplicate handles (case-insensitive, first
/// spelling kept).
std::vector<std::string> normalize_handles(const std::vector<std::string>& handles);

/// Throws Error(kParse) when required fields are missing or mistyped, and
/// Error(kInvalidArgument) on an empty id.
Tweet tweet_from_json(const nlohmann::json& j);
nlohmann::json tweet_to_json(const Tweet& tweet);

std::string ascii_lower(std::string_view s);

// ---------------------------------------------------------------------------
// Labeled data
// ---------------------------------------------------------------------------

enum class Label : std::uint8_t { kNotHateful = 0, kHateful = 1 };

std::string_view to_string(Label label);

struct LabeledExample {
  std::string id;
  std::string raw_text;
  CleanText clean_text;
  Label label = Label::kNotHateful;
};

class LabeledCorpus {
 public:
  LabeledCorpus() = default;
  explicit LabeledCorpus(std::vector<LabeledExample> examples) : examples_(std::move(examples)) {}

  const std::vector<LabeledExample>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  std::size_t count(Label label) const;

  /// Fraction hateful, recomputed on every call; 0 for an empty corpus.
  double class_balance() const;

 private:
  std::vector<LabeledExample> examples_;
};

/// CSV with columns id,text,label and label in {hateful, not_hateful}.
/// Texts are cleaned and rows whose cleaned text repeats an earlier row are
/// dropped. Unknown labels throw Error(kUnknownLabel) with the row number.
LabeledCorpus load_labeled_dataset(const std::filesystem::path& path);
LabeledCorpus read_labeled_dataset(std::istream& in);

struct TrainTestSplit {
  LabeledCorpus train;
  LabeledCorpus test;
};

/// Stratified split: each class contributes floor(count * train_fraction)
/// shuffled members to train and the rest to test. Deterministic in `seed`.
TrainTestSplit split_train_test(const LabeledCorpus& corpus, double train_fraction, std::uint64_t seed);

/// Number of training members a class of `class_count` contributes.
std::size_t stratified_train_count(std::size_t class_count, double train_fraction);

}  // namespace counterbot
