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

#include "counterbot/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_set>

#include <fmt/format.h>

#include "counterbot/csv.hpp"
#include "counterbot/error.hpp"

namespace counterbot {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_bool(std::string_view raw, std::size_t line) {
  const std::string v = ascii_lower(trim(raw));
  if (v.empty() || v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::kParse, fmt::format("line {}: bad boolean '{}'", line, raw));
}

bool is_blank(const csv::Row& row) { return row.size() == 1 && trim(row[0]).empty(); }

}  // namespace

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view to_string(GenderCategory g) {
  switch (g) {
    case GenderCategory::kFemale: return "female";
    case GenderCategory::kMostlyFemale: return "mostly_female";
    case GenderCategory::kMale: return "male";
    case GenderCategory::kMostlyMale: return "mostly_male";
    case GenderCategory::kAmbiguous: return "ambiguous";
    case GenderCategory::kUnknown: return "unknown";
  }
  return "unknown";
}

GenderCategory parse_gender(std::string_view text) {
  const std::string v = ascii_lower(trim(text));
  for (auto g : {GenderCategory::kFemale, GenderCategory::kMostlyFemale, GenderCategory::kMale,
                 GenderCategory::kMostlyMale, GenderCategory::kAmbiguous, GenderCategory::kUnknown}) {
    if (v == to_string(g)) return g;
  }
  throw Error(ErrorCode::kParse, fmt::format("unknown gender category '{}'", text));
}

// ---------------------------------------------------------------------------

NameTable NameTable::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse(in);
}

NameTable NameTable::parse(std::istream& in) {
  NameTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kParse, fmt::format("name table line {}: expected name<TAB>category", lineno));
    }
    table.insert(trim(view.substr(0, tab)), parse_gender(view.substr(tab + 1)));
  }
  return table;
}

void NameTable::insert(std::string_view name, GenderCategory category) {
  table_[ascii_lower(name)] = category;
}

std::optional<GenderCategory> NameTable::find(std::string_view name) const {
  auto it = table_.find(ascii_lower(name));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

GenderCategory predict_gender(std::string_view first_name, const NameTable& table) {
  return table.find(trim(first_name)).value_or(GenderCategory::kUnknown);
}

// ---------------------------------------------------------------------------

void Roster::add(Candidate candidate) {
  if (!candidate.handle.empty() && candidate.handle.front() == '@') candidate.handle.erase(0, 1);
  if (candidate.handle.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "candidate handle must be non-empty");
  }
  const std::string key = ascii_lower(candidate.handle);
  if (index_.contains(key)) {
    throw Error(ErrorCode::kDuplicateHandle, fmt::format("duplicate handle '{}'", candidate.handle));
  }
  index_.emplace(key, candidates_.size());
  candidates_.push_back(std::move(candidate));
}

const Candidate* Roster::find(std::string_view handle) const {
  if (!handle.empty() && handle.front() == '@') handle.remove_prefix(1);
  auto it = index_.find(ascii_lower(handle));
  return it == index_.end() ? nullptr : &candidates_[it->second];
}

std::vector<std::string> Roster::tracked_handles() const {
  std::vector<std::string> out;
  for (const auto& c : candidates_) {
    if (c.tracked) out.push_back(ascii_lower(c.handle));
  }
  return out;
}

Roster load_roster(const std::filesystem::path& path, const NameTable& names) {
  auto in = open_input(path);
  return read_roster(in, names);
}

Roster read_roster(std::istream& in, const NameTable& names) {
  csv::Reader reader(in);
  auto header_row = reader.next();
  if (!header_row) throw Error(ErrorCode::kParse, "roster file has no header row");
  const csv::Header header(std::move(*header_row));
  const std::size_t c_handle = header.require("handle");
  const std::size_t c_display = header.require("display_name");
  const std::size_t c_first = header.require("first_name");
  const std::size_t c_gender = header.require("gender_declared");
  const std::size_t c_party = header.require("party");
  const std::size_t c_tracked = header.require("tracked");
  const std::size_t width = header.names().size();

  Roster roster;
  while (auto row = reader.next()) {
    if (is_blank(*row)) continue;
    if (row->size() != width) {
      throw Error(ErrorCode::kParse,
                  fmt::format("roster line {}: expected {} fields, found {}", reader.line(), width, row->size()));
    }
    Candidate c;
    c.handle = std::string(trim((*row)[c_handle]));
    c.display_name = (*row)[c_display];
    c.first_name = std::string(trim((*row)[c_first]));
    if (!trim((*row)[c_gender]).empty()) c.gender_declared = parse_gender((*row)[c_gender]);
    c.gender_predicted = predict_gender(c.first_name, names);
    c.party = (*row)[c_party];
    c.tracked = parse_bool((*row)[c_tracked], reader.line());
    roster.add(std::move(c));
  }
  return roster;
}

void write_roster(std::ostream& out, const Roster& roster) {
  csv::write_row(out, {"handle", "display_name", "first_name", "gender_declared", "party", "tracked"});
  for (const auto& c : roster.candidates()) {
    csv::write_row(out, {c.handle, c.display_name, c.first_name,
                         c.gender_declared ? std::string(to_string(*c.gender_declared)) : std::string(),
                         c.party, c.tracked ? "true" : "false"});
  }
}

// ---------------------------------------------------------------------------

std::vector<std::string> normalize_handles(const std::vector<std::string>& handles) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (std::string_view h : handles) {
    while (!h.empty() && h.front() == '@') h.remove_prefix(1);
    if (h.empty()) continue;
    if (seen.insert(ascii_lower(h)).second) out.emplace_back(h);
  }
  return out;
}

Tweet tweet_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "tweet must be a JSON object");
  Tweet t;
  try {
    t.id = j.at("id").is_number() ? j.at("id").dump() : j.at("id").get<std::string>();
    t.text = j.at("text").get<std::string>();
    t.lang = j.value("lang", std::string());
    t.author_handle = j.value("author_handle", std::string());
    if (!t.author_handle.empty() && t.author_handle.front() == '@') t.author_handle.erase(0, 1);
    t.mentioned_handles = normalize_handles(j.value("mentioned_handles", std::vector<std::string>{}));
    t.is_retweet = j.value("is_retweet", false);
    t.timestamp = j.contains("timestamp") ? parse_instant(j.at("timestamp").get<std::string>()) : Instant{};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad tweet object: {}", e.what()));
  }
  if (t.id.empty()) throw Error(ErrorCode::kInvalidArgument, "tweet id must be non-empty");
  return t;
}

nlohmann::json tweet_to_json(const Tweet& tweet) {
  return nlohmann::json{{"id", tweet.id},
                        {"text", tweet.text},
                        {"lang", tweet.lang},
                        {"author_handle", tweet.author_handle},
                        {"mentioned_handles", tweet.mentioned_handles},
                        {"is_retweet", tweet.is_retweet},
                        {"timestamp", format_instant(tweet.timestamp)}};
}

// ---------------------------------------------------------------------------

std::string_view to_string(Label label) {
  return label == Label::kHateful ? "hateful" : "not_hateful";
}

std::size_t LabeledCorpus::count(Label label) const {
  return static_cast<std::size_t>(
      std::count_if(examples_.begin(), examples_.end(), [&](const auto& e) { return e.label == label; }));
}

double LabeledCorpus::class_balance() const {
  if (examples_.empty()) return 0.0;
  return static_cast<double>(count(Label::kHateful)) / static_cast<double>(examples_.size());
}

LabeledCorpus load_labeled_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_labeled_dataset(in);
}

LabeledCorpus read_labeled_dataset(std::istream& in) {
  csv::Reader reader(in);
  auto header_row = reader.next();
  if (!header_row) throw Error(ErrorCode::kParse, "labeled dataset has no header row");
  const csv::Header header(std::move(*header_row));
  const std::size_t c_id = header.require("id");
  const std::size_t c_text = header.require("text");
  const std::size_t c_label = header.require("label");
  const std::size_t needed = std::max({c_id, c_text, c_label}) + 1;

  std::vector<LabeledExample> examples;
  std::unordered_set<std::string> seen_text;
  std::unordered_set<std::string> seen_id;
  std::size_t row_number = 0;
  while (auto row = reader.next()) {
    ++row_number;
    if (is_blank(*row)) continue;
    if (row->size() < needed) {
      throw Error(ErrorCode::kParse, fmt::format("row {} (line {}): too few fields", row_number, reader.line()));
    }
    const std::string label_token = ascii_lower(trim((*row)[c_label]));
    Label label;
    if (label_token == "hateful") {
      label = Label::kHateful;
    } else if (label_token == "not_hateful") {
      label = Label::kNotHateful;
    } else {
      throw Error(ErrorCode::kUnknownLabel,
                  fmt::format("row {}: unknown label '{}'", row_number, (*row)[c_label]));
    }
    LabeledExample ex;
    ex.id = (*row)[c_id];
    ex.raw_text = (*row)[c_text];
    ex.clean_text = clean(ex.raw_text);
    ex.label = label;
    if (!seen_text.insert(ex.clean_text.value()).second) continue;
    if (!seen_id.insert(ex.id).second) {
      throw Error(ErrorCode::kParse, fmt::format("row {}: duplicate id '{}'", row_number, ex.id));
    }
    examples.push_back(std::move(ex));
  }
  return LabeledCorpus(std::move(examples));
}

std::size_t stratified_train_count(std::size_t class_count, double train_fraction) {
  // The epsilon absorbs representation error such as 15 * 0.8 = 11.999...
  return static_cast<std::size_t>(std::floor(static_cast<double>(class_count) * train_fraction + 1e-9));
}

TrainTestSplit split_train_test(const LabeledCorpus& corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, fmt::format("train_fraction {} not in (0, 1)", train_fraction));
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_class[static_cast<int>(corpus.examples()[i].label)].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].empty()) {
      throw Error(ErrorCode::kEmptyClass,
                  fmt::format("class '{}' has no members", to_string(static_cast<Label>(c))));
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t n_train = stratified_train_count(members.size(), train_fraction);
    for (std::size_t k = 0; k < members.size(); ++k) {
      (k < n_train ? train_idx : test_idx).push_back(members[k]);
    }
  }
  // Each side keeps corpus order.
  auto gather = [&](std::vector<std::size_t>& idx) {
    std::sort(idx.begin(), idx.end());
    std::vector<LabeledExample> side;
    side.reserve(idx.size());
    for (std::size_t i : idx) side.push_back(corpus.examples()[i]);
    return LabeledCorpus(std::move(side));
  };
  return {gather(train_idx), gather(test_idx)};
}

}  // namespace counterbot
