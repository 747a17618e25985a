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

#include "counterbot/registry.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "counterbot/error.hpp"

namespace counterbot {

std::string_view to_string(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::kToxicity: return "toxicity";
    case FeatureFamily::kHate: return "hate";
    case FeatureFamily::kSentiment: return "sentiment";
  }
  return "unknown";
}

const std::vector<std::string>& default_toxicity_attributes() {
  static const std::vector<std::string> kNames = {
      "IDENTITY_ATTACK", "INCOHERENT",         "TOXICITY_FAST",        "THREAT",
      "INSULT",          "LIKELY_TO_REJECT",   "TOXICITY",             "PROFANITY",
      "SEXUALLY_EXPLICIT", "ATTACK_ON_AUTHOR", "SPAM",                 "ATTACK_ON_COMMENTER",
      "OBSCENE",         "SEVERE_TOXICITY",    "INFLAMMATORY"};
  return kNames;
}

const std::vector<std::string>& hate_feature_names() {
  static const std::vector<std::string> kNames = {"sonar_hate_speech", "sonar_offensive_language",
                                                  "sonar_neither"};
  return kNames;
}

const std::vector<std::string>& sentiment_feature_names() {
  static const std::vector<std::string> kNames = {"vader_neg", "vader_neu", "vader_pos", "vader_compound"};
  return kNames;
}

FeatureFamily family_of(std::string_view feature_name) {
  if (feature_name.rfind("sonar_", 0) == 0) return FeatureFamily::kHate;
  if (feature_name.rfind("vader_", 0) == 0) return FeatureFamily::kSentiment;
  return FeatureFamily::kToxicity;
}

FeatureRegistry::FeatureRegistry(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& n = names_[i];
    if (n.empty()) throw Error(ErrorCode::kInvalidArgument, "feature names must be non-empty");
    if (!index_.emplace(n, i).second) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("duplicate feature name '{}'", n));
    }
    const FeatureFamily fam = family_of(n);
    if (fam == FeatureFamily::kHate &&
        std::find(hate_feature_names().begin(), hate_feature_names().end(), n) == hate_feature_names().end()) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown hate feature '{}'", n));
    }
    if (fam == FeatureFamily::kSentiment &&
        std::find(sentiment_feature_names().begin(), sentiment_feature_names().end(), n) ==
            sentiment_feature_names().end()) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown sentiment feature '{}'", n));
    }
    families_.push_back(fam);
  }
}

FeatureRegistry FeatureRegistry::default_registry() {
  return with_families({FeatureFamily::kToxicity, FeatureFamily::kHate, FeatureFamily::kSentiment});
}

FeatureRegistry FeatureRegistry::with_families(std::initializer_list<FeatureFamily> families) {
  auto wanted = [&](FeatureFamily f) { return std::find(families.begin(), families.end(), f) != families.end(); };
  std::vector<std::string> names;
  if (wanted(FeatureFamily::kToxicity)) {
    names.insert(names.end(), default_toxicity_attributes().begin(), default_toxicity_attributes().end());
  }
  if (wanted(FeatureFamily::kHate)) {
    names.insert(names.end(), hate_feature_names().begin(), hate_feature_names().end());
  }
  if (wanted(FeatureFamily::kSentiment)) {
    names.insert(names.end(), sentiment_feature_names().begin(), sentiment_feature_names().end());
  }
  return FeatureRegistry(std::move(names));
}

std::optional<std::size_t> FeatureRegistry::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool FeatureRegistry::uses(FeatureFamily family) const {
  return std::find(families_.begin(), families_.end(), family) != families_.end();
}

std::vector<std::size_t> FeatureRegistry::columns(FeatureFamily family) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < families_.size(); ++i) {
    if (families_[i] == family) out.push_back(i);
  }
  return out;
}

std::vector<std::string> FeatureRegistry::toxicity_attributes() const {
  std::vector<std::string> out;
  for (std::size_t i : columns(FeatureFamily::kToxicity)) out.push_back(names_[i]);
  return out;
}

double FeatureRegistry::lower_bound(std::size_t i) const {
  return names_.at(i) == "vader_compound" ? -1.0 : 0.0;
}

}  // namespace counterbot
