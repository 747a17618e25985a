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

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace counterbot {

enum class FeatureFamily { kToxicity, kHate, kSentiment };

std::string_view to_string(FeatureFamily family);

/// Attribute that drives the deployed respond/ignore decision.
inline constexpr std::string_view kTriggerAttribute = "TOXICITY";

/// The fifteen toxicity attributes of the default registry, in order.
const std::vector<std::string>& default_toxicity_attributes();
const std::vector<std::string>& hate_feature_names();       // sonar_*
const std::vector<std::string>& sentiment_feature_names();  // vader_*

/// Ordered feature names; defines the column layout of every feature vector
/// and trained model. Names prefixed "sonar_" belong to the hate family,
/// "vader_" to the sentiment family, everything else is a toxicity attribute.
class FeatureRegistry {
 public:
  /// Throws Error(kInvalidArgument) on empty or duplicate names.
  explicit FeatureRegistry(std::vector<std::string> names);

  /// 15 toxicity attributes, then sonar_{hate_speech,offensive_language,neither},
  /// then vader_{neg,neu,pos,compound}: 22 columns.
  static FeatureRegistry default_registry();

  /// Default registry restricted to the given families, order preserved.
  static FeatureRegistry with_families(std::initializer_list<FeatureFamily> families);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  FeatureFamily family(std::size_t i) const { return families_.at(i); }
  bool uses(FeatureFamily family) const;
  std::vector<std::size_t> columns(FeatureFamily family) const;
  std::vector<std::string> toxicity_attributes() const;

  /// Inclusive value range of column i: [-1, 1] for vader_compound, else [0, 1].
  double lower_bound(std::size_t i) const;
  double upper_bound(std::size_t i) const { (void)i; return 1.0; }

  friend bool operator==(const FeatureRegistry& a, const FeatureRegistry& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::vector<FeatureFamily> families_;
  std::unordered_map<std::string, std::size_t> index_;
};

FeatureFamily family_of(std::string_view feature_name);

/// Scores for one text, laid out in registry order.
struct FeatureVector {
  std::vector<double> values;
  std::shared_ptr<const FeatureRegistry> registry;
};

}  // namespace counterbot
