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

#include <array>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "counterbot/textprep.hpp"

namespace counterbot {

enum class HateClass : int { kHateSpeech = 0, kOffensive = 1, kNeither = 2 };
inline constexpr int kHateClassCount = 3;

std::string_view to_string(HateClass c);
/// Accepts hate_speech, offensive_language, neither. Throws Error(kUnknownLabel).
HateClass parse_hate_class(std::string_view token);

struct HateClassScores {
  double hate = 0.0;
  double offensive = 0.0;
  double neither = 0.0;
  /// Set when the scores come from an untrained model (uniform prior).
  bool untrained = false;
};

struct HateExample {
  CleanText text;
  HateClass label = HateClass::kNeither;
};

struct HateTrainParams {
  int epochs = 400;
  double learning_rate = 1.0;
  double l2 = 1e-4;
};

/// Multinomial logistic regression over L2-normalised TF-IDF unigrams.
/// Scoring is const and thread-safe.
class HateModel {
 public:
  /// Untrained model; score() returns the uniform distribution.
  HateModel() = default;

  /// Full-batch gradient descent on softmax cross-entropy.
  /// Throws Error(kEmptyClass) unless all three classes are present.
  static HateModel train(const std::vector<HateExample>& examples, const HateTrainParams& params = {});

  bool trained() const { return !vocabulary_.empty(); }
  HateClassScores score(const CleanText& text) const;

  nlohmann::json to_json() const;
  static HateModel from_json(const nlohmann::json& j);

  std::size_t vocabulary_size() const { return vocabulary_.size(); }

 private:
  using SparseRow = std::vector<std::pair<std::size_t, double>>;

  SparseRow vectorize(const CleanText& text) const;
  std::array<double, kHateClassCount> probabilities(const SparseRow& row) const;

  std::unordered_map<std::string, std::size_t> vocabulary_;
  std::vector<double> idf_;
  // Row-major [class][term].
  std::vector<double> weights_;
  std::array<double, kHateClassCount> bias_{};
};

/// Lowercased [a-z0-9']+ runs.
std::vector<std::string> hate_tokens(std::string_view text);

/// CSV with columns id,text,label; texts are cleaned on load.
std::vector<HateExample> load_hate_corpus(const std::filesystem::path& path);
std::vector<HateExample> read_hate_corpus(std::istream& in);

}  // namespace counterbot
