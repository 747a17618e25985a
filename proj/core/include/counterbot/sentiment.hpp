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

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace counterbot {

struct RuleSentimentScores {
  double neg = 0.0;
  double neu = 0.0;
  double pos = 0.0;
  double compound = 0.0;
};

/// Lexicon-and-rules sentiment scorer compatible with VADER 3.3.2. Immutable
/// after construction and safe to share between threads.
class SentimentAnalyzer {
 public:
  // Empirically derived constants of the reference model.
  static constexpr double kBoosterIncrement = 0.293;
  static constexpr double kCapsIncrement = 0.733;
  static constexpr double kNegationScalar = -0.74;
  static constexpr double kExclamationIncrement = 0.292;
  static constexpr int kMaxExclamations = 4;
  static constexpr double kNormalizationAlpha = 15.0;

  /// Lexicon lines are "token<TAB>mean[<TAB>...]"; emoji lines are
  /// "emoji<TAB>description".
  SentimentAnalyzer(std::istream& lexicon, std::istream& emoji_lexicon);

  /// Loads vader_lexicon.txt and emoji_utf8_lexicon.txt from a directory.
  static SentimentAnalyzer load(const std::filesystem::path& data_dir);

  /// Loads from the bundled data directory (see data_dir()).
  static const SentimentAnalyzer& bundled();

  RuleSentimentScores score(std::string_view text) const;

  /// Unrounded raw valence sum after punctuation emphasis; compound is
  /// s / sqrt(s^2 + alpha) of this value, clipped to [-1, 1].
  double raw_valence_sum(std::string_view text) const;

  std::size_t lexicon_size() const { return lexicon_.size(); }

 private:
  struct Sifted {
    std::vector<double> sentiments;
    std::string text;
  };

  Sifted valences(std::string_view text) const;
  static double emphasized_sum(const Sifted& s);
  double word_valence(const std::vector<std::string>& words, const std::vector<std::string>& lowered,
                      std::size_t i, bool cap_diff) const;
  bool in_lexicon(const std::string& lowered) const { return lexicon_.contains(lowered); }

  std::unordered_map<std::string, double> lexicon_;
  std::unordered_map<std::string, std::string> emoji_;
};

/// s / sqrt(s^2 + alpha), clipped to [-1, 1].
double normalize_valence(double score, double alpha = SentimentAnalyzer::kNormalizationAlpha);

}  // namespace counterbot
