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

#include <memory>

#include "counterbot/hate_scorer.hpp"
#include "counterbot/registry.hpp"
#include "counterbot/sentiment.hpp"
#include "counterbot/textprep.hpp"
#include "counterbot/time.hpp"
#include "counterbot/toxicity.hpp"

namespace counterbot {

/// Scorers backing each feature family. Pointers are non-owning; a family the
/// registry does not use may be null.
struct ScorerSet {
  ToxicityScorer* toxicity = nullptr;
  const SentimentAnalyzer* sentiment = nullptr;
  const HateModel* hate = nullptr;
  /// Deadline for the remote toxicity call.
  Millis family_timeout{2000};
};

/// Scores `text` with every family the registry uses and lays the values out
/// in registry order. The toxicity request runs concurrently with the local
/// scorers. Failures surface as FeatureError naming the family.
FeatureVector featurize(const CleanText& text, const std::shared_ptr<const FeatureRegistry>& registry,
                        const ScorerSet& scorers);

}  // namespace counterbot
