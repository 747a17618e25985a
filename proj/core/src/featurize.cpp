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

#include "counterbot/featurize.hpp"

#include <future>

#include <fmt/format.h>

#include "counterbot/error.hpp"

namespace counterbot {

namespace {

void check_range(const FeatureRegistry& reg, std::size_t i, double v) {
  if (!(v >= reg.lower_bound(i) && v <= reg.upper_bound(i))) {
    throw FeatureError(std::string(to_string(reg.family(i))), ErrorCode::kOutOfRange,
                       fmt::format("{} = {} is outside its range", reg.name(i), v));
  }
}

}  // namespace

FeatureVector featurize(const CleanText& text, const std::shared_ptr<const FeatureRegistry>& registry,
                        const ScorerSet& scorers) {
  if (!registry) throw Error(ErrorCode::kInvalidArgument, "featurize needs a registry");
  const FeatureRegistry& reg = *registry;
  const auto family_name = [](FeatureFamily f) { return std::string(to_string(f)); };

  const bool want_tox = reg.uses(FeatureFamily::kToxicity);
  const bool want_hate = reg.uses(FeatureFamily::kHate);
  const bool want_sent = reg.uses(FeatureFamily::kSentiment);
  if (want_tox && !scorers.toxicity) {
    throw FeatureError(family_name(FeatureFamily::kToxicity), ErrorCode::kPrecondition, "no toxicity scorer configured");
  }
  if (want_hate && !scorers.hate) {
    throw FeatureError(family_name(FeatureFamily::kHate), ErrorCode::kPrecondition, "no hate scorer configured");
  }
  if (want_sent && !scorers.sentiment) {
    throw FeatureError(family_name(FeatureFamily::kSentiment), ErrorCode::kPrecondition,
                       "no sentiment scorer configured");
  }

  std::future<AttributeScores> tox_future;
  if (want_tox) {
    if (text.empty()) {
      throw FeatureError(family_name(FeatureFamily::kToxicity), ErrorCode::kPrecondition, "cannot score empty text");
    }
    const Deadline deadline = std::chrono::steady_clock::now() + scorers.family_timeout;
    tox_future = std::async(std::launch::async, [&scorers, &text, attrs = reg.toxicity_attributes(), deadline] {
      return scorers.toxicity->score(text.value(), attrs, deadline);
    });
  }

  FeatureVector fv{std::vector<double>(reg.size(), 0.0), registry};

  // Local families run while the remote request is in flight. A throw here
  // still joins the future in its destructor.
  if (want_hate) {
    HateClassScores h;
    try {
      h = scorers.hate->score(text);
    } catch (const Error& e) {
      throw FeatureError(family_name(FeatureFamily::kHate), e.code(), e.what());
    }
    for (std::size_t i : reg.columns(FeatureFamily::kHate)) {
      const auto& n = reg.name(i);
      if (n == "sonar_hate_speech") fv.values[i] = h.hate;
      else if (n == "sonar_offensive_language") fv.values[i] = h.offensive;
      else if (n == "sonar_neither") fv.values[i] = h.neither;
      else throw FeatureError(family_name(FeatureFamily::kHate), ErrorCode::kInvalidArgument,
                              fmt::format("unknown hate feature '{}'", n));
    }
  }
  if (want_sent) {
    const RuleSentimentScores s = scorers.sentiment->score(text.value());
    for (std::size_t i : reg.columns(FeatureFamily::kSentiment)) {
      const auto& n = reg.name(i);
      if (n == "vader_neg") fv.values[i] = s.neg;
      else if (n == "vader_neu") fv.values[i] = s.neu;
      else if (n == "vader_pos") fv.values[i] = s.pos;
      else if (n == "vader_compound") fv.values[i] = s.compound;
      else throw FeatureError(family_name(FeatureFamily::kSentiment), ErrorCode::kInvalidArgument,
                              fmt::format("unknown sentiment feature '{}'", n));
    }
  }

  if (want_tox) {
    const auto wait_until = std::chrono::steady_clock::now() + scorers.family_timeout + Millis{250};
    if (tox_future.wait_until(wait_until) != std::future_status::ready) {
      throw FeatureError(family_name(FeatureFamily::kToxicity), ErrorCode::kTimeout, "toxicity scorer timed out");
    }
    AttributeScores scores;
    try {
      scores = tox_future.get();
    } catch (const Error& e) {
      throw FeatureError(family_name(FeatureFamily::kToxicity), e.code(), e.what());
    } catch (const std::exception& e) {
      throw FeatureError(family_name(FeatureFamily::kToxicity), ErrorCode::kScorerFailure, e.what());
    }
    for (std::size_t i : reg.columns(FeatureFamily::kToxicity)) {
      auto it = scores.find(reg.name(i));
      if (it == scores.end()) {
        throw FeatureError(family_name(FeatureFamily::kToxicity), ErrorCode::kMissingAttribute,
                           fmt::format("no score for '{}'", reg.name(i)));
      }
      fv.values[i] = it->second;
    }
  }

  for (std::size_t i = 0; i < reg.size(); ++i) check_range(reg, i, fv.values[i]);
  return fv;
}

}  // namespace counterbot
