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

#include <gtest/gtest.h>

#include <atomic>
#include <numeric>

#include "counterbot/data.hpp"
#include "counterbot/featurize.hpp"
#include "counterbot/hate_scorer.hpp"
#include "counterbot/registry.hpp"
#include "counterbot/sentiment.hpp"
#include "counterbot/toxicity.hpp"
#include "error_matchers.hpp"

namespace counterbot {
namespace {

using testing::code_of;

TEST(Registry, DefaultLayout) {
  const auto r = FeatureRegistry::default_registry();
  ASSERT_EQ(r.size(), 22u);
  EXPECT_EQ(r.toxicity_attributes().size(), 15u);
  EXPECT_EQ(r.name(15), "sonar_hate_speech");
  EXPECT_EQ(r.name(21), "vader_compound");
  EXPECT_EQ(r.lower_bound(21), -1.0);
  EXPECT_EQ(r.lower_bound(0), 0.0);
  EXPECT_TRUE(r.index_of("TOXICITY").has_value());
  EXPECT_EQ(code_of([] { FeatureRegistry({"a", "a"}); }), ErrorCode::kInvalidArgument);
}

TEST(Registry, FamilySubset) {
  const auto r = FeatureRegistry::with_families({FeatureFamily::kToxicity, FeatureFamily::kSentiment});
  EXPECT_EQ(r.size(), 19u);
  EXPECT_FALSE(r.uses(FeatureFamily::kHate));
}

ToxicityRules demo_rules() { return ToxicityRules::load(data_file("mock_rules.json")); }

TEST(Rules, FirstMatchOverridesDefaults) {
  const auto rules = demo_rules();
  const auto& attrs = default_toxicity_attributes();
  const auto calm = rules.evaluate("lovely day", attrs);
  EXPECT_EQ(calm.size(), attrs.size());
  EXPECT_DOUBLE_EQ(calm.at("TOXICITY"), 0.1);
  const auto rude = rules.evaluate("you are an idiot", attrs);
  EXPECT_DOUBLE_EQ(rude.at("TOXICITY"), 0.95);
  EXPECT_DOUBLE_EQ(rude.at("SPAM"), calm.at("SPAM"));
  EXPECT_EQ(code_of([&] { rules.evaluate("x", {"NOT_AN_ATTRIBUTE"}); }), ErrorCode::kMissingAttribute);
}

TEST(Rules, RejectsOutOfRangeScores) {
  EXPECT_EQ(code_of([] { ToxicityRules::from_json({{"default", {{"TOXICITY", 1.5}}}}); }),
            ErrorCode::kOutOfRange);
}

TEST(HateModel, UntrainedIsUniform) {
  const HateModel m;
  const auto s = m.score(clean("anything"));
  EXPECT_TRUE(s.untrained);
  EXPECT_DOUBLE_EQ(s.hate, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.offensive, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.neither, 1.0 / 3.0);
}

std::vector<HateExample> separable_corpus() {
  std::vector<HateExample> ex;
  const char* hate[] = {"alpha", "bravo", "charlie", "delta", "echo"};
  const char* off[] = {"golf", "hotel", "india", "juliet", "kilo"};
  const char* nei[] = {"mike", "november", "oscar", "papa", "quebec"};
  for (int i = 0; i < 10; ++i) {
    ex.push_back({clean(std::string(hate[i % 5]) + " " + hate[(i + 1) % 5]), HateClass::kHateSpeech});
    ex.push_back({clean(std::string(off[i % 5]) + " " + off[(i + 2) % 5]), HateClass::kOffensive});
    ex.push_back({clean(std::string(nei[i % 5]) + " " + nei[(i + 3) % 5]), HateClass::kNeither});
  }
  return ex;
}

TEST(HateModel, FitsSeparableCorpus) {
  const auto corpus = separable_corpus();
  ASSERT_EQ(corpus.size(), 30u);
  const auto m = HateModel::train(corpus);
  for (const auto& ex : corpus) {
    const auto s = m.score(ex.text);
    EXPECT_NEAR(s.hate + s.offensive + s.neither, 1.0, 1e-12);
    const double p[] = {s.hate, s.offensive, s.neither};
    const int argmax = static_cast<int>(std::max_element(p, p + 3) - p);
    EXPECT_EQ(argmax, static_cast<int>(ex.label)) << ex.text.value();
  }
  const auto back = HateModel::from_json(m.to_json());
  const auto a = m.score(clean("alpha kilo"));
  const auto b = back.score(clean("alpha kilo"));
  EXPECT_DOUBLE_EQ(a.hate, b.hate);
  EXPECT_DOUBLE_EQ(a.neither, b.neither);
}

TEST(HateModel, MissingClassRejected) {
  auto corpus = separable_corpus();
  std::erase_if(corpus, [](const HateExample& e) { return e.label == HateClass::kNeither; });
  EXPECT_EQ(code_of([&] { HateModel::train(corpus); }), ErrorCode::kEmptyClass);
}

TEST(HateModel, BundledDemoCorpusTrains) {
  const auto m = HateModel::train(load_hate_corpus(data_file("hate_demo.csv")));
  EXPECT_TRUE(m.trained());
}

class CountingScorer final : public ToxicityScorer {
 public:
  explicit CountingScorer(ToxicityRules rules) : inner_(std::move(rules)) {}
  using ToxicityScorer::score;
  AttributeScores score(std::string_view text, const std::vector<std::string>& attrs, Deadline d) override {
    ++calls;
    if (fail) throw Error(ErrorCode::kTransport, "down");
    return inner_.score(text, attrs, d);
  }
  std::atomic<int> calls{0};
  bool fail = false;

 private:
  RuleToxicityScorer inner_;
};

TEST(Featurize, DeterministicDefaultVector) {
  CountingScorer tox(demo_rules());
  const auto hate = HateModel::train(separable_corpus());
  const ScorerSet s{&tox, &SentimentAnalyzer::bundled(), &hate};
  auto reg = std::make_shared<const FeatureRegistry>(FeatureRegistry::default_registry());
  const auto a = featurize(clean("You clown"), reg, s);
  const auto b = featurize(clean("You clown"), reg, s);
  ASSERT_EQ(a.values.size(), 22u);
  EXPECT_EQ(a.values, b.values);
  EXPECT_DOUBLE_EQ(a.values[*reg->index_of("TOXICITY")], 0.95);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    EXPECT_GE(a.values[i], reg->lower_bound(i));
    EXPECT_LE(a.values[i], reg->upper_bound(i));
  }
}

TEST(Featurize, OmittedFamilyNeverInvoked) {
  CountingScorer tox(demo_rules());
  const ScorerSet s{&tox, &SentimentAnalyzer::bundled(), nullptr};
  auto reg = std::make_shared<const FeatureRegistry>(
      FeatureRegistry::with_families({FeatureFamily::kToxicity, FeatureFamily::kSentiment}));
  EXPECT_EQ(featurize(clean("hello"), reg, s).values.size(), 19u);
  EXPECT_EQ(tox.calls.load(), 1);
}

TEST(Featurize, FailureNamesFamily) {
  CountingScorer tox(demo_rules());
  tox.fail = true;
  const ScorerSet s{&tox, &SentimentAnalyzer::bundled(), nullptr};
  auto reg = std::make_shared<const FeatureRegistry>(
      FeatureRegistry::with_families({FeatureFamily::kToxicity, FeatureFamily::kSentiment}));
  try {
    featurize(clean("hello"), reg, s);
    FAIL();
  } catch (const FeatureError& e) {
    EXPECT_EQ(e.family(), "toxicity");
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
}

}  // namespace
}  // namespace counterbot
