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
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "counterbot/dataset.hpp"

namespace counterbot {

struct TrainParams {
  int num_trees = 100;
  double learning_rate = 0.1;
  int max_leaves = 31;
  int min_samples_leaf = 20;
  double l2_lambda = 1.0;
  double min_gain = 0.0;
  /// Recorded with the model; exact greedy training draws no random numbers.
  std::uint64_t seed = 0;

  /// Throws Error(kInvalidArgument) on non-positive sizes or rates.
  void validate() const;
};

/// Internal node when feature >= 0 (x[feature] <= threshold goes left),
/// leaf otherwise.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double weight = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  std::size_t leaf_count() const;
};

class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::shared_ptr<const FeatureRegistry> registry, double base_score, double learning_rate,
           std::vector<Tree> trees = {});

  const std::shared_ptr<const FeatureRegistry>& registry() const { return registry_; }
  double base_score() const { return base_score_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<Tree>& trees() const { return trees_; }
  void add_tree(Tree tree) { trees_.push_back(std::move(tree)); }

  /// base_score + learning_rate * sum of tree outputs.
  double raw_score(std::span<const double> x) const;
  /// Throws Error(kDimensionMismatch) when x does not match the registry.
  double predict(std::span<const double> x) const;
  /// Also rejects a vector laid out by a different registry.
  double predict(const FeatureVector& fv) const;
  std::vector<double> predict_all(const Dataset& data) const;

  nlohmann::json to_json() const;
  static Ensemble from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Ensemble load(const std::filesystem::path& path);

 private:
  std::shared_ptr<const FeatureRegistry> registry_;
  double base_score_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<Tree> trees_;
};

/// Per-round training diagnostics; loss[0] is the loss of the prior alone,
/// loss[t] the loss after t trees.
struct TrainTrace {
  std::vector<double> loss;
};

/// Logistic-loss boosting with leaf-wise growth and exact split search.
/// Throws Error(kSingleClass) or Error(kNanFeature) (naming the row).
Ensemble train_gbdt(const Dataset& data, const TrainParams& params, TrainTrace* trace = nullptr);

/// Best split over all features for the given rows, as used by the trainer.
struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  bool valid() const { return feature >= 0; }
};
SplitChoice find_best_split(const Dataset& data, std::span<const double> grad, std::span<const double> hess,
                            std::span<const std::size_t> rows, const TrainParams& params);

/// Mean logistic loss of raw scores against labels.
double logistic_loss(std::span<const double> raw, std::span<const int> labels);

double sigmoid(double z);

/// Deployed rule: respond iff toxicity >= theta. Both must lie in [0, 1]
/// (Error(kOutOfRange) otherwise).
bool threshold_decide(double toxicity, double theta);

}  // namespace counterbot
