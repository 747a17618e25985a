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
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "counterbot/balance.hpp"
#include "counterbot/dataset.hpp"
#include "counterbot/gbdt.hpp"

namespace counterbot {

// ---------------------------------------------------------------------------
// ROC AUC
// ---------------------------------------------------------------------------

/// Mann-Whitney AUC: (concordant + 0.5 * tied) / (positives * negatives),
/// computed from average ranks in O(n log n). Throws Error(kSingleClass).
double auc(std::span<const double> scores, std::span<const int> labels);

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

/// Fold index per row. Each class is shuffled with `seed` and dealt
/// round-robin, continuing the deal across classes, so per-class fold sizes
/// differ by at most one. Throws Error(kInvalidArgument) for k < 2 and
/// Error(kEmptyClass) when a class has fewer than k members.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

/// Fits on `train` and returns one score per row of `test`.
using FoldScorer = std::function<std::vector<double>(const Dataset& train, const Dataset& test, std::uint64_t seed)>;

FoldScorer gbdt_scorer(TrainParams params);
/// Stratified random classifier: Bernoulli draws at the training prior.
FoldScorer random_baseline_scorer();

struct CVOptions {
  int k = 10;
  std::uint64_t seed = 0;
  /// ADASYN applied to each training portion; never to held-out folds.
  std::optional<BalancerConfig> balance = BalancerConfig{};
  /// Evaluate folds on worker threads (0 = hardware concurrency).
  unsigned threads = 0;
};

struct CVReport {
  std::string model_id;
  std::string feature_set;
  std::vector<double> fold_auc;

  double mean() const;
  /// Sample standard deviation (n - 1 denominator).
  double stddev() const;
  nlohmann::json to_json() const;
};

CVReport kfold_cv(const Dataset& data, const FoldScorer& scorer, const CVOptions& options,
                  std::string model_id = "gbdt", std::string feature_set = "all");

/// Same as kfold_cv but with an explicit fold assignment.
CVReport cv_with_folds(const Dataset& data, std::span<const int> folds, int k, const FoldScorer& scorer,
                       const CVOptions& options, std::string model_id, std::string feature_set);

struct FeatureGroup {
  std::string name;
  std::vector<std::size_t> columns;
};

/// all, then toxicity, sentiment, hate (families absent from the registry
/// are skipped).
std::vector<FeatureGroup> default_feature_groups(const FeatureRegistry& registry);

/// One CVReport per group plus a trailing "random" baseline row, all on the
/// same folds. Throws Error(kInvalidArgument) for an empty group.
std::vector<CVReport> ablation(const Dataset& data, const std::vector<FeatureGroup>& groups, const TrainParams& params,
                               const CVOptions& options);

struct SweepEntry {
  TrainParams params;
  CVReport report;
};

/// num_trees {50, 100, 200} x learning_rate {0.05, 0.1, 0.3} x max_leaves {7, 15, 31}.
std::vector<TrainParams> default_sweep_grid(const TrainParams& base = {});

/// Evaluates every grid point on shared folds; the result is sorted by
/// descending mean AUC (grid order breaks ties).
std::vector<SweepEntry> sweep(const Dataset& data, const std::vector<TrainParams>& grid, const CVOptions& options);

// ---------------------------------------------------------------------------
// Score distributions
// ---------------------------------------------------------------------------

struct ClassDensity {
  std::string name;
  std::size_t count = 0;
  double bandwidth = 0.0;
  /// Density on the grid, rescaled so its trapezoid integral over [0, 1] is 1.
  std::vector<double> density;
  /// Histogram bin heights normalised to unit area.
  std::vector<double> histogram;
};

struct KDECurves {
  std::vector<double> grid;       // evenly spaced on [0, 1]
  std::vector<double> bin_edges;  // bins + 1 edges on [0, 1]
  std::vector<ClassDensity> classes;
};

inline constexpr std::size_t kKdeGridPoints = 512;
inline constexpr std::size_t kHistogramBins = 40;

/// n^(-1/5) times the sample standard deviation. Throws
/// Error(kInvalidArgument) when that is zero or undefined.
double scott_bandwidth(std::span<const double> values);

double trapezoid(std::span<const double> x, std::span<const double> y);

/// Gaussian KDE per class. Scores must lie in [0, 1] (Error(kOutOfRange)).
/// Without an explicit bandwidth each class uses Scott's rule.
KDECurves kde_report(const std::vector<std::pair<std::string, std::vector<double>>>& classes,
                     std::optional<double> bandwidth = std::nullopt, std::size_t grid_points = kKdeGridPoints,
                     std::size_t bins = kHistogramBins);

/// Columns: class,grid,value
void write_kde_csv(std::ostream& out, const KDECurves& curves);
/// Columns: class,bin_left,bin_right,density
void write_histogram_csv(std::ostream& out, const KDECurves& curves);
nlohmann::json kde_summary(const KDECurves& curves);

}  // namespace counterbot
