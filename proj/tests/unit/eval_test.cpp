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

#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "counterbot/eval.hpp"
#include "error_matchers.hpp"
#include "support.hpp"

namespace counterbot {
namespace {

using testing::code_of;

TEST(Auc, WorkedExamples) {
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}), 0.75);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.1, 0.2, 0.9, 0.8}, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<int>{0, 1, 1}), 0.5);
  EXPECT_EQ(code_of([] { auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}); }), ErrorCode::kSingleClass);
}

TEST(Auc, MatchesPairCountingWithTies) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> level(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(2 + trial % 60);
    std::vector<int> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = level(rng) / 10.0;
      y[i] = level(rng) < 4 ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(auc(s, y), testing::pairwise_auc(s, y), 1e-12);
  }
}

TEST(Folds, StratifiedAndDeterministic) {
  std::vector<int> labels(100, 0);
  for (int i = 0; i < 30; ++i) labels[i * 3] = 1;
  const auto f = stratified_folds(labels, 10, 4);
  EXPECT_EQ(f, stratified_folds(labels, 10, 4));
  std::map<int, int> size, pos;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++size[f[i]];
    pos[f[i]] += labels[i];
  }
  ASSERT_EQ(size.size(), 10u);
  for (const auto& [fold, n] : size) {
    EXPECT_EQ(n, 10);
    EXPECT_LE(std::abs(pos[fold] - 3), 1);
  }
  EXPECT_EQ(code_of([&] { stratified_folds(labels, 1, 0); }), ErrorCode::kInvalidArgument);
  std::vector<int> sparse(50, 0);
  sparse[0] = 1;
  EXPECT_EQ(code_of([&] { stratified_folds(sparse, 10, 0); }), ErrorCode::kEmptyClass);
}

TEST(Folds, PerClassSizesDifferByAtMostOne) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 9;
    std::vector<int> labels(static_cast<std::size_t>(k * 2 + trial * 3));
    for (auto& l : labels) l = std::bernoulli_distribution(0.3)(rng) ? 1 : 0;
    for (int i = 0; i < 2 * k; ++i) labels[static_cast<std::size_t>(i)] = i % 2;
    const auto f = stratified_folds(labels, k, static_cast<std::uint64_t>(trial));
    for (int c = 0; c < 2; ++c) {
      std::vector<int> count(static_cast<std::size_t>(k), 0);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == c) ++count[static_cast<std::size_t>(f[i])];
      }
      const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
      EXPECT_LE(*hi - *lo, 1);
    }
  }
}

TEST(CrossValidation, BalancingNeverTouchesHeldOutRows) {
  std::mt19937_64 rng(6);
  const Dataset d = testing::random_dataset(rng, 120, 3, 0.2);
  std::set<std::vector<double>> originals;
  for (std::size_t i = 0; i < d.rows(); ++i) originals.insert({d.row(i).begin(), d.row(i).end()});
  std::mutex mu;
  std::size_t grown = 0;
  const FoldScorer spy = [&](const Dataset& train, const Dataset& test, std::uint64_t) {
    std::lock_guard lock(mu);
    for (std::size_t i = 0; i < test.rows(); ++i) {
      EXPECT_TRUE(originals.contains({test.row(i).begin(), test.row(i).end()}));
    }
    if (train.positives() * 2 > train.rows() / 2) ++grown;
    return std::vector<double>(test.rows(), 0.5);
  };
  CVOptions o;
  o.k = 5;
  const auto report = kfold_cv(d, spy, o);
  EXPECT_EQ(report.fold_auc.size(), 5u);
  EXPECT_EQ(grown, 5u);
  for (double a : report.fold_auc) EXPECT_DOUBLE_EQ(a, 0.5);
}

TEST(CrossValidation, SameSeedSameFoldScores) {
  const Dataset d = testing::toxicity_signal_dataset(300, 0.3, 2);
  TrainParams p;
  p.num_trees = 10;
  CVOptions o;
  o.k = 5;
  o.seed = 17;
  const auto a = kfold_cv(d, gbdt_scorer(p), o);
  const auto b = kfold_cv(d, gbdt_scorer(p), o);
  EXPECT_EQ(a.fold_auc, b.fold_auc);
  const auto j = a.to_json();
  EXPECT_EQ(j.at("k"), 5);
  EXPECT_NEAR(j.at("mean_auc").get<double>(), a.mean(), 1e-15);
}

TEST(CrossValidation, NullLabelsGiveChanceAuc) {
  std::mt19937_64 rng(21);
  const Dataset d = testing::random_dataset(rng, 1000, 5, 0.3);
  TrainParams p;
  p.num_trees = 30;
  CVOptions o;
  o.k = 10;
  const auto r = kfold_cv(d, gbdt_scorer(p), o);
  EXPECT_NEAR(r.mean(), 0.5, 0.05);
}

TEST(CrossValidation, StddevIsSampleStd) {
  CVReport r;
  r.fold_auc = {0.5, 0.7, 0.9};
  EXPECT_DOUBLE_EQ(r.mean(), 0.7);
  EXPECT_NEAR(r.stddev(), 0.2, 1e-12);
}

TEST(Ablation, GroupsAndBaseline) {
  const Dataset d = testing::toxicity_signal_dataset(400, 0.3, 8);
  TrainParams p;
  p.num_trees = 20;
  CVOptions o;
  o.k = 4;
  const auto groups = default_feature_groups(*d.registry());
  ASSERT_EQ(groups.size(), 4u);
  EXPECT_EQ(groups[0].name, "all");
  const auto rows = ablation(d, groups, p, o);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows.back().model_id, "stratified_random");
  EXPECT_GT(rows[1].mean(), 0.85);
  EXPECT_NEAR(rows[2].mean(), 0.5, 0.12);
  EXPECT_EQ(code_of([&] { ablation(d, {FeatureGroup{"empty", {}}}, p, o); }), ErrorCode::kInvalidArgument);
}

TEST(Sweep, GridShapeAndOrder) {
  EXPECT_EQ(default_sweep_grid().size(), 27u);
  const Dataset d = testing::toxicity_signal_dataset(200, 0.3, 1);
  std::vector<TrainParams> grid(2);
  grid[0].num_trees = 5;
  grid[1].num_trees = 15;
  CVOptions o;
  o.k = 3;
  const auto out = sweep(d, grid, o);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_GE(out[0].report.mean(), out[1].report.mean());
}

TEST(Kde, ScottBandwidthFormula) {
  const std::vector<double> v = {0.1, 0.2, 0.4, 0.8};
  double m = 0.25 * (0.1 + 0.2 + 0.4 + 0.8), ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  EXPECT_NEAR(scott_bandwidth(v), std::pow(4.0, -0.2) * std::sqrt(ss / 3.0), 1e-15);
  EXPECT_EQ(code_of([] { scott_bandwidth(std::vector<double>{0.3, 0.3}); }), ErrorCode::kInvalidArgument);
}

TEST(Kde, SingleKernelPeaksAtItsCentre) {
  const auto c = kde_report({{"one", {0.5}}}, 0.05);
  const auto& dens = c.classes[0].density;
  const auto peak = std::max_element(dens.begin(), dens.end()) - dens.begin();
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    if (std::abs(c.grid[i] - 0.5) < std::abs(c.grid[nearest] - 0.5)) nearest = i;
  }
  EXPECT_LE(std::abs(static_cast<long>(peak) - static_cast<long>(nearest)), 1);
}

TEST(Kde, DensitiesIntegrateToOne) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(5 + trial * 7), b(3 + trial * 5);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng) * u(rng);
    const auto c = kde_report({{"hateful", a}, {"not_hateful", b}});
    for (const auto& cls : c.classes) {
      double integral = 0;
      for (std::size_t i = 1; i < c.grid.size(); ++i) {
        integral += 0.5 * (cls.density[i] + cls.density[i - 1]) * (c.grid[i] - c.grid[i - 1]);
      }
      EXPECT_NEAR(integral, 1.0, 0.01);
      double area = 0;
      for (std::size_t i = 0; i < cls.histogram.size(); ++i) area += cls.histogram[i] * (c.bin_edges[i + 1] - c.bin_edges[i]);
      EXPECT_NEAR(area, 1.0, 1e-9);
    }
  }
}

TEST(Kde, ZeroVarianceNeedsBandwidth) {
  EXPECT_EQ(code_of([] { kde_report({{"flat", {0.4, 0.4, 0.4}}}); }), ErrorCode::kInvalidArgument);
  EXPECT_NO_THROW(kde_report({{"flat", {0.4, 0.4, 0.4}}}, 0.05));
  EXPECT_EQ(code_of([] { kde_report({{"bad", {0.4, 1.4}}}); }), ErrorCode::kOutOfRange);
}

TEST(Kde, CsvWriters) {
  const auto c = kde_report({{"a", {0.2, 0.3, 0.35}}}, std::nullopt, 16, 4);
  std::ostringstream kde, hist;
  write_kde_csv(kde, c);
  write_histogram_csv(hist, c);
  const std::string k = kde.str();
  const std::string h = hist.str();
  EXPECT_EQ(k.rfind("class,grid,value\n", 0), 0u);
  EXPECT_EQ(h.rfind("class,bin_left,bin_right,density\n", 0), 0u);
  EXPECT_EQ(std::count(k.begin(), k.end(), '\n'), 17);
  EXPECT_EQ(std::count(h.begin(), h.end(), '\n'), 5);
}

}  // namespace
}  // namespace counterbot
