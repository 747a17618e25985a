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

#include "counterbot/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "counterbot/error.hpp"

namespace counterbot {

using nlohmann::json;

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::kDimensionMismatch, "score/label length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    // Ranks i+1 .. j share their average.
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[idx[t]] == 1) {
        pos_rank_sum += avg_rank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorCode::kSingleClass, "AUC needs both classes");
  const double p = static_cast<double>(pos);
  const double u = pos_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::kEmptyClass,
                  fmt::format("class {} has {} members, fewer than k = {}", c, by_class[c].size(), k));
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<int> folds(labels.size(), -1);
  std::size_t deal = 0;
  for (int c = 0; c < 2; ++c) {
    std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
    for (std::size_t i : by_class[c]) folds[i] = static_cast<int>(deal++ % static_cast<std::size_t>(k));
  }
  return folds;
}

FoldScorer gbdt_scorer(TrainParams params) {
  return [params](const Dataset& train, const Dataset& test, std::uint64_t) {
    return train_gbdt(train, params).predict_all(test);
  };
}

FoldScorer random_baseline_scorer() {
  return [](const Dataset& train, const Dataset& test, std::uint64_t seed) {
    const double prior = static_cast<double>(train.positives()) / static_cast<double>(train.rows());
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution draw(prior);
    std::vector<double> out(test.rows());
    for (double& v : out) v = draw(rng) ? 1.0 : 0.0;
    return out;
  };
}

double CVReport::mean() const {
  if (fold_auc.empty()) return 0.0;
  return std::accumulate(fold_auc.begin(), fold_auc.end(), 0.0) / static_cast<double>(fold_auc.size());
}

double CVReport::stddev() const {
  if (fold_auc.size() < 2) return 0.0;
  const double m = mean();
  double ss = 0.0;
  for (double a : fold_auc) ss += (a - m) * (a - m);
  return std::sqrt(ss / static_cast<double>(fold_auc.size() - 1));
}

json CVReport::to_json() const {
  return {{"model", model_id}, {"feature_set", feature_set}, {"k", fold_auc.size()},
          {"fold_auc", fold_auc}, {"mean_auc", mean()}, {"std_auc", stddev()}};
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

CVReport cv_with_folds(const Dataset& data, std::span<const int> folds, int k, const FoldScorer& scorer,
                       const CVOptions& options, std::string model_id, std::string feature_set) {
  if (folds.size() != data.rows()) throw Error(ErrorCode::kDimensionMismatch, "fold assignment length mismatch");
  CVReport report{std::move(model_id), std::move(feature_set), std::vector<double>(static_cast<std::size_t>(k))};
  parallel_for(static_cast<std::size_t>(k), options.threads, [&](std::size_t f) {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      (folds[i] == static_cast<int>(f) ? test_idx : train_idx).push_back(i);
    }
    Dataset train = data.select_rows(train_idx);
    const Dataset test = data.select_rows(test_idx);
    const std::uint64_t fold_seed = options.seed + f;
    if (options.balance) {
      BalancerConfig cfg = *options.balance;
      cfg.seed = cfg.seed + fold_seed;
      train = adasyn(train, cfg).data;
    }
    const auto scores = scorer(train, test, fold_seed);
    report.fold_auc[f] = auc(scores, test.labels());
  });
  return report;
}

CVReport kfold_cv(const Dataset& data, const FoldScorer& scorer, const CVOptions& options, std::string model_id,
                  std::string feature_set) {
  const auto folds = stratified_folds(data.labels(), options.k, options.seed);
  return cv_with_folds(data, folds, options.k, scorer, options, std::move(model_id), std::move(feature_set));
}

std::vector<FeatureGroup> default_feature_groups(const FeatureRegistry& registry) {
  std::vector<FeatureGroup> groups;
  std::vector<std::size_t> all(registry.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  groups.push_back({"all", all});
  for (FeatureFamily f : {FeatureFamily::kToxicity, FeatureFamily::kSentiment, FeatureFamily::kHate}) {
    auto cols = registry.columns(f);
    if (!cols.empty()) groups.push_back({std::string(to_string(f)), std::move(cols)});
  }
  return groups;
}

std::vector<CVReport> ablation(const Dataset& data, const std::vector<FeatureGroup>& groups, const TrainParams& params,
                               const CVOptions& options) {
  for (const auto& g : groups) {
    if (g.columns.empty()) throw Error(ErrorCode::kInvalidArgument, fmt::format("feature group '{}' is empty", g.name));
    for (std::size_t c : g.columns) {
      if (c >= data.cols()) {
        throw Error(ErrorCode::kOutOfRange, fmt::format("feature group '{}' names column {} of {}", g.name, c, data.cols()));
      }
    }
  }
  const auto folds = stratified_folds(data.labels(), options.k, options.seed);
  std::vector<CVReport> out;
  const auto scorer = gbdt_scorer(params);
  for (const auto& g : groups) {
    out.push_back(cv_with_folds(data.select_columns(g.columns), folds, options.k, scorer, options, "gbdt", g.name));
  }
  out.push_back(cv_with_folds(data, folds, options.k, random_baseline_scorer(), options, "stratified_random", "random"));
  return out;
}

std::vector<TrainParams> default_sweep_grid(const TrainParams& base) {
  std::vector<TrainParams> grid;
  for (int trees : {50, 100, 200}) {
    for (double lr : {0.05, 0.1, 0.3}) {
      for (int leaves : {7, 15, 31}) {
        TrainParams p = base;
        p.num_trees = trees;
        p.learning_rate = lr;
        p.max_leaves = leaves;
        grid.push_back(p);
      }
    }
  }
  return grid;
}

std::vector<SweepEntry> sweep(const Dataset& data, const std::vector<TrainParams>& grid, const CVOptions& options) {
  const auto folds = stratified_folds(data.labels(), options.k, options.seed);
  std::vector<SweepEntry> out;
  for (const auto& p : grid) {
    p.validate();
    auto id = fmt::format("gbdt(trees={},lr={},leaves={})", p.num_trees, p.learning_rate, p.max_leaves);
    out.push_back({p, cv_with_folds(data, folds, options.k, gbdt_scorer(p), options, std::move(id), "all")});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SweepEntry& a, const SweepEntry& b) { return a.report.mean() > b.report.mean(); });
  return out;
}

// ---------------------------------------------------------------------------
// KDE
// ---------------------------------------------------------------------------

double scott_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "Scott's rule needs at least two scores; pass a bandwidth");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scores have zero variance; pass a bandwidth");
  return std::pow(static_cast<double>(n), -0.2) * sd;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kDimensionMismatch, "trapezoid x/y length mismatch");
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

KDECurves kde_report(const std::vector<std::pair<std::string, std::vector<double>>>& classes,
                     std::optional<double> bandwidth, std::size_t grid_points, std::size_t bins) {
  if (grid_points < 2) throw Error(ErrorCode::kInvalidArgument, "KDE grid needs at least two points");
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "histogram needs at least one bin");
  if (bandwidth && !(*bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  if (classes.empty()) throw Error(ErrorCode::kInvalidArgument, "KDE needs at least one class");

  KDECurves out;
  out.grid.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) out.grid[i] = static_cast<double>(i) / static_cast<double>(grid_points - 1);
  out.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) out.bin_edges[b] = static_cast<double>(b) / static_cast<double>(bins);

  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (const auto& [name, scores] : classes) {
    if (scores.empty()) throw Error(ErrorCode::kEmptyClass, fmt::format("class '{}' has no scores", name));
    for (double s : scores) {
      if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::kOutOfRange, fmt::format("class '{}' score {} is outside [0, 1]", name, s));
    }
    ClassDensity cd;
    cd.name = name;
    cd.count = scores.size();
    cd.bandwidth = bandwidth ? *bandwidth : scott_bandwidth(scores);
    const double h = cd.bandwidth;
    const double norm = inv_sqrt_2pi / (static_cast<double>(scores.size()) * h);
    cd.density.assign(grid_points, 0.0);
    for (std::size_t i = 0; i < grid_points; ++i) {
      double sum = 0.0;
      for (double s : scores) {
        const double u = (out.grid[i] - s) / h;
        sum += std::exp(-0.5 * u * u);
      }
      cd.density[i] = sum * norm;
    }
    const double mass = trapezoid(out.grid, cd.density);
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("class '{}': bandwidth {} is too small for the grid", name, h));
    }
    for (double& v : cd.density) v /= mass;

    cd.histogram.assign(bins, 0.0);
    for (double s : scores) {
      auto b = static_cast<std::size_t>(s * static_cast<double>(bins));
      cd.histogram[std::min(b, bins - 1)] += 1.0;
    }
    const double width = 1.0 / static_cast<double>(bins);
    for (double& c : cd.histogram) c /= static_cast<double>(scores.size()) * width;
    out.classes.push_back(std::move(cd));
  }
  return out;
}

void write_kde_csv(std::ostream& out, const KDECurves& curves) {
  out << "class,grid,value\n";
  for (const auto& c : curves.classes) {
    for (std::size_t i = 0; i < curves.grid.size(); ++i) out << fmt::format("{},{},{}\n", c.name, curves.grid[i], c.density[i]);
  }
}

void write_histogram_csv(std::ostream& out, const KDECurves& curves) {
  out << "class,bin_left,bin_right,density\n";
  for (const auto& c : curves.classes) {
    for (std::size_t b = 0; b < c.histogram.size(); ++b) {
      out << fmt::format("{},{},{},{}\n", c.name, curves.bin_edges[b], curves.bin_edges[b + 1], c.histogram[b]);
    }
  }
}

json kde_summary(const KDECurves& curves) {
  json classes = json::array();
  for (const auto& c : curves.classes) {
    const auto peak = std::max_element(c.density.begin(), c.density.end()) - c.density.begin();
    classes.push_back({{"class", c.name},
                       {"count", c.count},
                       {"bandwidth", c.bandwidth},
                       {"integral", trapezoid(curves.grid, c.density)},
                       {"mode", curves.grid[static_cast<std::size_t>(peak)]}});
  }
  return {{"grid_points", curves.grid.size()}, {"bins", curves.bin_edges.size() - 1}, {"classes", classes}};
}

}  // namespace counterbot
