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

#include "counterbot/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "counterbot/error.hpp"

namespace counterbot {

using nlohmann::json;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_loss(std::span<const double> raw, std::span<const int> labels) {
  if (raw.size() != labels.size()) throw Error(ErrorCode::kDimensionMismatch, "score/label length mismatch");
  if (raw.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    // log(1 + exp(z)) - y z, computed without overflow.
    const double z = raw[i];
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    sum += softplus - (labels[i] == 1 ? z : 0.0);
  }
  return sum / static_cast<double>(raw.size());
}

bool threshold_decide(double toxicity, double theta) {
  if (!(toxicity >= 0.0 && toxicity <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, fmt::format("toxicity {} is outside [0, 1]", toxicity));
  }
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::kOutOfRange, fmt::format("theta {} is outside [0, 1]", theta));
  return toxicity >= theta;
}

void TrainParams::validate() const {
  if (num_trees < 0) throw Error(ErrorCode::kInvalidArgument, "num_trees must be non-negative");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  if (max_leaves < 1) throw Error(ErrorCode::kInvalidArgument, "max_leaves must be at least 1");
  if (min_samples_leaf < 1) throw Error(ErrorCode::kInvalidArgument, "min_samples_leaf must be at least 1");
  if (!(l2_lambda >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "l2_lambda must be non-negative");
  if (!(min_gain >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "min_gain must be non-negative");
}

// ---------------------------------------------------------------------------
// Tree / Ensemble
// ---------------------------------------------------------------------------

double Tree::predict(std::span<const double> x) const {
  if (nodes.empty()) return 0.0;
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].weight;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

Ensemble::Ensemble(std::shared_ptr<const FeatureRegistry> registry, double base_score, double learning_rate,
                   std::vector<Tree> trees)
    : registry_(std::move(registry)), base_score_(base_score), learning_rate_(learning_rate), trees_(std::move(trees)) {}

double Ensemble::raw_score(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(x);
  return base_score_ + learning_rate_ * sum;
}

double Ensemble::predict(std::span<const double> x) const {
  if (registry_ && x.size() != registry_->size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("feature vector has {} values, model expects {}", x.size(), registry_->size()));
  }
  return sigmoid(raw_score(x));
}

double Ensemble::predict(const FeatureVector& fv) const {
  if (fv.registry && registry_ && !(*fv.registry == *registry_)) {
    throw Error(ErrorCode::kDimensionMismatch, "feature vector registry differs from the model registry");
  }
  return predict(std::span<const double>(fv.values));
}

std::vector<double> Ensemble::predict_all(const Dataset& data) const {
  std::vector<double> out(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = predict(data.row(i));
  return out;
}

json Ensemble::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) {
        nodes.push_back({{"leaf", n.weight}});
      } else {
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"registry", registry_ ? registry_->names() : std::vector<std::string>{}},
          {"base_score", base_score_},
          {"learning_rate", learning_rate_},
          {"trees", std::move(trees)}};
}

Ensemble Ensemble::from_json(const json& j) {
  try {
    auto registry = std::make_shared<const FeatureRegistry>(j.at("registry").get<std::vector<std::string>>());
    std::vector<Tree> trees;
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& jn : jt.at("nodes")) {
        TreeNode n;
        if (jn.contains("leaf")) {
          n.weight = jn.at("leaf").get<double>();
        } else {
          n.feature = jn.at("feature").get<int>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
        }
        t.nodes.push_back(n);
      }
      const int count = static_cast<int>(t.nodes.size());
      for (const auto& n : t.nodes) {
        if (n.is_leaf()) continue;
        if (n.feature >= static_cast<int>(registry->size()) || n.left <= 0 || n.right <= 0 || n.left >= count ||
            n.right >= count) {
          throw Error(ErrorCode::kParse, "model tree references an invalid node or feature");
        }
      }
      if (t.nodes.empty()) throw Error(ErrorCode::kParse, "model tree has no nodes");
      trees.push_back(std::move(t));
    }
    return Ensemble(std::move(registry), j.at("base_score").get<double>(), j.at("learning_rate").get<double>(),
                    std::move(trees));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad model file: {}", e.what()));
  }
}

void Ensemble::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << to_json().dump(2) << '\n';
}

Ensemble Ensemble::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, fmt::format("'{}' is not valid JSON", path.string()));
  return from_json(j);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

double leaf_score(double g, double h, double lambda) { return g * g / (h + lambda); }

/// Scans rows in ascending feature order. `value(k)` and `row(k)` index the
/// k-th row of the ordering. Updates `best` when a strictly better split for
/// `feature` exists.
template <typename ValueAt, typename RowAt>
void scan_feature(int feature, std::size_t count, ValueAt value, RowAt row, std::span<const double> grad,
                  std::span<const double> hess, double g_total, double h_total, const TrainParams& params,
                  SplitChoice& best) {
  const auto min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
  if (count < 2 * min_leaf) return;
  const double lambda = params.l2_lambda;
  const double parent = leaf_score(g_total, h_total, lambda);
  double gl = 0.0;
  double hl = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const std::size_t r = row(k);
    gl += grad[r];
    hl += hess[r];
    const std::size_t n_left = k + 1;
    if (n_left < min_leaf) continue;
    if (count - n_left < min_leaf) break;
    const double a = value(k);
    const double b = value(k + 1);
    if (!(a < b)) continue;
    const double gain =
        0.5 * (leaf_score(gl, hl, lambda) + leaf_score(g_total - gl, h_total - hl, lambda) - parent);
    if (gain > params.min_gain && gain > best.gain) {
      double t = a + 0.5 * (b - a);
      if (!(t < b)) t = a;
      best = {feature, t, gain};
    }
  }
}

}  // namespace

SplitChoice find_best_split(const Dataset& data, std::span<const double> grad, std::span<const double> hess,
                            std::span<const std::size_t> rows, const TrainParams& params) {
  double g_total = 0.0;
  double h_total = 0.0;
  for (std::size_t r : rows) {
    g_total += grad[r];
    h_total += hess[r];
  }
  SplitChoice best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f = 0; f < data.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = data.at(a, f);
      const double vb = data.at(b, f);
      return va < vb || (va == vb && a < b);
    });
    scan_feature(
        static_cast<int>(f), order.size(), [&](std::size_t k) { return data.at(order[k], f); },
        [&](std::size_t k) { return order[k]; }, grad, hess, g_total, h_total, params, best);
  }
  return best;
}

namespace {

/// Exact greedy tree builder over per-feature presorted row lists. Each leaf
/// owns the same [begin, end) segment of every feature's list; splitting a
/// leaf stable-partitions that segment in each list.
class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TrainParams& params)
      : data_(data), params_(params), n_(data.rows()), f_(data.cols()), presorted_(f_ * n_) {
    std::vector<std::size_t> idx(n_);
    for (std::size_t f = 0; f < f_; ++f) {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return data.at(a, f) < data.at(b, f); });
      std::copy(idx.begin(), idx.end(), presorted_.begin() + static_cast<std::ptrdiff_t>(f * n_));
    }
    order_.resize(presorted_.size());
    go_left_.resize(n_);
    scratch_.resize(n_);
  }

  /// Builds one tree and adds learning_rate * leaf weight to `raw`.
  Tree build(std::span<const double> grad, std::span<const double> hess, std::span<double> raw) {
    std::copy(presorted_.begin(), presorted_.end(), order_.begin());
    Tree tree;
    leaves_.clear();
    tree.nodes.push_back({});
    leaves_.push_back(make_leaf(0, 0, n_, grad, hess));

    std::size_t leaf_total = 1;
    while (leaf_total < static_cast<std::size_t>(params_.max_leaves)) {
      // Highest-gain open leaf; ties go to the earliest created.
      std::size_t pick = leaves_.size();
      for (std::size_t l = 0; l < leaves_.size(); ++l) {
        if (!leaves_[l].split.valid()) continue;
        if (pick == leaves_.size() || leaves_[l].split.gain > leaves_[pick].split.gain) pick = l;
      }
      if (pick == leaves_.size()) break;
      const Leaf parent = leaves_[pick];
      const std::size_t n_left = partition(parent);
      const int left_id = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      TreeNode& node = tree.nodes[parent.node];
      node.feature = parent.split.feature;
      node.threshold = parent.split.threshold;
      node.left = left_id;
      node.right = left_id + 1;
      leaves_[pick] = make_leaf(static_cast<std::size_t>(left_id), parent.begin, parent.begin + n_left, grad, hess);
      leaves_.push_back(make_leaf(static_cast<std::size_t>(left_id + 1), parent.begin + n_left, parent.end, grad, hess));
      ++leaf_total;
    }

    for (const Leaf& leaf : leaves_) {
      const double w = -leaf.g / (leaf.h + params_.l2_lambda);
      tree.nodes[leaf.node].weight = w;
      const std::size_t* seg = order_.data();
      for (std::size_t k = leaf.begin; k < leaf.end; ++k) raw[seg[k]] += params_.learning_rate * w;
    }
    return tree;
  }

 private:
  struct Leaf {
    std::size_t node = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    double g = 0.0;
    double h = 0.0;
    SplitChoice split;
  };

  Leaf make_leaf(std::size_t node, std::size_t begin, std::size_t end, std::span<const double> grad,
                 std::span<const double> hess) {
    Leaf leaf{node, begin, end, 0.0, 0.0, {}};
    const std::size_t* seg0 = order_.data();
    // Summed in row-index order so totals do not depend on the feature lists.
    std::vector<std::size_t>& rows = leaf_rows_;
    rows.assign(seg0 + begin, seg0 + end);
    std::sort(rows.begin(), rows.end());
    for (std::size_t r : rows) {
      leaf.g += grad[r];
      leaf.h += hess[r];
    }
    for (std::size_t f = 0; f < f_; ++f) {
      const std::size_t* seg = order_.data() + f * n_ + begin;
      scan_feature(
          static_cast<int>(f), end - begin, [&](std::size_t k) { return data_.at(seg[k], f); },
          [&](std::size_t k) { return seg[k]; }, grad, hess, leaf.g, leaf.h, params_, leaf.split);
    }
    return leaf;
  }

  std::size_t partition(const Leaf& leaf) {
    const auto f_split = static_cast<std::size_t>(leaf.split.feature);
    std::size_t n_left = 0;
    for (std::size_t k = leaf.begin; k < leaf.end; ++k) {
      const std::size_t r = order_[k];
      const bool left = data_.at(r, f_split) <= leaf.split.threshold;
      go_left_[r] = left;
      n_left += left ? 1 : 0;
    }
    for (std::size_t f = 0; f < f_; ++f) {
      std::size_t* seg = order_.data() + f * n_;
      std::size_t li = leaf.begin;
      std::size_t ri = 0;
      for (std::size_t k = leaf.begin; k < leaf.end; ++k) {
        const std::size_t r = seg[k];
        if (go_left_[r]) {
          seg[li++] = r;
        } else {
          scratch_[ri++] = r;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(ri), seg + li);
    }
    return n_left;
  }

  const Dataset& data_;
  const TrainParams& params_;
  std::size_t n_;
  std::size_t f_;
  std::vector<std::size_t> presorted_;
  std::vector<std::size_t> order_;
  std::vector<char> go_left_;
  std::vector<std::size_t> scratch_;
  std::vector<std::size_t> leaf_rows_;
  std::vector<Leaf> leaves_;
};

}  // namespace

Ensemble train_gbdt(const Dataset& data, const TrainParams& params, TrainTrace* trace) {
  params.validate();
  if (data.empty()) throw Error(ErrorCode::kSingleClass, "training data is empty");
  data.require_both_classes();
  data.require_finite();

  const std::size_t n = data.rows();
  const double prior = static_cast<double>(data.positives()) / static_cast<double>(n);
  const double base = std::log(prior / (1.0 - prior));
  Ensemble model(data.registry(), base, params.learning_rate);

  std::vector<double> raw(n, base);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  if (trace) {
    trace->loss.clear();
    trace->loss.push_back(logistic_loss(raw, data.labels()));
  }
  if (params.num_trees == 0) return model;

  TreeBuilder builder(data, params);
  for (int t = 0; t < params.num_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(raw[i]);
      grad[i] = p - static_cast<double>(data.label(i));
      hess[i] = p * (1.0 - p);
    }
    model.add_tree(builder.build(grad, hess, raw));
    if (trace) trace->loss.push_back(logistic_loss(raw, data.labels()));
  }
  return model;
}

}  // namespace counterbot
