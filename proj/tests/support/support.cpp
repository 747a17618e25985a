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

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "counterbot/registry.hpp"

#ifndef COUNTERBOT_TEST_DATA_DIR
#error "COUNTERBOT_TEST_DATA_DIR must be defined"
#endif

namespace counterbot::testing {

std::filesystem::path test_data(const std::string& name) { return std::filesystem::path(COUNTERBOT_TEST_DATA_DIR) / name; }

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    const char n = s[++i];
    out.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n == 'r' ? '\r' : n);
  }
  return out;
}

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::shared_ptr<const FeatureRegistry> plain_registry(std::size_t dim) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < dim; ++j) names.push_back("f" + std::to_string(j));
  return std::make_shared<const FeatureRegistry>(std::move(names));
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t dim, double minority_fraction) {
  Dataset d(plain_registry(dim));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> labels(n);
  for (auto& l : labels) l = u(rng) < minority_fraction ? 1 : 0;
  labels[0] = 1;
  labels[1] = 1;
  labels[2] = 0;
  labels[3] = 0;
  std::vector<double> row(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : row) v = u(rng);
    d.add(row, labels[i]);
  }
  return d;
}

Dataset toxicity_signal_dataset(std::size_t n, double positive_fraction, std::uint64_t seed) {
  auto reg = std::make_shared<const FeatureRegistry>(FeatureRegistry::default_registry());
  const std::size_t tox = *reg->index_of("TOXICITY");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> pos(0.7, 0.15), neg(0.3, 0.15);
  Dataset d(reg);
  std::vector<double> row(reg->size());
  for (std::size_t i = 0; i < n; ++i) {
    const int label = u(rng) < positive_fraction ? 1 : 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double lo = reg->lower_bound(j);
      row[j] = lo + (1.0 - lo) * u(rng);
    }
    row[tox] = std::clamp(label ? pos(rng) : neg(rng), 0.0, 1.0);
    d.add(row, label);
  }
  return d;
}

std::vector<std::size_t> brute_knn(const Dataset& d, std::size_t query, const std::vector<std::size_t>& candidates,
                                   std::size_t k, std::size_t exclude) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t c : candidates) {
    if (c == exclude) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < d.cols(); ++j) s += (d.at(c, j) - d.at(query, j)) * (d.at(c, j) - d.at(query, j));
    all.emplace_back(s, c);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

bool on_segment(std::span<const double> x, std::span<const double> a, std::span<const double> b, double tol) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    num += (x[j] - a[j]) * (b[j] - a[j]);
    den += (b[j] - a[j]) * (b[j] - a[j]);
  }
  const double t = den == 0.0 ? 0.0 : num / den;
  if (t < -tol || t > 1.0 + tol) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (std::abs(a[j] + t * (b[j] - a[j]) - x[j]) > tol) return false;
  }
  return true;
}

double split_gain(const Dataset& d, const std::vector<double>& grad, const std::vector<double>& hess, int feature,
                  double threshold, double lambda) {
  double gl = 0, hl = 0, gr = 0, hr = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (d.at(i, static_cast<std::size_t>(feature)) <= threshold) {
      gl += grad[i];
      hl += hess[i];
    } else {
      gr += grad[i];
      hr += hess[i];
    }
  }
  const double g = gl + gr, h = hl + hr;
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda));
}

OracleSplit exhaustive_split(const Dataset& d, const std::vector<double>& grad, const std::vector<double>& hess,
                             double lambda, int min_samples_leaf) {
  OracleSplit best;
  for (std::size_t j = 0; j < d.cols(); ++j) {
    std::set<double> distinct;
    for (std::size_t i = 0; i < d.rows(); ++i) distinct.insert(d.at(i, j));
    std::vector<double> v(distinct.begin(), distinct.end());
    for (std::size_t t = 0; t + 1 < v.size(); ++t) {
      const double thr = v[t] + (v[t + 1] - v[t]) / 2.0;
      std::size_t left = 0;
      for (std::size_t i = 0; i < d.rows(); ++i) left += d.at(i, j) <= thr ? 1 : 0;
      if (left < static_cast<std::size_t>(min_samples_leaf) ||
          d.rows() - left < static_cast<std::size_t>(min_samples_leaf)) {
        continue;
      }
      const double gain = split_gain(d, grad, hess, static_cast<int>(j), thr, lambda);
      if (gain > best.gain) best = {static_cast<int>(j), thr, gain};
    }
  }
  return best;
}

double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      wins += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

}  // namespace counterbot::testing
