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
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "counterbot/dataset.hpp"
#include "counterbot/gbdt.hpp"

namespace counterbot::testing {

std::filesystem::path test_data(const std::string& name);

/// Undoes the golden-file escapes: \n, \t, \r and \\.
std::string unescape(const std::string& s);

/// Tab-separated rows; a trailing empty field is kept.
std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path);

/// Registry of anonymous columns f0..f{dim-1}.
std::shared_ptr<const FeatureRegistry> plain_registry(std::size_t dim);

/// Uniform [0, 1) features; roughly `minority_fraction` of rows carry label
/// 1, with at least two rows per class.
Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t dim, double minority_fraction);

/// Default 22-column registry where only TOXICITY depends on the label.
Dataset toxicity_signal_dataset(std::size_t n, double positive_fraction, std::uint64_t seed);

// Oracles -------------------------------------------------------------------

/// k nearest among `candidates` by full sort of (squared distance, index).
std::vector<std::size_t> brute_knn(const Dataset& d, std::size_t query, const std::vector<std::size_t>& candidates,
                                   std::size_t k, std::size_t exclude);

/// True when x = a + t (b - a) for some t in [0, 1], within tol per coordinate.
bool on_segment(std::span<const double> x, std::span<const double> a, std::span<const double> b, double tol);

struct OracleSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Tries every midpoint of every feature, re-summing gradients from scratch
/// for each candidate.
OracleSplit exhaustive_split(const Dataset& d, const std::vector<double>& grad, const std::vector<double>& hess,
                             double lambda, int min_samples_leaf);

/// Gain of one split, summed directly.
double split_gain(const Dataset& d, const std::vector<double>& grad, const std::vector<double>& hess, int feature,
                  double threshold, double lambda);

/// Pair-counting AUC.
double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace counterbot::testing
