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
#include <span>
#include <vector>

#include "counterbot/dataset.hpp"

namespace counterbot {

struct BalancerConfig {
  int k = 5;
  double beta = 1.0;
  std::uint64_t seed = 0;
};

/// Indices of the `k` points nearest to `query` (Euclidean) among
/// `candidates`, skipping `exclude`. Ties go to the lower index.
std::vector<std::size_t> nearest_neighbors(const Dataset& data, std::size_t query,
                                           std::span<const std::size_t> candidates, std::size_t k,
                                           std::size_t exclude);

/// Everything ADASYN decides before drawing random numbers.
struct AdasynPlan {
  int minority_label = 1;
  std::vector<std::size_t> minority;  // row indices of the minority class
  std::size_t majority_count = 0;
  double G = 0.0;
  /// Per minority point, aligned with `minority`:
  std::vector<std::vector<std::size_t>> neighbors;           // K-NN over all points
  std::vector<std::vector<std::size_t>> minority_neighbors;  // K-NN over minority points
  std::vector<std::size_t> delta;                            // majority members among `neighbors`
  std::vector<double> r_hat;
  std::vector<std::size_t> g;
  /// Set when no minority point has a majority neighbour.
  bool uniform_fallback = false;

  std::size_t synthetic_count() const;
};

/// Throws Error(kSingleClass) for single-class input and
/// Error(kInvalidArgument) for k < 1 or beta outside [0, 1].
AdasynPlan plan_adasyn(const Dataset& data, const BalancerConfig& config);

/// Where a synthetic row came from: x_seed + lambda * (x_partner - x_seed).
/// partner == seed when the minority class has a single member.
struct SyntheticOrigin {
  std::size_t seed = 0;
  std::size_t partner = 0;
  double lambda = 0.0;
};

struct AdasynResult {
  Dataset data;  // originals first, then synthetics in seed order
  std::vector<SyntheticOrigin> origins;
  AdasynPlan plan;
};

/// Draws lambda in [0, 1); the default uses the configured seed.
using LambdaSource = std::function<double()>;

AdasynResult adasyn(const Dataset& data, const BalancerConfig& config);
AdasynResult adasyn(const Dataset& data, const BalancerConfig& config, const LambdaSource& lambda);

}  // namespace counterbot
