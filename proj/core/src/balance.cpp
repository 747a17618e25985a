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

#include "counterbot/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "counterbot/error.hpp"

namespace counterbot {

std::size_t AdasynPlan::synthetic_count() const { return std::accumulate(g.begin(), g.end(), std::size_t{0}); }

std::vector<std::size_t> nearest_neighbors(const Dataset& data, std::size_t query,
                                           std::span<const std::size_t> candidates, std::size_t k,
                                           std::size_t exclude) {
  const auto q = data.row(query);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(candidates.size());
  for (std::size_t c : candidates) {
    if (c == exclude) continue;
    const auto r = data.row(c);
    double d = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double diff = q[j] - r[j];
      d += diff * diff;
    }
    dist.emplace_back(d, c);
  }
  k = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

AdasynPlan plan_adasyn(const Dataset& data, const BalancerConfig& config) {
  if (config.k < 1) throw Error(ErrorCode::kInvalidArgument, "ADASYN k must be at least 1");
  if (!(config.beta >= 0.0 && config.beta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("ADASYN beta {} is outside [0, 1]", config.beta));
  }
  const std::size_t pos = data.positives();
  const std::size_t neg = data.rows() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorCode::kSingleClass, "ADASYN needs both classes");

  AdasynPlan plan;
  plan.minority_label = pos <= neg ? 1 : 0;
  plan.majority_count = std::max(pos, neg);
  std::vector<std::size_t> all(data.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (data.label(i) == plan.minority_label) plan.minority.push_back(i);
  }
  const std::size_t m_s = plan.minority.size();
  plan.G = static_cast<double>(plan.majority_count - m_s) * config.beta;
  if (plan.G == 0.0) {
    plan.g.assign(m_s, 0);
    return plan;
  }

  const auto k = static_cast<std::size_t>(config.k);
  plan.neighbors.reserve(m_s);
  plan.minority_neighbors.reserve(m_s);
  plan.delta.reserve(m_s);
  std::vector<double> r(m_s, 0.0);
  double r_sum = 0.0;
  for (std::size_t a = 0; a < m_s; ++a) {
    const std::size_t i = plan.minority[a];
    auto nn = nearest_neighbors(data, i, all, k, i);
    std::size_t delta = 0;
    for (std::size_t n : nn) delta += data.label(n) != plan.minority_label ? 1 : 0;
    r[a] = nn.empty() ? 0.0 : static_cast<double>(delta) / static_cast<double>(nn.size());
    r_sum += r[a];
    plan.delta.push_back(delta);
    plan.neighbors.push_back(std::move(nn));
    plan.minority_neighbors.push_back(nearest_neighbors(data, i, plan.minority, k, i));
  }

  plan.r_hat.resize(m_s);
  if (r_sum == 0.0) {
    plan.uniform_fallback = true;
    std::fill(plan.r_hat.begin(), plan.r_hat.end(), 1.0 / static_cast<double>(m_s));
  } else {
    for (std::size_t a = 0; a < m_s; ++a) plan.r_hat[a] = r[a] / r_sum;
  }
  plan.g.resize(m_s);
  for (std::size_t a = 0; a < m_s; ++a) plan.g[a] = static_cast<std::size_t>(std::lround(plan.r_hat[a] * plan.G));
  return plan;
}

AdasynResult adasyn(const Dataset& data, const BalancerConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return adasyn(data, config, [&] { return unit(rng); });
}

AdasynResult adasyn(const Dataset& data, const BalancerConfig& config, const LambdaSource& lambda) {
  AdasynResult result{data, {}, plan_adasyn(data, config)};
  const AdasynPlan& plan = result.plan;
  const std::size_t total = plan.synthetic_count();
  if (total == 0) return result;

  // The partner choice shares the configured seed but not the lambda stream,
  // so a forced lambda does not perturb partner selection.
  std::mt19937_64 pick(config.seed ^ 0x9e3779b97f4a7c15ULL);
  result.data.reserve(data.rows() + total);
  result.origins.reserve(total);
  std::vector<double> buf(data.cols());
  for (std::size_t a = 0; a < plan.minority.size(); ++a) {
    const std::size_t seed = plan.minority[a];
    const auto& partners = plan.minority_neighbors[a];
    for (std::size_t s = 0; s < plan.g[a]; ++s) {
      std::size_t partner = seed;
      if (!partners.empty()) {
        std::uniform_int_distribution<std::size_t> choose(0, partners.size() - 1);
        partner = partners[choose(pick)];
      }
      const double lam = lambda();
      const auto x = data.row(seed);
      const auto z = data.row(partner);
      for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = x[j] + lam * (z[j] - x[j]);
      result.data.add(buf, plan.minority_label);
      result.origins.push_back({seed, partner, lam});
    }
  }
  return result;
}

}  // namespace counterbot
