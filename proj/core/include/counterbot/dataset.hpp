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
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "counterbot/registry.hpp"

namespace counterbot {

/// Dense binary-labelled feature matrix (row-major). Label 1 is hateful.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::shared_ptr<const FeatureRegistry> registry);

  const std::shared_ptr<const FeatureRegistry>& registry() const { return registry_; }
  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return cols_; }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }

  /// Throws Error(kDimensionMismatch) when the row has the wrong width and
  /// Error(kInvalidArgument) when the label is not 0 or 1.
  void add(std::span<const double> row, int label);
  void add(const FeatureVector& fv, int label);
  void reserve(std::size_t rows);

  std::size_t positives() const;
  std::size_t negatives() const { return rows() - positives(); }

  Dataset select_rows(std::span<const std::size_t> indices) const;
  /// Column subset; the result carries a registry of the chosen names.
  Dataset select_columns(std::span<const std::size_t> columns) const;

  /// Throws Error(kNanFeature) naming the first row holding a non-finite value.
  void require_finite() const;
  /// Throws Error(kSingleClass) unless both labels are present.
  void require_both_classes() const;

 private:
  std::shared_ptr<const FeatureRegistry> registry_;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<int> labels_;
};

/// Feature CSV: one column per registry name followed by "label"
/// (hateful/not_hateful or 1/0). An optional leading "id" column is ignored.
Dataset read_feature_csv(std::istream& in);
Dataset load_feature_csv(const std::filesystem::path& path);
void write_feature_csv(std::ostream& out, const Dataset& data, const std::vector<std::string>& ids = {});

}  // namespace counterbot
