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

#include "counterbot/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "counterbot/csv.hpp"
#include "counterbot/error.hpp"

namespace counterbot {

Dataset::Dataset(std::shared_ptr<const FeatureRegistry> registry) : registry_(std::move(registry)) {
  if (!registry_) throw Error(ErrorCode::kInvalidArgument, "dataset needs a registry");
  cols_ = registry_->size();
}

void Dataset::add(std::span<const double> row, int label) {
  if (row.size() != cols_) {
    throw Error(ErrorCode::kDimensionMismatch, fmt::format("row has {} values, registry has {}", row.size(), cols_));
  }
  if (label != 0 && label != 1) throw Error(ErrorCode::kInvalidArgument, fmt::format("label {} is not 0 or 1", label));
  values_.insert(values_.end(), row.begin(), row.end());
  labels_.push_back(label);
}

void Dataset::add(const FeatureVector& fv, int label) {
  if (fv.registry && registry_ && !(*fv.registry == *registry_)) {
    throw Error(ErrorCode::kDimensionMismatch, "feature vector registry differs from dataset registry");
  }
  add(std::span<const double>(fv.values), label);
}

void Dataset::reserve(std::size_t rows) {
  values_.reserve(rows * cols_);
  labels_.reserve(rows);
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), 1));
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
  Dataset out(registry_);
  out.reserve(indices.size());
  for (std::size_t i : indices) out.add(row(i), labels_.at(i));
  return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> columns) const {
  if (columns.empty()) throw Error(ErrorCode::kInvalidArgument, "column selection is empty");
  std::vector<std::string> names;
  for (std::size_t c : columns) names.push_back(registry_->name(c));
  Dataset out(std::make_shared<const FeatureRegistry>(std::move(names)));
  out.reserve(rows());
  std::vector<double> buf(columns.size());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) buf[k] = at(i, columns[k]);
    out.add(buf, labels_[i]);
  }
  return out;
}

void Dataset::require_finite() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kNanFeature, fmt::format("row {} column '{}' is not finite", i / cols_,
                                                      registry_->name(i % cols_)));
    }
  }
}

void Dataset::require_both_classes() const {
  const std::size_t pos = positives();
  if (pos == 0 || pos == rows()) throw Error(ErrorCode::kSingleClass, "training data must contain both classes");
}

namespace {

int parse_label_token(const std::string& token, std::size_t line) {
  if (token == "1" || token == "hateful") return 1;
  if (token == "0" || token == "not_hateful") return 0;
  throw Error(ErrorCode::kUnknownLabel, fmt::format("line {}: unknown label '{}'", line, token));
}

double parse_double(const std::string& s, std::size_t line, const std::string& column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    if (s == "nan" || s == "NaN") return std::nan("");
    throw Error(ErrorCode::kParse, fmt::format("line {}: column '{}' value '{}' is not a number", line, column, s));
  }
  return v;
}

}  // namespace

Dataset read_feature_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header_row = reader.next();
  if (!header_row) throw Error(ErrorCode::kParse, "feature csv has no header row");
  csv::Header header(*header_row);
  const std::size_t c_label = header.require("label");
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < header_row->size(); ++i) {
    const auto& n = (*header_row)[i];
    if (i == c_label || n == "id") continue;
    feature_cols.push_back(i);
    names.push_back(n);
  }
  Dataset data(std::make_shared<const FeatureRegistry>(std::move(names)));
  std::vector<double> buf(feature_cols.size());
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != header_row->size()) {
      throw Error(ErrorCode::kParse, fmt::format("line {}: expected {} fields, got {}", reader.line(),
                                                 header_row->size(), row->size()));
    }
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      buf[k] = parse_double((*row)[feature_cols[k]], reader.line(), (*header_row)[feature_cols[k]]);
    }
    data.add(buf, parse_label_token((*row)[c_label], reader.line()));
  }
  return data;
}

Dataset load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  return read_feature_csv(in);
}

void write_feature_csv(std::ostream& out, const Dataset& data, const std::vector<std::string>& ids) {
  const bool with_ids = !ids.empty();
  if (with_ids && ids.size() != data.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "id list length differs from row count");
  }
  csv::Row header;
  if (with_ids) header.push_back("id");
  for (const auto& n : data.registry()->names()) header.push_back(n);
  header.push_back("label");
  csv::write_row(out, header);
  csv::Row row;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    row.clear();
    if (with_ids) row.push_back(ids[i]);
    for (double v : data.row(i)) row.push_back(fmt::format("{}", v));
    row.push_back(data.label(i) == 1 ? "hateful" : "not_hateful");
    csv::write_row(out, row);
  }
}

}  // namespace counterbot
