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

#include "counterbot/hate_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "counterbot/corpus.hpp"
#include "counterbot/csv.hpp"
#include "counterbot/error.hpp"

namespace counterbot {

std::string_view to_string(HateClass c) {
  switch (c) {
    case HateClass::kHateSpeech: return "hate_speech";
    case HateClass::kOffensive: return "offensive_language";
    case HateClass::kNeither: return "neither";
  }
  return "neither";
}

HateClass parse_hate_class(std::string_view token) {
  const std::string t = ascii_lower(token);
  if (t == "hate_speech") return HateClass::kHateSpeech;
  if (t == "offensive_language") return HateClass::kOffensive;
  if (t == "neither") return HateClass::kNeither;
  throw Error(ErrorCode::kUnknownLabel, fmt::format("unknown hate class '{}'", token));
}

std::vector<std::string> hate_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'') {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

HateModel::SparseRow HateModel::vectorize(const CleanText& text) const {
  std::map<std::size_t, double> tf;
  for (const auto& tok : hate_tokens(text.value())) {
    if (auto it = vocabulary_.find(tok); it != vocabulary_.end()) tf[it->second] += 1.0;
  }
  SparseRow row;
  double norm = 0.0;
  for (const auto& [term, count] : tf) {
    const double v = count * idf_[term];
    row.emplace_back(term, v);
    norm += v * v;
  }
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (auto& entry : row) entry.second /= norm;
  }
  return row;
}

std::array<double, kHateClassCount> HateModel::probabilities(const SparseRow& row) const {
  std::array<double, kHateClassCount> z = bias_;
  const std::size_t vocab = vocabulary_.size();
  for (int c = 0; c < kHateClassCount; ++c) {
    for (const auto& [term, v] : row) z[c] += weights_[c * vocab + term] * v;
  }
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

HateModel HateModel::train(const std::vector<HateExample>& examples, const HateTrainParams& params) {
  std::array<std::size_t, kHateClassCount> counts{};
  for (const auto& ex : examples) ++counts[static_cast<int>(ex.label)];
  for (int c = 0; c < kHateClassCount; ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::kEmptyClass,
                  fmt::format("hate scorer training data has no '{}' examples", to_string(static_cast<HateClass>(c))));
    }
  }

  HateModel model;
  // Vocabulary in sorted order keeps the serialised model stable.
  std::map<std::string, std::size_t> doc_freq;
  for (const auto& ex : examples) {
    auto toks = hate_tokens(ex.text.value());
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (auto& t : toks) ++doc_freq[t];
  }
  if (doc_freq.empty()) throw Error(ErrorCode::kInvalidArgument, "hate scorer training data has no tokens");
  const double n_docs = static_cast<double>(examples.size());
  for (const auto& [term, df] : doc_freq) {
    model.vocabulary_.emplace(term, model.idf_.size());
    model.idf_.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df))) + 1.0);
  }
  const std::size_t vocab = model.idf_.size();
  model.weights_.assign(kHateClassCount * vocab, 0.0);

  std::vector<SparseRow> rows;
  rows.reserve(examples.size());
  for (const auto& ex : examples) rows.push_back(model.vectorize(ex.text));

  std::vector<double> grad_w(model.weights_.size());
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::array<double, kHateClassCount> grad_b{};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto p = model.probabilities(rows[i]);
      for (int c = 0; c < kHateClassCount; ++c) {
        const double err = p[c] - (static_cast<int>(examples[i].label) == c ? 1.0 : 0.0);
        grad_b[c] += err;
        for (const auto& [term, v] : rows[i]) grad_w[c * vocab + term] += err * v;
      }
    }
    const double scale = params.learning_rate / n_docs;
    for (std::size_t k = 0; k < model.weights_.size(); ++k) {
      model.weights_[k] -= scale * grad_w[k] + params.learning_rate * params.l2 * model.weights_[k];
    }
    for (int c = 0; c < kHateClassCount; ++c) model.bias_[c] -= scale * grad_b[c];
  }
  return model;
}

HateClassScores HateModel::score(const CleanText& text) const {
  if (!trained()) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, true};
  const auto p = probabilities(vectorize(text));
  return {p[0], p[1], p[2], false};
}

nlohmann::json HateModel::to_json() const {
  std::vector<std::string> terms(vocabulary_.size());
  for (const auto& [term, idx] : vocabulary_) terms[idx] = term;
  const std::size_t vocab = vocabulary_.size();
  nlohmann::json weights = nlohmann::json::array();
  for (int c = 0; c < kHateClassCount; ++c) {
    weights.push_back(std::vector<double>(weights_.begin() + c * vocab, weights_.begin() + (c + 1) * vocab));
  }
  return {{"kind", "tfidf_logistic"},
          {"classes", {"hate_speech", "offensive_language", "neither"}},
          {"vocabulary", terms},
          {"idf", idf_},
          {"weights", weights},
          {"bias", bias_}};
}

HateModel HateModel::from_json(const nlohmann::json& j) {
  HateModel m;
  try {
    const auto terms = j.at("vocabulary").get<std::vector<std::string>>();
    m.idf_ = j.at("idf").get<std::vector<double>>();
    if (m.idf_.size() != terms.size()) throw Error(ErrorCode::kParse, "hate model idf/vocabulary size mismatch");
    for (std::size_t i = 0; i < terms.size(); ++i) m.vocabulary_.emplace(terms[i], i);
    const auto& w = j.at("weights");
    if (w.size() != kHateClassCount) throw Error(ErrorCode::kParse, "hate model needs three weight rows");
    for (const auto& row : w) {
      auto values = row.get<std::vector<double>>();
      if (values.size() != terms.size()) throw Error(ErrorCode::kParse, "hate model weight row has wrong length");
      m.weights_.insert(m.weights_.end(), values.begin(), values.end());
    }
    m.bias_ = j.at("bias").get<std::array<double, kHateClassCount>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad hate model: {}", e.what()));
  }
  return m;
}

std::vector<HateExample> load_hate_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  return read_hate_corpus(in);
}

std::vector<HateExample> read_hate_corpus(std::istream& in) {
  csv::Reader reader(in);
  auto header_row = reader.next();
  if (!header_row) throw Error(ErrorCode::kParse, "hate corpus has no header row");
  const csv::Header header(std::move(*header_row));
  const std::size_t c_text = header.require("text");
  const std::size_t c_label = header.require("label");
  std::vector<HateExample> out;
  std::size_t row_number = 0;
  while (auto row = reader.next()) {
    ++row_number;
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() <= std::max(c_text, c_label)) {
      throw Error(ErrorCode::kParse, fmt::format("hate corpus row {}: too few fields", row_number));
    }
    try {
      out.push_back({clean((*row)[c_text]), parse_hate_class((*row)[c_label])});
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("row {}: {}", row_number, e.what()));
    }
  }
  return out;
}

}  // namespace counterbot
