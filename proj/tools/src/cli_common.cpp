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


#include "cli_common.hpp"

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "counterbot/corpus.hpp"
#include "counterbot/data.hpp"
#include "counterbot/error.hpp"

namespace counterbot::cli {

void ScorerFlags::add_to(CLI::App& app, bool with_hate) {
  app.add_option("--scorer-url", scorer_url, "Toxicity service base URL");
  app.add_option("--mock-rules", mock_rules, "Rules file for the built-in mock scorer")->check(CLI::ExistingFile);
  app.add_option("--scorer-timeout-ms", timeout_ms, "Per-request timeout")->check(CLI::PositiveNumber);
  app.add_option("--scorer-pool", pool, "HTTP connection pool size")->check(CLI::PositiveNumber);
  if (with_hate) {
    app.add_option("--hate-model", hate_model, "Hate model JSON (default: trained on the bundled demo corpus)")
        ->check(CLI::ExistingFile);
  }
}

ScorerBundle make_scorers(const ScorerFlags& flags, bool embedded_http) {
  ScorerBundle b;
  HttpScorerOptions ho;
  ho.request_timeout = Millis{flags.timeout_ms};
  ho.pool_size = flags.pool;
  if (const char* key = std::getenv(kScorerApiKeyEnv)) ho.api_key = key;
  if (!flags.scorer_url.empty()) {
    ho.url = flags.scorer_url;
    b.toxicity = std::make_unique<HttpToxicityClient>(ho);
  } else {
    auto rules = ToxicityRules::load(flags.mock_rules.empty() ? data_file("mock_rules.json")
                                                              : std::filesystem::path(flags.mock_rules));
    if (embedded_http) {
      b.embedded = std::make_unique<MockToxicityServer>(std::move(rules), ho.api_key);
      b.embedded->start();
      ho.url = b.embedded->url();
      spdlog::info("embedded mock scorer on {}", ho.url);
      b.toxicity = std::make_unique<HttpToxicityClient>(ho);
    } else {
      b.toxicity = std::make_unique<RuleToxicityScorer>(std::move(rules));
    }
  }
  if (!flags.hate_model.empty()) {
    std::ifstream in(flags.hate_model);
    b.hate = HateModel::from_json(nlohmann::json::parse(in));
  } else {
    b.hate = HateModel::train(load_hate_corpus(data_file("hate_demo.csv")));
  }
  b.registry = std::make_shared<const FeatureRegistry>(FeatureRegistry::default_registry());
  return b;
}

std::vector<std::string> resolve_handles(const std::vector<std::string>& handles, const std::string& roster) {
  if (!handles.empty()) return handles;
  const auto names = NameTable::load(data_file("names.tsv"));
  const auto r = load_roster(roster.empty() ? data_file("demo_roster.csv") : std::filesystem::path(roster), names);
  return r.tracked_handles();
}

std::optional<Instant> optional_instant(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_instant(text);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(ErrorCode::kIo, fmt::format("short write to '{}'", path.string()));
}

}  // namespace counterbot::cli
