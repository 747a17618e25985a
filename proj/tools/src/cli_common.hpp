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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "counterbot/hate_scorer.hpp"
#include "counterbot/registry.hpp"
#include "counterbot/time.hpp"
#include "counterbot/toxicity.hpp"

namespace counterbot::cli {

/// Toxicity source selection shared by commands that score text.
struct ScorerFlags {
  std::string scorer_url;
  std::string mock_rules;
  std::string hate_model;
  int timeout_ms = 2000;
  std::size_t pool = 4;

  void add_to(CLI::App& app, bool with_hate = true);
};

/// Owns whichever toxicity scorer the flags selected.
struct ScorerBundle {
  std::unique_ptr<MockToxicityServer> embedded;
  std::unique_ptr<ToxicityScorer> toxicity;
  HateModel hate;
  std::shared_ptr<const FeatureRegistry> registry;
};

/// --scorer-url wins; otherwise rules are served in process, over HTTP when
/// `embedded_http` is set.
ScorerBundle make_scorers(const ScorerFlags& flags, bool embedded_http);

/// Handles from --handles, else the tracked rows of --roster, else the
/// bundled demo roster.
std::vector<std::string> resolve_handles(const std::vector<std::string>& handles, const std::string& roster);

std::optional<Instant> optional_instant(const std::string& text);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

void add_serve(CLI::App& app);
void add_replay(CLI::App& app);
void add_report(CLI::App& app);
void add_gen_fixture(CLI::App& app);
void add_mock_scorer(CLI::App& app);
void add_dataset(CLI::App& app);
void add_featurize(CLI::App& app);
void add_train(CLI::App& app);
void add_hate_train(CLI::App& app);
void add_eval(CLI::App& app);

}  // namespace counterbot::cli
