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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "counterbot/corpus.hpp"
#include "counterbot/records.hpp"

struct sqlite3;
struct sqlite3_stmt;

namespace counterbot {

/// Half-open [from, to) interval; an absent bound is unbounded.
struct Period {
  std::optional<Instant> from;
  std::optional<Instant> to;

  bool contains(Instant t) const { return (!from || t >= *from) && (!to || t < *to); }
};

struct StoreCounts {
  std::int64_t analysed = 0;  // tweets with a successful score
  std::int64_t abusive = 0;   // of those, decided true
  std::int64_t sent = 0;      // responses
  std::int64_t unscored = 0;  // tweets whose every attempt failed
};

/// Single-file SQLite store with append-only tables tweets, scores,
/// responses and config_history, plus the curated positivitweets library.
/// All access is serialised on one connection.
class Store {
 public:
  /// ":memory:" opens a private in-memory database.
  explicit Store(const std::filesystem::path& path);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// Groups writes into one SQLite transaction (nestable); rolls back unless
  /// committed.
  class Transaction {
   public:
    explicit Transaction(Store& store);
    ~Transaction();
    void commit();

   private:
    Store& store_;
    std::unique_lock<std::recursive_mutex> lock_;
    bool done_ = false;
  };

  /// False when a tweet with this id is already stored.
  bool insert_tweet(const Tweet& tweet, Instant received_at);
  std::int64_t insert_score(const ScoreRecord& record);
  void insert_response(const ResponseEvent& event);
  /// Returns the version (0-based position) of the appended change.
  std::int64_t append_theta_change(const ThetaChange& change);
  void upsert_positivitweet(const PositivitweetEntry& entry);

  bool has_tweet(const std::string& id) const;
  std::optional<Tweet> tweet(const std::string& id) const;
  StoreCounts counts(const Period& period = {}) const;
  std::vector<ThetaChange> theta_history() const;
  std::vector<PositivitweetEntry> positivitweets() const;
  std::vector<ScoreRecord> scores(const Period& period = {}) const;
  std::vector<ResponseEvent> responses(const Period& period = {}) const;
  /// Tweets whose scoring failed and never succeeded, oldest first.
  std::vector<Tweet> pending_retries() const;
  std::optional<Instant> last_response_at() const;

 private:
  class Stmt;
  void exec(const char* sql);
  Stmt prepare(const char* sql) const;

  sqlite3* db_ = nullptr;
  mutable std::recursive_mutex mu_;
  mutable std::unordered_map<const char*, sqlite3_stmt*> cache_;
};

}  // namespace counterbot
