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

#include "counterbot/store.hpp"

#include <cstring>
#include <limits>

#include <fmt/format.h>
#include <sqlite3.h>

#include "counterbot/error.hpp"

namespace counterbot {

using nlohmann::json;

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS tweets (
  id TEXT PRIMARY KEY,
  text TEXT NOT NULL,
  lang TEXT NOT NULL,
  author_handle TEXT NOT NULL,
  mentioned_handles TEXT NOT NULL,
  is_retweet INTEGER NOT NULL,
  created_at INTEGER NOT NULL,
  received_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS scores (
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  tweet_id TEXT NOT NULL,
  clean_text TEXT NOT NULL,
  features BLOB,
  status TEXT NOT NULL,
  error_code TEXT,
  error_message TEXT,
  toxicity REAL,
  decided INTEGER NOT NULL,
  theta_at_decision REAL,
  config_version INTEGER,
  received_at INTEGER NOT NULL,
  scored_at INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS scores_by_time ON scores (scored_at);
CREATE INDEX IF NOT EXISTS scores_by_tweet ON scores (tweet_id);
CREATE TABLE IF NOT EXISTS responses (
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  response_id TEXT NOT NULL UNIQUE,
  tweet_id TEXT NOT NULL,
  positivitweet_id TEXT NOT NULL,
  sent_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS config_history (
  version INTEGER PRIMARY KEY,
  theta REAL NOT NULL,
  at INTEGER NOT NULL,
  operator TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS positivitweets (
  id TEXT PRIMARY KEY,
  state TEXT NOT NULL,
  body TEXT NOT NULL
);
)sql";

std::int64_t to_ms(Instant t) { return t.time_since_epoch().count(); }
Instant from_ms(std::int64_t ms) { return Instant{Millis{ms}}; }

}  // namespace

/// Borrowed handle to a cached prepared statement; resets it on destruction.
class Store::Stmt {
 public:
  Stmt(sqlite3* db, sqlite3_stmt* s) : db_(db), s_(s) {}
  ~Stmt() {
    if (s_) {
      sqlite3_reset(s_);
      sqlite3_clear_bindings(s_);
    }
  }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;
  Stmt(Stmt&& o) noexcept : db_(o.db_), s_(std::exchange(o.s_, nullptr)) {}

  Stmt& bind(int i, std::int64_t v) { return check(sqlite3_bind_int64(s_, i, v)); }
  Stmt& bind(int i, double v) { return check(sqlite3_bind_double(s_, i, v)); }
  Stmt& bind(int i, const std::string& v) {
    return check(sqlite3_bind_text(s_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
  }
  Stmt& bind_null(int i) { return check(sqlite3_bind_null(s_, i)); }
  Stmt& bind_blob(int i, const void* p, std::size_t n) {
    return check(sqlite3_bind_blob(s_, i, p, static_cast<int>(n), SQLITE_TRANSIENT));
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(s_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(ErrorCode::kStorage, fmt::format("sqlite step: {}", sqlite3_errmsg(db_)));
  }
  /// Runs to completion; reports constraint violations as false.
  bool run() {
    const int rc = sqlite3_step(s_);
    if (rc == SQLITE_DONE || rc == SQLITE_ROW) return true;
    if ((rc & 0xff) == SQLITE_CONSTRAINT) return false;
    throw Error(ErrorCode::kStorage, fmt::format("sqlite step: {}", sqlite3_errmsg(db_)));
  }

  std::int64_t i64(int c) const { return sqlite3_column_int64(s_, c); }
  double real(int c) const { return sqlite3_column_double(s_, c); }
  bool null(int c) const { return sqlite3_column_type(s_, c) == SQLITE_NULL; }
  std::string text(int c) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(s_, c));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(s_, c))) : std::string();
  }
  std::vector<double> doubles(int c) const {
    const void* p = sqlite3_column_blob(s_, c);
    const auto n = static_cast<std::size_t>(sqlite3_column_bytes(s_, c)) / sizeof(double);
    std::vector<double> out(n);
    if (n) std::memcpy(out.data(), p, n * sizeof(double));
    return out;
  }

 private:
  Stmt& check(int rc) {
    if (rc != SQLITE_OK) throw Error(ErrorCode::kStorage, fmt::format("sqlite bind: {}", sqlite3_errmsg(db_)));
    return *this;
  }
  sqlite3* db_;
  sqlite3_stmt* s_;
};

Store::Store(const std::filesystem::path& path) {
  const std::string p = path.string();
  if (sqlite3_open_v2(p.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX, nullptr) !=
      SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCode::kStorage, fmt::format("cannot open store '{}': {}", p, msg));
  }
  sqlite3_busy_timeout(db_, 5000);
  if (p != ":memory:") exec("PRAGMA journal_mode=WAL");
  exec("PRAGMA synchronous=NORMAL");
  exec(kSchema);
}

Store::~Store() {
  for (auto& [sql, stmt] : cache_) sqlite3_finalize(stmt);
  sqlite3_close(db_);
}

void Store::exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw Error(ErrorCode::kStorage, fmt::format("sqlite: {}", msg));
  }
}

Store::Stmt Store::prepare(const char* sql) const {
  auto it = cache_.find(sql);
  if (it == cache_.end()) {
    sqlite3_stmt* s = nullptr;
    if (sqlite3_prepare_v2(db_, sql, -1, &s, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::kStorage, fmt::format("sqlite prepare: {}", sqlite3_errmsg(db_)));
    }
    it = cache_.emplace(sql, s).first;
  }
  return Stmt(db_, it->second);
}

// Savepoints nest, so a per-tweet transaction may run inside a batch.
Store::Transaction::Transaction(Store& store) : store_(store), lock_(store.mu_) { store_.exec("SAVEPOINT cb_tx"); }

Store::Transaction::~Transaction() {
  if (!done_) {
    char* err = nullptr;
    sqlite3_exec(store_.db_, "ROLLBACK TO cb_tx; RELEASE cb_tx", nullptr, nullptr, &err);
    sqlite3_free(err);
  }
}

void Store::Transaction::commit() {
  store_.exec("RELEASE cb_tx");
  done_ = true;
}

bool Store::insert_tweet(const Tweet& tweet, Instant received_at) {
  std::lock_guard lock(mu_);
  auto st = prepare(
      "INSERT INTO tweets (id, text, lang, author_handle, mentioned_handles, is_retweet, created_at, received_at) "
      "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)");
  st.bind(1, tweet.id).bind(2, tweet.text).bind(3, tweet.lang).bind(4, tweet.author_handle);
  st.bind(5, json(tweet.mentioned_handles).dump());
  st.bind(6, std::int64_t{tweet.is_retweet ? 1 : 0}).bind(7, to_ms(tweet.timestamp)).bind(8, to_ms(received_at));
  return st.run();
}

std::int64_t Store::insert_score(const ScoreRecord& r) {
  std::lock_guard lock(mu_);
  auto st = prepare(
      "INSERT INTO scores (tweet_id, clean_text, features, status, error_code, error_message, toxicity, decided, "
      "theta_at_decision, config_version, received_at, scored_at) "
      "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12)");
  st.bind(1, r.tweet_id).bind(2, r.clean_text);
  if (r.features.empty()) {
    st.bind_null(3);
  } else {
    st.bind_blob(3, r.features.data(), r.features.size() * sizeof(double));
  }
  st.bind(4, std::string(r.ok() ? "ok" : "failed"));
  if (r.ok()) {
    st.bind_null(5).bind_null(6).bind(7, r.toxicity);
  } else {
    st.bind(5, r.error_code).bind(6, r.error_message).bind_null(7);
  }
  st.bind(8, std::int64_t{r.decided ? 1 : 0});
  if (r.theta_at_decision) st.bind(9, *r.theta_at_decision); else st.bind_null(9);
  if (r.config_version) st.bind(10, *r.config_version); else st.bind_null(10);
  st.bind(11, to_ms(r.received_at)).bind(12, to_ms(r.scored_at));
  if (!st.run()) throw Error(ErrorCode::kStorage, "score insert violated a constraint");
  return sqlite3_last_insert_rowid(db_);
}

void Store::insert_response(const ResponseEvent& e) {
  std::lock_guard lock(mu_);
  auto st = prepare("INSERT INTO responses (response_id, tweet_id, positivitweet_id, sent_at) VALUES (?1, ?2, ?3, ?4)");
  st.bind(1, e.response_id).bind(2, e.tweet_id).bind(3, e.positivitweet_id).bind(4, to_ms(e.sent_at));
  if (!st.run()) throw Error(ErrorCode::kStorage, fmt::format("duplicate response id '{}'", e.response_id));
}

std::int64_t Store::append_theta_change(const ThetaChange& c) {
  std::lock_guard lock(mu_);
  std::int64_t version = 0;
  {
    auto q = prepare("SELECT COUNT(*) FROM config_history");
    if (q.step()) version = q.i64(0);
  }
  auto st = prepare("INSERT INTO config_history (version, theta, at, operator) VALUES (?1, ?2, ?3, ?4)");
  st.bind(1, version).bind(2, c.theta).bind(3, to_ms(c.at)).bind(4, c.operator_name);
  if (!st.run()) throw Error(ErrorCode::kStorage, "config history insert failed");
  return version;
}

void Store::upsert_positivitweet(const PositivitweetEntry& e) {
  std::lock_guard lock(mu_);
  auto st = prepare(
      "INSERT INTO positivitweets (id, state, body) VALUES (?1, ?2, ?3) "
      "ON CONFLICT(id) DO UPDATE SET state = excluded.state, body = excluded.body");
  st.bind(1, e.id).bind(2, std::string(to_string(e.state))).bind(3, entry_to_json(e).dump());
  st.run();
}

bool Store::has_tweet(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto st = prepare("SELECT 1 FROM tweets WHERE id = ?1");
  st.bind(1, id);
  return st.step();
}

namespace {

Tweet tweet_from_columns(const std::string& id, const std::string& text, const std::string& lang,
                         const std::string& author, const std::string& mentions, std::int64_t rt, std::int64_t created) {
  Tweet t;
  t.id = id;
  t.text = text;
  t.lang = lang;
  t.author_handle = author;
  t.mentioned_handles = json::parse(mentions).get<std::vector<std::string>>();
  t.is_retweet = rt != 0;
  t.timestamp = from_ms(created);
  return t;
}

}  // namespace

std::optional<Tweet> Store::tweet(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto st = prepare(
      "SELECT id, text, lang, author_handle, mentioned_handles, is_retweet, created_at FROM tweets WHERE id = ?1");
  st.bind(1, id);
  if (!st.step()) return std::nullopt;
  return tweet_from_columns(st.text(0), st.text(1), st.text(2), st.text(3), st.text(4), st.i64(5), st.i64(6));
}

StoreCounts Store::counts(const Period& period) const {
  std::lock_guard lock(mu_);
  const std::int64_t lo = period.from ? to_ms(*period.from) : std::numeric_limits<std::int64_t>::min();
  const std::int64_t hi = period.to ? to_ms(*period.to) : std::numeric_limits<std::int64_t>::max();
  StoreCounts c;
  {
    auto st = prepare(
        "SELECT COUNT(DISTINCT tweet_id), COUNT(DISTINCT CASE WHEN decided = 1 THEN tweet_id END) FROM scores "
        "WHERE status = 'ok' AND scored_at >= ?1 AND scored_at < ?2");
    st.bind(1, lo).bind(2, hi);
    if (st.step()) {
      c.analysed = st.i64(0);
      c.abusive = st.i64(1);
    }
  }
  {
    auto st = prepare("SELECT COUNT(*) FROM responses WHERE sent_at >= ?1 AND sent_at < ?2");
    st.bind(1, lo).bind(2, hi);
    if (st.step()) c.sent = st.i64(0);
  }
  {
    auto st = prepare(
        "SELECT COUNT(DISTINCT f.tweet_id) FROM scores f WHERE f.status = 'failed' AND f.scored_at >= ?1 "
        "AND f.scored_at < ?2 AND NOT EXISTS (SELECT 1 FROM scores o WHERE o.tweet_id = f.tweet_id AND o.status = 'ok')");
    st.bind(1, lo).bind(2, hi);
    if (st.step()) c.unscored = st.i64(0);
  }
  return c;
}

std::vector<ThetaChange> Store::theta_history() const {
  std::lock_guard lock(mu_);
  auto st = prepare("SELECT theta, at, operator FROM config_history ORDER BY version");
  std::vector<ThetaChange> out;
  while (st.step()) out.push_back({st.real(0), from_ms(st.i64(1)), st.text(2)});
  return out;
}

std::vector<PositivitweetEntry> Store::positivitweets() const {
  std::lock_guard lock(mu_);
  auto st = prepare("SELECT body FROM positivitweets ORDER BY id");
  std::vector<PositivitweetEntry> out;
  while (st.step()) out.push_back(entry_from_json(json::parse(st.text(0))));
  return out;
}

std::vector<ScoreRecord> Store::scores(const Period& period) const {
  std::lock_guard lock(mu_);
  const std::int64_t lo = period.from ? to_ms(*period.from) : std::numeric_limits<std::int64_t>::min();
  const std::int64_t hi = period.to ? to_ms(*period.to) : std::numeric_limits<std::int64_t>::max();
  auto st = prepare(
      "SELECT tweet_id, clean_text, features, status, error_code, error_message, toxicity, decided, "
      "theta_at_decision, config_version, received_at, scored_at FROM scores "
      "WHERE scored_at >= ?1 AND scored_at < ?2 ORDER BY seq");
  st.bind(1, lo).bind(2, hi);
  std::vector<ScoreRecord> out;
  while (st.step()) {
    ScoreRecord r;
    r.tweet_id = st.text(0);
    r.clean_text = st.text(1);
    if (!st.null(2)) r.features = st.doubles(2);
    r.status = st.text(3) == "ok" ? ScoreStatus::kOk : ScoreStatus::kFailed;
    r.error_code = st.text(4);
    r.error_message = st.text(5);
    r.toxicity = st.null(6) ? 0.0 : st.real(6);
    r.decided = st.i64(7) != 0;
    if (!st.null(8)) r.theta_at_decision = st.real(8);
    if (!st.null(9)) r.config_version = st.i64(9);
    r.received_at = from_ms(st.i64(10));
    r.scored_at = from_ms(st.i64(11));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResponseEvent> Store::responses(const Period& period) const {
  std::lock_guard lock(mu_);
  const std::int64_t lo = period.from ? to_ms(*period.from) : std::numeric_limits<std::int64_t>::min();
  const std::int64_t hi = period.to ? to_ms(*period.to) : std::numeric_limits<std::int64_t>::max();
  auto st = prepare(
      "SELECT response_id, tweet_id, positivitweet_id, sent_at FROM responses "
      "WHERE sent_at >= ?1 AND sent_at < ?2 ORDER BY seq");
  st.bind(1, lo).bind(2, hi);
  std::vector<ResponseEvent> out;
  while (st.step()) out.push_back({st.text(0), st.text(1), st.text(2), from_ms(st.i64(3))});
  return out;
}

std::vector<Tweet> Store::pending_retries() const {
  std::lock_guard lock(mu_);
  auto st = prepare(
      "SELECT t.id, t.text, t.lang, t.author_handle, t.mentioned_handles, t.is_retweet, t.created_at FROM tweets t "
      "WHERE EXISTS (SELECT 1 FROM scores f WHERE f.tweet_id = t.id AND f.status = 'failed') "
      "AND NOT EXISTS (SELECT 1 FROM scores o WHERE o.tweet_id = t.id AND o.status = 'ok') "
      "ORDER BY t.received_at, t.id");
  std::vector<Tweet> out;
  while (st.step()) {
    out.push_back(tweet_from_columns(st.text(0), st.text(1), st.text(2), st.text(3), st.text(4), st.i64(5), st.i64(6)));
  }
  return out;
}

std::optional<Instant> Store::last_response_at() const {
  std::lock_guard lock(mu_);
  auto st = prepare("SELECT MAX(sent_at) FROM responses");
  if (st.step() && !st.null(0)) return from_ms(st.i64(0));
  return std::nullopt;
}

}  // namespace counterbot
