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


#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cli_common.hpp"
#include "counterbot/data.hpp"
#include "counterbot/error.hpp"
#include "counterbot/operator_api.hpp"
#include "counterbot/pipeline.hpp"

namespace counterbot::cli {
namespace {

struct LimitFlags {
  int daily_cap = 100;
  int min_interval_s = 30;

  void add_to(CLI::App& app) {
    app.add_option("--daily-cap", daily_cap, "Responses per UTC day")->check(CLI::NonNegativeNumber);
    app.add_option("--min-interval", min_interval_s, "Seconds between responses")->check(CLI::NonNegativeNumber);
  }
  RateLimitConfig config() const { return {daily_cap, Millis{std::int64_t{min_interval_s} * 1000}}; }
};

// Seeds the library from a JSON Lines file unless the store already holds one.
void seed_library(PositivitweetLibrary& lib, const std::string& path) {
  if (!lib.list().empty()) {
    spdlog::info("library: {} entries already in store, {} approved", lib.list().size(), lib.approved_count());
    return;
  }
  std::ifstream in(path.empty() ? data_file("positivitweets.jsonl") : std::filesystem::path(path));
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open library '{}'", path));
  const auto n = lib.import_jsonl(in);
  spdlog::info("library: imported {} entries, {} approved", n, lib.approved_count());
}

// First timestamp in a fixture, so that startup configuration precedes it.
Instant fixture_start(std::istream& in) {
  std::string line;
  Instant start{};
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.contains("timestamp") && j["timestamp"].is_string()) {
      start = parse_instant(j["timestamp"].get<std::string>());
    }
    break;
  }
  in.clear();
  in.seekg(0);
  return start;
}

struct ServeArgs {
  std::string roster;
  std::vector<std::string> handles;
  std::string library;
  double theta = 0.9;
  std::string store = "counterbot.db";
  std::string host = "127.0.0.1";
  int port = 8080;
  bool dev = false;
  unsigned workers = 4;
  int retry_interval_s = 60;
  std::string self_handle;
  std::uint64_t seed = 0;
  ScorerFlags scorer;
  LimitFlags limits;
};

void run_serve(const ServeArgs& a) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  SystemClock clock;
  Store store(a.store);
  PositivitweetLibrary lib(clock, &store);
  seed_library(lib, a.library);
  OperatorConfig config(a.theta, clock, &store, "startup", a.limits.config());
  if (a.scorer.scorer_url.empty()) spdlog::warn("no --scorer-url; scoring with the built-in mock rules");
  auto scorers = make_scorers(a.scorer, false);
  LogPublisher publisher;
  PipelineDeps deps{store,  ScorerSet{scorers.toxicity.get(), &SentimentAnalyzer::bundled(), &scorers.hate},
                    scorers.registry, config, lib, clock, &publisher};
  Pipeline pipeline(deps, StreamFilterConfig::from_handles(resolve_handles(a.handles, a.roster), a.self_handle),
                    a.seed);
  pipeline.filter().validate();
  LiveRunner runner(pipeline, a.workers);

  const char* token = std::getenv(kOperatorTokenEnv);
  OperatorServer server(config, lib, [&pipeline] { return pipeline.stats(); }, &runner,
                        OperatorApiOptions{token ? token : "", a.dev});
  const int port = server.start(a.host, a.port);
  spdlog::info("operator API on {}:{} tracking {} handles, theta {}", a.host, port,
               pipeline.filter().tracked_handles.size(), a.theta);

  std::mutex mu;
  std::condition_variable cv;
  bool done = false;
  std::thread retry([&] {
    std::unique_lock lock(mu);
    while (!cv.wait_for(lock, std::chrono::seconds(a.retry_interval_s), [&] { return done; })) {
      lock.unlock();
      try {
        if (const auto n = pipeline.retry_failed()) spdlog::info("retry: {} tweets scored", n);
      } catch (const std::exception& e) {
        spdlog::warn("retry pass failed: {}", e.what());
      }
      lock.lock();
    }
  });

  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("signal {}; shutting down", sig);
  server.stop();
  runner.drain();
  runner.stop();
  {
    std::lock_guard lock(mu);
    done = true;
  }
  cv.notify_all();
  retry.join();
}

struct ReplayArgs {
  std::string fixture;
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::string store = "counterbot.db";
  double theta = 0.9;
  std::string library;
  std::string roster;
  std::vector<std::string> handles;
  std::string report_out;
  unsigned workers = 4;
  bool in_process = false;
  ScorerFlags scorer;
  LimitFlags limits;
};

void run_replay(const ReplayArgs& a) {
  std::ifstream in(a.fixture, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open fixture '{}'", a.fixture));
  ManualClock clock(fixture_start(in));
  Store store(a.store);
  PositivitweetLibrary lib(clock, &store);
  seed_library(lib, a.library);
  OperatorConfig config(a.theta, clock, &store, "replay", a.limits.config());
  auto scorers = make_scorers(a.scorer, !a.in_process);
  PipelineDeps deps{store, ScorerSet{scorers.toxicity.get(), &SentimentAnalyzer::bundled(), &scorers.hate},
                    scorers.registry, config, lib, clock};
  Pipeline pipeline(deps, StreamFilterConfig::from_handles(resolve_handles(a.handles, a.roster)), a.seed);
  pipeline.filter().validate();
  ReplayOptions opts;
  opts.rate = a.rate;
  opts.workers = a.workers;
  const auto summary = replay(in, pipeline, clock, opts);
  if (scorers.embedded) scorers.embedded->stop();
  std::cout << summary.to_json().dump(2) << '\n';
  if (!a.report_out.empty()) write_file(a.report_out, build_report(store, {}).to_json().dump(2) + "\n");
}

}  // namespace

void add_serve(CLI::App& app) {
  auto args = std::make_shared<ServeArgs>();
  auto* cmd = app.add_subcommand("serve", "Run the live pipeline and the operator API");
  cmd->add_option("--roster", args->roster, "Roster CSV")->check(CLI::ExistingFile);
  cmd->add_option("--handles", args->handles, "Tracked handles (overrides --roster)");
  cmd->add_option("--library", args->library, "Positivitweet JSON Lines used to seed an empty store")
      ->check(CLI::ExistingFile);
  cmd->add_option("--theta", args->theta, "Decision threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--store", args->store, "SQLite store path");
  cmd->add_option("--host", args->host, "Bind address");
  cmd->add_option("--port", args->port, "Operator API port (0 picks one)");
  cmd->add_flag("--dev", args->dev, "Disable operator authentication");
  cmd->add_option("--workers", args->workers, "Scoring threads")->check(CLI::PositiveNumber);
  cmd->add_option("--retry-interval", args->retry_interval_s, "Seconds between re-scoring passes")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--self-handle", args->self_handle, "The bot's own handle, never answered");
  cmd->add_option("--seed", args->seed, "Responder RNG seed");
  args->scorer.add_to(*cmd);
  args->limits.add_to(*cmd);
  cmd->callback([args] { run_serve(*args); });
}

void add_replay(CLI::App& app) {
  auto args = std::make_shared<ReplayArgs>();
  auto* cmd = app.add_subcommand("replay", "Feed a JSON Lines fixture through the pipeline");
  cmd->add_option("--fixture", args->fixture, "Fixture path")->required()->check(CLI::ExistingFile);
  cmd->add_option("--rate", args->rate, "Tweets per second, 0 for unthrottled")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", args->seed, "Responder RNG seed");
  cmd->add_option("--store", args->store, "SQLite store path (:memory: for none)");
  cmd->add_option("--theta", args->theta, "Decision threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--library", args->library, "Positivitweet JSON Lines used to seed an empty store")
      ->check(CLI::ExistingFile);
  cmd->add_option("--roster", args->roster, "Roster CSV")->check(CLI::ExistingFile);
  cmd->add_option("--handles", args->handles, "Tracked handles (overrides --roster)");
  cmd->add_option("--report-out", args->report_out, "Write the report JSON here");
  cmd->add_option("--workers", args->workers, "Scoring threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--in-process", args->in_process, "Evaluate mock rules directly instead of over HTTP");
  args->scorer.add_to(*cmd);
  args->limits.add_to(*cmd);
  cmd->callback([args] { run_replay(*args); });
}

void add_report(CLI::App& app) {
  struct Args {
    std::string store = "counterbot.db";
    std::string from, to, format = "text";
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("report", "Summarise a store over a period");
  cmd->add_option("--store", args->store, "SQLite store path")->check(CLI::ExistingFile);
  cmd->add_option("--from", args->from, "Inclusive start, ISO-8601 UTC");
  cmd->add_option("--to", args->to, "Exclusive end, ISO-8601 UTC");
  cmd->add_option("--format", args->format, "json or text")->check(CLI::IsMember({"json", "text"}));
  cmd->callback([args] {
    Store store(args->store);
    const auto report = build_report(store, Period{optional_instant(args->from), optional_instant(args->to)});
    if (args->format == "json") {
      std::cout << report.to_json().dump(2) << '\n';
    } else {
      std::cout << report.to_text();
    }
  });
}

void add_gen_fixture(CLI::App& app) {
  struct Args {
    FixtureSpec spec;
    std::string start = "2019-10-01T00:00:00Z";
    std::int64_t spacing_ms = 60000;
    std::string roster;
    std::vector<std::string> handles;
    std::string out;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("gen-fixture", "Write a synthetic replay fixture");
  cmd->add_option("--count", args->spec.count, "Admissible tweets");
  cmd->add_option("--abusive", args->spec.abusive, "Of those, tweets the mock rules flag");
  cmd->add_option("--filtered", args->spec.filtered, "Extra tweets the stream filter rejects");
  cmd->add_option("--seed", args->spec.seed, "Generator seed");
  cmd->add_option("--start", args->start, "First timestamp");
  cmd->add_option("--spacing-ms", args->spacing_ms, "Gap between tweets")->check(CLI::PositiveNumber);
  cmd->add_option("--roster", args->roster, "Roster CSV")->check(CLI::ExistingFile);
  cmd->add_option("--handles", args->handles, "Mentioned handles (overrides --roster)");
  cmd->add_option("--out", args->out, "Output path (default stdout)");
  cmd->callback([args] {
    auto spec = args->spec;
    spec.start = parse_instant(args->start);
    spec.spacing = Millis{args->spacing_ms};
    spec.handles = resolve_handles(args->handles, args->roster);
    if (args->out.empty()) {
      write_fixture(std::cout, spec);
    } else {
      std::ostringstream buf;
      write_fixture(buf, spec);
      write_file(args->out, buf.str());
    }
  });
}

void add_mock_scorer(CLI::App& app) {
  struct Args {
    std::string rules;
    std::string host = "127.0.0.1";
    int port = 8081;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("mock-scorer", "Serve the toxicity protocol from a rules file");
  cmd->add_option("--rules", args->rules, "Rules JSON (default: bundled)")->check(CLI::ExistingFile);
  cmd->add_option("--host", args->host, "Bind address");
  cmd->add_option("--port", args->port, "Port");
  cmd->callback([args] {
    const char* key = std::getenv(kScorerApiKeyEnv);
    MockToxicityServer server(
        ToxicityRules::load(args->rules.empty() ? data_file("mock_rules.json") : std::filesystem::path(args->rules)),
        key ? key : "");
    spdlog::info("mock scorer on {}:{}", args->host, args->port);
    server.listen_blocking(args->host, args->port);
  });
}

}  // namespace counterbot::cli
