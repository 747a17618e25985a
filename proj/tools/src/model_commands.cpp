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


#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cli_common.hpp"
#include "counterbot/balance.hpp"
#include "counterbot/corpus.hpp"
#include "counterbot/csv.hpp"
#include "counterbot/data.hpp"
#include "counterbot/error.hpp"
#include "counterbot/eval.hpp"
#include "counterbot/featurize.hpp"
#include "counterbot/sentiment.hpp"

namespace counterbot::cli {
namespace {

using nlohmann::json;

json corpus_summary(const LabeledCorpus& c) {
  return {{"rows", c.size()},
          {"hateful", c.count(Label::kHateful)},
          {"not_hateful", c.count(Label::kNotHateful)},
          {"class_balance", c.class_balance()}};
}

std::string labeled_csv(const LabeledCorpus& c) {
  std::ostringstream out;
  csv::write_row(out, {"id", "text", "label"});
  for (const auto& e : c.examples()) csv::write_row(out, {e.id, e.raw_text, std::string(to_string(e.label))});
  return out.str();
}

struct GbdtFlags {
  TrainParams params;
  bool no_balance = false;
  int balance_k = 5;
  double beta = 1.0;

  void add_to(CLI::App& app) {
    app.add_option("--trees", params.num_trees, "Boosting rounds");
    app.add_option("--learning-rate", params.learning_rate, "Shrinkage");
    app.add_option("--max-leaves", params.max_leaves, "Leaves per tree");
    app.add_option("--min-leaf", params.min_samples_leaf, "Minimum rows per leaf");
    app.add_option("--lambda", params.l2_lambda, "L2 penalty on leaf weights");
    app.add_flag("--no-balance", no_balance, "Skip ADASYN on training data");
    app.add_option("--balance-k", balance_k, "ADASYN neighbours");
    app.add_option("--beta", beta, "ADASYN balance level");
  }
  std::optional<BalancerConfig> balancer(std::uint64_t seed) const {
    if (no_balance) return std::nullopt;
    return BalancerConfig{balance_k, beta, seed};
  }
};

struct EvalArgs {
  std::string dataset;
  std::string model;
  std::string column;
  int k = 10;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 0;
  double bandwidth = 0.0;
  GbdtFlags gbdt;
};

CVOptions cv_options(const EvalArgs& a) {
  CVOptions o;
  o.k = a.k;
  o.seed = a.seed;
  o.threads = a.threads;
  o.balance = a.gbdt.balancer(a.seed);
  return o;
}

// Scores from a model file or from one raw feature column.
std::vector<double> dataset_scores(const Dataset& d, const EvalArgs& a) {
  if (!a.model.empty()) {
    const auto model = Ensemble::load(a.model);
    if (!(*model.registry() == *d.registry())) {
      throw Error(ErrorCode::kDimensionMismatch, "model and dataset feature columns differ");
    }
    return model.predict_all(d);
  }
  const auto col = d.registry()->index_of(a.column);
  if (!col) throw Error(ErrorCode::kMissingColumn, fmt::format("dataset has no column '{}'", a.column));
  std::vector<double> s(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) s[i] = d.at(i, *col);
  return s;
}

void emit(const EvalArgs& a, const std::string& name, const std::string& content) {
  if (!a.out.empty()) write_file(std::filesystem::path(a.out) / name, content);
}

std::string folds_csv(const std::vector<CVReport>& reports) {
  std::ostringstream out;
  csv::write_row(out, {"model", "feature_set", "fold", "auc"});
  for (const auto& r : reports) {
    for (std::size_t f = 0; f < r.fold_auc.size(); ++f) {
      csv::write_row(out, {r.model_id, r.feature_set, std::to_string(f), fmt::format("{:.17g}", r.fold_auc[f])});
    }
  }
  return out.str();
}

std::string summary_csv(const std::vector<CVReport>& reports) {
  std::ostringstream out;
  csv::write_row(out, {"model", "feature_set", "k", "mean_auc", "std_auc"});
  for (const auto& r : reports) {
    csv::write_row(out, {r.model_id, r.feature_set, std::to_string(r.fold_auc.size()),
                         fmt::format("{:.17g}", r.mean()), fmt::format("{:.17g}", r.stddev())});
  }
  return out.str();
}

void eval_auc(const EvalArgs& a) {
  const auto d = load_feature_csv(a.dataset);
  const auto s = dataset_scores(d, a);
  const json j = {{"auc", auc(s, d.labels())},
                  {"rows", d.rows()},
                  {"positives", d.positives()},
                  {"scorer", a.model.empty() ? "column:" + a.column : "model"}};
  emit(a, "auc.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
}

void eval_cv(const EvalArgs& a) {
  const auto d = load_feature_csv(a.dataset);
  auto params = a.gbdt.params;
  params.seed = a.seed;
  const auto r = kfold_cv(d, gbdt_scorer(params), cv_options(a));
  emit(a, "cv.json", r.to_json().dump(2) + "\n");
  emit(a, "cv_folds.csv", folds_csv({r}));
  std::cout << r.to_json().dump(2) << '\n';
}

void eval_ablate(const EvalArgs& a) {
  const auto d = load_feature_csv(a.dataset);
  auto params = a.gbdt.params;
  params.seed = a.seed;
  const auto rows = ablation(d, default_feature_groups(*d.registry()), params, cv_options(a));
  json j = json::array();
  for (const auto& r : rows) j.push_back(r.to_json());
  emit(a, "ablation.json", j.dump(2) + "\n");
  emit(a, "ablation.csv", summary_csv(rows));
  emit(a, "ablation_folds.csv", folds_csv(rows));
  std::cout << summary_csv(rows);
}

void eval_kde(const EvalArgs& a) {
  const auto d = load_feature_csv(a.dataset);
  const auto s = dataset_scores(d, a);
  std::vector<double> hateful, not_hateful;
  for (std::size_t i = 0; i < d.rows(); ++i) (d.label(i) ? hateful : not_hateful).push_back(s[i]);
  std::optional<double> bw;
  if (a.bandwidth > 0) bw = a.bandwidth;
  const auto curves = kde_report({{"hateful", hateful}, {"not_hateful", not_hateful}}, bw);
  std::ostringstream kde, hist;
  write_kde_csv(kde, curves);
  write_histogram_csv(hist, curves);
  emit(a, "kde.csv", kde.str());
  emit(a, "histogram.csv", hist.str());
  emit(a, "kde_summary.json", kde_summary(curves).dump(2) + "\n");
  std::cout << kde_summary(curves).dump(2) << '\n';
}

CLI::App* add_eval_mode(CLI::App& eval, const std::shared_ptr<EvalArgs>& args, const std::string& name,
                        const std::string& description) {
  auto* cmd = eval.add_subcommand(name, description);
  cmd->add_option("--dataset", args->dataset, "Feature CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args->seed, "Fold and balancing seed");
  cmd->add_option("--out", args->out, "Directory for CSV/JSON outputs");
  return cmd;
}

void add_score_source(CLI::App& cmd, EvalArgs& args) {
  auto* model = cmd.add_option("--model", args.model, "Model JSON")->check(CLI::ExistingFile);
  cmd.add_option("--column", args.column, "Score by a raw feature column instead")->excludes(model);
}

void featurize_rows(const LabeledCorpus& corpus, const ScorerBundle& scorers, unsigned threads, Dataset& out,
                    std::vector<std::string>& ids) {
  const ScorerSet set{scorers.toxicity.get(), &SentimentAnalyzer::bundled(), &scorers.hate};
  const auto& ex = corpus.examples();
  std::vector<std::optional<FeatureVector>> rows(ex.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ex.size(); i = next++) {
      try {
        rows[i] = featurize(ex[i].clean_text, scorers.registry, set);
      } catch (const std::exception& e) {
        spdlog::warn("row '{}' skipped: {}", ex[i].id, e.what());
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < ex.size(); ++i) {
    if (!rows[i]) continue;
    out.add(*rows[i], ex[i].label == Label::kHateful ? 1 : 0);
    ids.push_back(ex[i].id);
  }
}

}  // namespace

void add_dataset(CLI::App& app) {
  struct Args {
    std::string dataset;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    std::string out;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("dataset", "Inspect or split a labeled corpus");
  cmd->require_subcommand(1);
  auto* load = cmd->add_subcommand("load", "Validate a labeled CSV and print class counts");
  load->add_option("--dataset", args->dataset, "Labeled CSV")->required()->check(CLI::ExistingFile);
  load->callback([args] { std::cout << corpus_summary(load_labeled_dataset(args->dataset)).dump(2) << '\n'; });
  auto* split = cmd->add_subcommand("split", "Stratified train/test split");
  split->add_option("--dataset", args->dataset, "Labeled CSV")->required()->check(CLI::ExistingFile);
  split->add_option("--train-fraction", args->train_fraction, "Share of each class kept for training")
      ->check(CLI::Range(0.0, 1.0));
  split->add_option("--seed", args->seed, "Shuffle seed");
  split->add_option("--out", args->out, "Directory for train.csv and test.csv")->required();
  split->callback([args] {
    const auto s = split_train_test(load_labeled_dataset(args->dataset), args->train_fraction, args->seed);
    write_file(std::filesystem::path(args->out) / "train.csv", labeled_csv(s.train));
    write_file(std::filesystem::path(args->out) / "test.csv", labeled_csv(s.test));
    std::cout << json{{"train", corpus_summary(s.train)}, {"test", corpus_summary(s.test)}}.dump(2) << '\n';
  });
}

void add_featurize(CLI::App& app) {
  struct Args {
    std::string dataset;
    std::string out;
    unsigned threads = 0;
    bool http = false;
    ScorerFlags scorer;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("featurize", "Score a labeled corpus into a feature CSV");
  cmd->add_option("--dataset", args->dataset, "Labeled CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args->out, "Feature CSV path")->required();
  cmd->add_option("--threads", args->threads, "Worker threads (0 = all cores)");
  cmd->add_flag("--mock-http", args->http, "Serve mock rules over HTTP instead of in process");
  args->scorer.add_to(*cmd);
  cmd->callback([args] {
    const auto corpus = load_labeled_dataset(args->dataset);
    auto scorers = make_scorers(args->scorer, args->http);
    Dataset d(scorers.registry);
    std::vector<std::string> ids;
    featurize_rows(corpus, scorers, args->threads, d, ids);
    std::ostringstream out;
    write_feature_csv(out, d, ids);
    write_file(args->out, out.str());
    spdlog::info("featurized {} of {} rows", d.rows(), corpus.size());
  });
}

void add_train(CLI::App& app) {
  struct Args {
    std::string dataset;
    std::string out;
    std::uint64_t seed = 0;
    bool sweep = false;
    int k = 10;
    std::string sweep_out;
    unsigned threads = 0;
    GbdtFlags gbdt;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("train", "Train the boosted-tree classifier on a feature CSV");
  cmd->add_option("--dataset", args->dataset, "Feature CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args->out, "Model JSON path")->required();
  cmd->add_option("--seed", args->seed, "Training and balancing seed");
  cmd->add_flag("--sweep", args->sweep, "Pick hyperparameters by cross-validated AUC first");
  cmd->add_option("--k", args->k, "Folds for --sweep")->check(CLI::Range(2, 1000));
  cmd->add_option("--sweep-out", args->sweep_out, "Write sweep results JSON here");
  cmd->add_option("--threads", args->threads, "Fold threads for --sweep (0 = all cores)");
  args->gbdt.add_to(*cmd);
  cmd->callback([args] {
    const auto d = load_feature_csv(args->dataset);
    auto params = args->gbdt.params;
    params.seed = args->seed;
    if (args->sweep) {
      CVOptions o;
      o.k = args->k;
      o.seed = args->seed;
      o.threads = args->threads;
      o.balance = args->gbdt.balancer(args->seed);
      const auto entries = sweep(d, default_sweep_grid(params), o);
      json j = json::array();
      const SweepEntry* best = nullptr;
      for (const auto& e : entries) {
        auto row = e.report.to_json();
        row["num_trees"] = e.params.num_trees;
        row["learning_rate"] = e.params.learning_rate;
        row["max_leaves"] = e.params.max_leaves;
        j.push_back(row);
        if (!best || e.report.mean() > best->report.mean()) best = &e;
      }
      if (!args->sweep_out.empty()) write_file(args->sweep_out, j.dump(2) + "\n");
      params = best->params;
      spdlog::info("sweep best: trees {} lr {} leaves {} mean AUC {:.4f}", params.num_trees, params.learning_rate,
                   params.max_leaves, best->report.mean());
    }
    Dataset train = d;
    if (const auto b = args->gbdt.balancer(args->seed)) train = adasyn(d, *b).data;
    train_gbdt(train, params).save(args->out);
    spdlog::info("trained on {} rows ({} after balancing)", d.rows(), train.rows());
  });
}

void add_hate_train(CLI::App& app) {
  struct Args {
    std::string corpus;
    std::string out;
    HateTrainParams params;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("hate-train", "Train the three-class hate model");
  cmd->add_option("--corpus", args->corpus, "CSV with id,text,label (default: bundled demo)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args->out, "Model JSON path")->required();
  cmd->add_option("--epochs", args->params.epochs, "Gradient steps");
  cmd->add_option("--learning-rate", args->params.learning_rate, "Step size");
  cmd->add_option("--l2", args->params.l2, "Weight decay");
  cmd->callback([args] {
    const auto examples =
        load_hate_corpus(args->corpus.empty() ? data_file("hate_demo.csv") : std::filesystem::path(args->corpus));
    const auto model = HateModel::train(examples, args->params);
    write_file(args->out, model.to_json().dump() + "\n");
    spdlog::info("hate model: {} examples, vocabulary {}", examples.size(), model.vocabulary_size());
  });
}

void add_eval(CLI::App& app) {
  auto args = std::make_shared<EvalArgs>();
  auto* eval = app.add_subcommand("eval", "Evaluation reports");
  eval->require_subcommand(1);

  auto* a = add_eval_mode(*eval, args, "auc", "AUC of a model or column on a feature CSV");
  add_score_source(*a, *args);
  a->callback([args] {
    if (args->model.empty() && args->column.empty()) args->column = std::string(kTriggerAttribute);
    eval_auc(*args);
  });

  for (const auto& [name, desc] : std::vector<std::pair<std::string, std::string>>{
           {"cv", "Stratified k-fold cross-validation"}, {"ablate", "Cross-validated AUC per feature family"}}) {
    auto* cmd = add_eval_mode(*eval, args, name, desc);
    cmd->add_option("--k", args->k, "Folds")->check(CLI::Range(2, 1000));
    cmd->add_option("--threads", args->threads, "Fold threads (0 = all cores)");
    args->gbdt.add_to(*cmd);
    if (name == "cv") {
      cmd->callback([args] { eval_cv(*args); });
    } else {
      cmd->callback([args] { eval_ablate(*args); });
    }
  }

  auto* k = add_eval_mode(*eval, args, "kde", "Per-class score densities");
  add_score_source(*k, *args);
  k->add_option("--bandwidth", args->bandwidth, "Fixed kernel bandwidth (default: Scott's rule)");
  k->callback([args] {
    if (args->model.empty() && args->column.empty()) args->column = std::string(kTriggerAttribute);
    eval_kde(*args);
  });
}

}  // namespace counterbot::cli
