// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/cli/commands.hpp"

#include <fstream>
#include <iomanip>

#include "metagraph/episodes/dump.hpp"
#include "metagraph/evaluation/report.hpp"
#include "metagraph/gnn/checkpoint.hpp"
#include "metagraph/graph/dataset_io.hpp"
#include "metagraph/graph/folds.hpp"
#include "metagraph/graph/tudataset.hpp"
#include "metagraph/random.hpp"
#include "metagraph/training/trainer.hpp"

namespace metagraph::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTagDump = 0x64756d70;

void write_json(const fs::path& file, const json& j) {
  fs::create_directories(file.parent_path().empty() ? fs::path(".") : file.parent_path());
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

graph::FoldSplit pick_fold(const RunConfig& run, const graph::Dataset& d) {
  const auto folds = graph::make_folds(d, run.num_folds, run.train.seed);
  if (run.fold >= folds.size()) {
    throw std::invalid_argument("fold " + std::to_string(run.fold) + " out of range for " +
                                std::to_string(folds.size()) + " folds");
  }
  return folds[run.fold];
}

json identity_json(const RunConfig& run) {
  json j = run_config_to_json(run);
  for (const char* k : {"out", "data_dir", "dataset_path"}) j.erase(k);
  return j;
}

}  // namespace

void echo_config(const RunConfig& run) {
  json j = run_config_to_json(run);
  j["config_hash"] = config_hash(run);
  j["effective_train"] = training::train_config_to_json(effective_train_config(run));
  j["effective_epochs"] = effective_train_config(run).effective_epochs();
  write_json(fs::path(run.out) / "run_config.json", j);
}

int cmd_ingest(const fs::path& directory, const std::string& name, const fs::path& cache, const RunConfig& run,
               Io io) {
  if (!fs::is_directory(directory)) {
    io.err << "ingest: " << directory.string() << " is not a directory\n";
    return kFailed;
  }
  graph::ParseOptions opts;
  opts.append_node_labels = run.append_node_labels;
  const graph::Dataset d = graph::parse_tudataset(directory, name, opts);
  const fs::path target = cache.empty() ? cache_path(data_root(run), name) : cache;
  fs::create_directories(target.parent_path().empty() ? fs::path(".") : target.parent_path());
  graph::save_dataset(d, target);
  std::size_t nodes = 0, edges = 0;
  for (const auto& g : d.graphs) {
    nodes += g.num_nodes;
    edges += g.edges.size();
  }
  io.out << "dataset        " << d.name << '\n'
         << "graphs         " << d.graphs.size() << '\n'
         << "graph classes  " << d.num_graph_classes << '\n'
         << "node classes   " << d.num_node_classes << '\n'
         << "feature dim    " << d.feature_dim << '\n'
         << "nodes          " << nodes << '\n'
         << "edges          " << edges << '\n'
         << "hash           " << graph::dataset_hash(d) << '\n'
         << "cache          " << target.string() << '\n';
  return kOk;
}

int cmd_train(const RunConfig& run, Io io) {
  const std::string hash = config_hash(run);
  const training::TrainConfig config = effective_train_config(run);
  config.validate();
  const graph::Dataset d = load_run_dataset(run);
  const graph::FoldSplit split = pick_fold(run, d);
  const fs::path out(run.out);
  fs::create_directories(out);
  echo_config(run);

  std::ofstream log(out / "train_log.ndjson");
  training::TrainOptions options;
  options.log = &log;
  options.dump_dir = out / "episodes";
  options.log_context = {{"config_hash", hash}};
  const training::TrainResult r = training::train(d, split, config, options);

  gnn::Checkpoint ck;
  ck.params = r.params;
  ck.run_config = identity_json(run);
  ck.config_hash = hash;
  ck.heads_discardable = r.heads_discardable;
  gnn::save_checkpoint(ck, out / "checkpoint.json");
  write_json(out / "train_summary.json", {{"config_hash", hash},
                                          {"dataset", d.name},
                                          {"dataset_hash", graph::dataset_hash(d)},
                                          {"fold", run.fold},
                                          {"mode", training::mode_name(config.mode)},
                                          {"tasks", config.tasks.str()},
                                          {"epochs_run", r.epochs_run},
                                          {"best_epoch", r.best_epoch},
                                          {"initial_validation", r.initial_validation},
                                          {"best_validation", r.best_validation},
                                          {"stopped_early", r.stopped_early},
                                          {"clipped_steps", r.clipped_steps}});
  io.out << "trained " << training::mode_name(config.mode) << " [" << config.tasks.str() << "] on " << d.name
         << " fold " << run.fold << ": " << r.epochs_run << " epochs, best validation " << r.best_validation
         << " at epoch " << r.best_epoch << '\n'
         << "checkpoint " << (out / "checkpoint.json").string() << " (config " << hash << ")\n";
  return kOk;
}

int cmd_eval(const RunConfig& run, const fs::path& checkpoint, std::optional<episodes::TaskKind> transfer, Io io) {
  const gnn::Checkpoint ck = gnn::load_checkpoint(checkpoint);
  const graph::Dataset d = load_run_dataset(run);
  const gnn::GnnConfig& mc = ck.params.config;
  if (mc.feature_dim != d.feature_dim) {
    io.err << "eval: checkpoint feature_dim " << mc.feature_dim << " does not match dataset feature_dim "
           << d.feature_dim << '\n';
    return kFailed;
  }
  if (mc.num_graph_classes != d.num_graph_classes || mc.num_node_classes != d.num_node_classes) {
    io.err << "eval: checkpoint class counts (" << mc.num_graph_classes << " graph, " << mc.num_node_classes
           << " node) do not match the dataset (" << d.num_graph_classes << ", " << d.num_node_classes << ")\n";
    return kFailed;
  }
  const std::string hash = config_hash(run);
  const training::TrainConfig config = effective_train_config(run);
  const graph::FoldSplit split = pick_fold(run, d);
  const std::uint64_t eval_seed = evaluation::fold_eval_seed(run.train.seed, run.fold);
  evaluation::LinearOptions linear;
  linear.c = run.svm_c;
  linear.seed = run.train.seed;

  evaluation::MetricsReport report;
  report.dataset = d.name;
  report.mode = std::string(training::mode_name(config.mode));
  report.tasks = config.tasks.str();
  report.seed = run.train.seed;
  report.config_hash = hash;
  evaluation::FoldResult fold;
  fold.fold = run.fold;
  if (transfer) {
    evaluation::TransferOptions options;
    options.linear_for_meta = run.linear_for_meta;
    options.eval_seed = eval_seed;
    options.linear = linear;
    const bool lin = run.linear_for_meta && training::is_meta_mode(config.mode);
    report.protocol = lin ? "transfer-linear" : "transfer-head";
    fold.metrics[*transfer] = evaluation::transfer_eval(ck.params, config.tasks, *transfer, d, split, config, options);
  } else {
    const evaluation::Protocol p = evaluation::resolve_protocol(run.protocol, config.mode);
    report.protocol = std::string(evaluation::protocol_name(p));
    fold.metrics = evaluation::evaluate_fold(ck.params, d, split, config.tasks, p, eval_seed, linear);
  }
  report.folds.push_back(fold);
  report.summary.clear();
  for (const auto& [task, v] : fold.metrics) report.summary[task] = {v, 0.0};
  evaluation::save_report(report, run.out, "eval");
  echo_config(run);
  for (const auto& [task, v] : fold.metrics) {
    io.out << episodes::task_name(task) << ' ' << evaluation::metric_name(task) << ' ' << std::fixed
           << std::setprecision(2) << v << '\n';
  }
  return kOk;
}

int cmd_episode_dump(const RunConfig& run, Io io) {
  const training::TrainConfig config = effective_train_config(run);
  config.validate();
  const graph::Dataset d = load_run_dataset(run);
  const graph::FoldSplit split = pick_fold(run, d);
  std::vector<const graph::Graph*> graphs;
  for (std::size_t id : split.train_graph_ids) graphs.push_back(&d.graphs.at(id));
  Rng rng(derive_seed(config.seed, {kTagDump}));
  shuffle(graphs, rng);
  graphs.resize(std::min(graphs.size(), config.batch_size));
  const episodes::EpisodeOptions opts{d.num_node_classes};
  const std::uint64_t seed = derive_seed(config.seed, {kTagDump, 1});
  const episodes::MultiTaskEpisode ep =
      config.mode == training::Mode::kAblationConcurrent
          ? episodes::build_concurrent_episode(graphs, config.lambdas, config.tasks, seed, opts)
          : episodes::build_episode(graphs, config.lambdas, config.tasks, seed, opts);
  const std::vector<std::string> violations = episodes::validate_episode(ep);
  json j = episodes::episode_to_json(ep);
  j["config_hash"] = config_hash(run);
  j["violations"] = violations;
  write_json(fs::path(run.out) / "episode.json", j);
  echo_config(run);
  io.out << j.dump(2) << '\n';
  for (const auto& v : violations) io.err << "episode-dump: " << v << '\n';
  return violations.empty() ? kOk : kFailed;
}

}  // namespace metagraph::cli
