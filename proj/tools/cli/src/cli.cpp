// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include "metagraph/cli/commands.hpp"
#include "metagraph/gnn/checkpoint.hpp"
#include "metagraph/graph/tudataset.hpp"

namespace metagraph::cli {

namespace {

struct Flags {
  std::string config, mode, tasks, out, dataset, data_dir, dataset_path, protocol;
  std::uint64_t seed = 0;
  std::size_t epochs = 0, fold = 0, folds = 0, hidden = 0, batch_size = 0;
  std::vector<std::size_t> only_folds;
  double inner_lr = 0, outer_lr = 0;
  bool first_order = false, quick = false, linear_for_meta = false;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const { return opts.count(name) && opts.at(name)->count() > 0; }
};

void add_run_options(CLI::App* app, Flags& f) {
  f.opts["config"] = app->add_option("--config", f.config, "Run configuration JSON");
  f.opts["mode"] = app->add_option("--mode", f.mode, "Training mode");
  f.opts["tasks"] = app->add_option("--tasks", f.tasks, "Comma-separated tasks, e.g. gc,nc,lp");
  f.opts["seed"] = app->add_option("--seed", f.seed, "Base seed");
  f.opts["epochs"] = app->add_option("--epochs", f.epochs, "Epoch budget");
  f.opts["inner-lr"] = app->add_option("--inner-lr", f.inner_lr, "Inner-loop step size");
  f.opts["outer-lr"] = app->add_option("--outer-lr", f.outer_lr, "Outer (Adam) learning rate");
  f.opts["first-order"] = app->add_flag("--first-order", f.first_order, "First-order meta-gradient");
  f.opts["quick"] = app->add_flag("--quick", f.quick, "Scale epochs and batches down 100x");
  f.opts["out"] = app->add_option("--out", f.out, "Output directory");
  f.opts["dataset"] = app->add_option("--dataset", f.dataset, "Dataset name, or 'synthetic'");
  f.opts["data-dir"] = app->add_option("--data-dir", f.data_dir, "Dataset root");
  f.opts["dataset-path"] = app->add_option("--dataset-path", f.dataset_path, "TUDataset directory or cache file");
  f.opts["protocol"] = app->add_option("--protocol", f.protocol, "auto, linear or heads");
  f.opts["fold"] = app->add_option("--fold", f.fold, "Fold index");
  f.opts["folds"] = app->add_option("--folds", f.folds, "Number of folds");
  f.opts["only-folds"] = app->add_option("--only-folds", f.only_folds, "Restrict reproduce to these folds");
  f.opts["hidden"] = app->add_option("--hidden", f.hidden, "Embedding width");
  f.opts["batch-size"] = app->add_option("--batch-size", f.batch_size, "Graphs per batch or episode");
  f.opts["linear-for-meta"] =
      app->add_flag("--linear-for-meta", f.linear_for_meta, "Score transfer of meta-trained models linearly");
}

RunConfig resolve(const Flags& f, RunConfig base) {
  RunConfig r = f.given("config") ? load_run_config(f.config, std::move(base)) : std::move(base);
  auto& t = r.train;
  if (f.given("mode")) {
    const auto m = training::parse_mode(f.mode);
    if (!m) throw CLI::ValidationError("--mode", "unknown mode '" + f.mode + "'");
    t.mode = *m;
  }
  if (f.given("tasks")) t.tasks = episodes::TaskSet::parse(f.tasks);
  if (f.given("seed")) t.seed = f.seed;
  if (f.given("epochs")) t.epochs = f.epochs;
  if (f.given("inner-lr")) t.inner_lr = f.inner_lr;
  if (f.given("outer-lr")) t.outer_lr = f.outer_lr;
  if (f.given("first-order")) t.first_order = f.first_order;
  if (f.given("hidden")) t.hidden = f.hidden;
  if (f.given("batch-size")) t.batch_size = f.batch_size;
  if (f.given("quick")) r.quick = f.quick;
  if (f.given("out")) r.out = f.out;
  if (f.given("dataset")) r.dataset = f.dataset;
  if (f.given("data-dir")) r.data_dir = f.data_dir;
  if (f.given("dataset-path")) r.dataset_path = f.dataset_path;
  if (f.given("fold")) r.fold = f.fold;
  if (f.given("folds")) r.num_folds = f.folds;
  if (f.given("only-folds")) r.only_folds = f.only_folds;
  if (f.given("linear-for-meta")) r.linear_for_meta = f.linear_for_meta;
  if (f.given("protocol")) {
    const auto p = evaluation::parse_protocol(f.protocol);
    if (!p) throw CLI::ValidationError("--protocol", "unknown protocol '" + f.protocol + "'");
    r.protocol = *p;
  }
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, Io io) {
  CLI::App app{"metagraph: multi-task graph embeddings via episodic meta-learning"};
  app.require_subcommand(1);

  std::string ingest_dir, ingest_name, ingest_out;
  CLI::App* ingest = app.add_subcommand("ingest", "Parse a TUDataset directory into the dataset cache");
  ingest->add_option("path", ingest_dir, "TUDataset directory")->required();
  ingest->add_option("--name", ingest_name, "File prefix; defaults to the directory name");
  ingest->add_option("--out", ingest_out, "Cache file; defaults to <data root>/cache/<name>.json");
  std::string ingest_data_dir;
  ingest->add_option("--data-dir", ingest_data_dir, "Dataset root");

  Flags train_flags, eval_flags, dump_flags, repro_flags;
  CLI::App* train = app.add_subcommand("train", "Train one model on one fold");
  add_run_options(train, train_flags);

  CLI::App* eval = app.add_subcommand("eval", "Score a checkpoint on a fold's test graphs");
  add_run_options(eval, eval_flags);
  std::string checkpoint, transfer;
  eval->add_option("--checkpoint", checkpoint, "Checkpoint JSON")->required();
  eval->add_option("--transfer", transfer, "Score an unseen task with a fresh head");

  CLI::App* dump = app.add_subcommand("episode-dump", "Write one multi-task episode as JSON");
  add_run_options(dump, dump_flags);

  CLI::App* repro = app.add_subcommand("reproduce", "Cross-validate every cell of a results table");
  add_run_options(repro, repro_flags);
  std::string table;
  repro->add_option("table", table, "Table id")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) {
      RunConfig r;
      r.data_dir = ingest_data_dir;
      std::filesystem::path dir(ingest_dir);
      if (dir.filename().empty()) dir = dir.parent_path();
      return cmd_ingest(dir, ingest_name.empty() ? dir.filename().string() : ingest_name, ingest_out, r, io);
    }
    if (*train) return cmd_train(resolve(train_flags, {}), io);
    if (*eval) {
      RunConfig base;
      const gnn::Checkpoint ck = gnn::load_checkpoint(checkpoint);
      if (ck.run_config.is_object() && !ck.run_config.empty()) base = run_config_from_json(ck.run_config);
      std::optional<episodes::TaskKind> unseen;
      if (!transfer.empty()) {
        unseen = episodes::parse_task(transfer);
        if (!unseen) throw CLI::ValidationError("--transfer", "unknown task '" + transfer + "'");
      }
      return cmd_eval(resolve(eval_flags, base), checkpoint, unseen, io);
    }
    if (*dump) return cmd_episode_dump(resolve(dump_flags, {}), io);
    if (*repro) return cmd_reproduce(resolve(repro_flags, {}), table, io);
  } catch (const CLI::Error& e) {
    io.err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const graph::ParseError& e) {
    io.err << e.what() << '\n';
    return kFailed;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}

}  // namespace metagraph::cli
