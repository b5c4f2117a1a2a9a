// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "metagraph/episodes/dump.hpp"
#include "metagraph/log.hpp"
#include "metagraph/random.hpp"
#include "metagraph/training/meta.hpp"

namespace metagraph::training {

using episodes::TaskKind;
using episodes::TaskSet;
using graph::Dataset;
using graph::Graph;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTagInit = 0x696e6974;
constexpr std::uint64_t kTagShuffle = 0x73687566;
constexpr std::uint64_t kTagEpisode = 0x65706973;
constexpr std::uint64_t kTagValidation = 0x76616c;
constexpr std::uint64_t kTagLpSplit = 0x6c7073;

std::vector<const Graph*> select(const Dataset& d, const std::vector<std::size_t>& ids) {
  std::vector<const Graph*> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    if (id >= d.graphs.size()) throw std::out_of_range("graph id " + std::to_string(id) + " outside dataset");
    out.push_back(&d.graphs[id]);
  }
  return out;
}

/// ceil(n / batch) chunks whose sizes differ by at most one.
std::vector<std::vector<const Graph*>> chunk(const std::vector<const Graph*>& graphs, std::size_t batch) {
  std::vector<std::vector<const Graph*>> out;
  if (graphs.empty()) return out;
  const std::size_t count = (graphs.size() + batch - 1) / batch;
  out.resize(count);
  for (std::size_t i = 0; i < graphs.size(); ++i) out[i * count / graphs.size()].push_back(graphs[i]);
  return out;
}

json losses_json(const TaskLosses& losses) {
  json j = json::object();
  for (TaskKind k : episodes::kAllTasks) {
    const double v = losses[static_cast<std::size_t>(k)];
    if (!std::isnan(v)) j[std::string(episodes::task_name(k))] = v;
  }
  return j;
}

struct Accumulator {
  TaskLosses sum = no_task_losses();
  std::array<std::size_t, 3> count{};
  double objective = 0.0;
  std::size_t steps = 0;
  std::size_t clipped = 0;

  void add(const UpdateInfo& info) {
    objective += info.objective;
    ++steps;
    if (info.clipped) ++clipped;
    add_losses(info.task_losses);
  }
  void add_losses(const TaskLosses& l) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (std::isnan(l[k])) continue;
      sum[k] = std::isnan(sum[k]) ? l[k] : sum[k] + l[k];
      ++count[k];
    }
  }
  TaskLosses mean() const {
    TaskLosses m = sum;
    for (std::size_t k = 0; k < 3; ++k) {
      if (count[k] > 0) m[k] /= static_cast<double>(count[k]);
    }
    return m;
  }
};

/// Shared epoch loop with periodic validation and patience-based stopping.
class Loop {
 public:
  Loop(const TrainConfig& config, const TrainOptions& options) : config_(config), options_(options) {}

  using EpochFn = std::function<Accumulator(std::size_t epoch, gnn::ParameterSet& theta)>;
  using ValidateFn = std::function<ObjectiveValue(const gnn::ParameterSet& theta)>;

  TrainResult run(gnn::ParameterSet theta, std::size_t epochs, const EpochFn& epoch_fn,
                  const ValidateFn& validate) {
    start_ = std::chrono::steady_clock::now();
    TrainResult r;
    r.params = theta;
    const ObjectiveValue initial = validate(theta);
    record_validation(r, 0, initial);
    r.initial_validation = r.best_validation = initial.value;
    std::size_t stale = 0;
    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
      const Accumulator acc = epoch_fn(epoch, theta);
      r.epochs_run = epoch;
      r.clipped_steps += acc.clipped;
      emit(r, json{{"epoch", epoch},
                   {"split", "train"},
                   {"loss", losses_json(acc.mean())},
                   {"objective", acc.steps ? acc.objective / static_cast<double>(acc.steps) : 0.0},
                   {"steps", acc.steps},
                   {"clipped", acc.clipped},
                   {"wall_time", elapsed()}});
      if (epoch % config_.eval_every != 0 && epoch != epochs) continue;
      const ObjectiveValue v = validate(theta);
      record_validation(r, epoch, v);
      if (v.value < r.best_validation) {
        r.best_validation = v.value;
        r.best_epoch = epoch;
        r.params = theta;
        stale = 0;
      } else if (++stale >= config_.patience && epoch != epochs) {
        r.stopped_early = true;
        break;
      }
    }
    return r;
  }

 private:
  void record_validation(TrainResult& r, std::size_t epoch, const ObjectiveValue& v) {
    emit(r, json{{"epoch", epoch},
                 {"split", "validation"},
                 {"loss", losses_json(v.task_losses)},
                 {"objective", v.value},
                 {"wall_time", elapsed()}});
  }

  void emit(TrainResult& r, json record) {
    record.update(options_.log_context);
    if (options_.log) *options_.log << record.dump() << '\n';
    r.log.push_back(std::move(record));
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  const TrainConfig& config_;
  const TrainOptions& options_;
  std::chrono::steady_clock::time_point start_;
};

InnerLoop inner_loop(const TrainConfig& c) {
  return InnerLoop{c.inner_lr, c.inner_steps, c.adapts_backbone() ? gnn::PartSet::all() : gnn::PartSet::heads(),
                   c.first_order};
}

std::optional<episodes::MultiTaskEpisode> try_episode(const std::vector<const Graph*>& batch,
                                                      const TrainConfig& c, const Dataset& d, std::uint64_t seed) {
  const episodes::EpisodeOptions opts{d.num_node_classes};
  try {
    if (c.mode == Mode::kAblationConcurrent) {
      return episodes::build_concurrent_episode(batch, c.lambdas, c.tasks, seed, opts);
    }
    return episodes::build_episode(batch, c.lambdas, c.tasks, seed, opts);
  } catch (const std::invalid_argument& e) {
    log_warning(std::string("skipping episode: ") + e.what());
    return std::nullopt;
  }
}

void dump_offending(const TrainOptions& options, const episodes::MultiTaskEpisode& ep) {
  if (options.dump_dir.empty()) return;
  std::filesystem::create_directories(options.dump_dir);
  const auto file = options.dump_dir / ("nonfinite_episode_" + std::to_string(ep.id) + ".json");
  json j = episodes::episode_to_json(ep);
  j.update(options.log_context);
  std::ofstream(file) << j.dump(2) << '\n';
  log_warning("offending episode written to " + file.string());
}

/// LP view of a graph: topology without the held-out edges, which become
/// the positive queries alongside an equal share of negatives.
Graph lp_query_graph(const Graph& g, std::uint64_t seed) {
  episodes::LpSplit s = episodes::split_edges(g, seed);
  Graph out = g;
  out.labelled_nodes.reset();
  out.edges = std::move(s.remaining_edges);
  out.positive_edges = std::move(s.removed_edges);
  out.negative_edges = std::move(s.target_negatives);
  return out;
}

/// Views of every active task over one set of graphs, each graph serving
/// all tasks it supports.
std::vector<TaskView> classical_views(const std::vector<const Graph*>& graphs, const TaskSet& tasks,
                                      const Dataset& d, std::uint64_t seed) {
  const episodes::EpisodeOptions opts{d.num_node_classes};
  std::vector<TaskView> views;
  std::vector<Graph> full_gc, full_nc, lp;
  for (const Graph* g : graphs) {
    if (tasks.contains(TaskKind::kGC) && g->graph_label) full_gc.push_back(*g);
    if (tasks.contains(TaskKind::kNC) && g->has_node_labels()) full_nc.push_back(*g);
    if (tasks.contains(TaskKind::kLP) && episodes::supports_task(*g, TaskKind::kLP, opts)) {
      lp.push_back(lp_query_graph(*g, derive_seed(seed, {kTagLpSplit, g->id})));
    }
  }
  std::shared_ptr<const gnn::GraphBatch> shared;
  if (!full_gc.empty()) {
    views.push_back(TaskView::build(TaskKind::kGC, full_gc, d.feature_dim));
    shared = views.back().batch;
  }
  if (!full_nc.empty()) {
    // GC and NC share the full topology when they cover the same graphs
    const bool same = full_nc.size() == full_gc.size() &&
                      std::equal(full_nc.begin(), full_nc.end(), full_gc.begin(),
                                 [](const Graph& a, const Graph& b) { return a.id == b.id; });
    views.push_back(TaskView::build(TaskKind::kNC, full_nc, d.feature_dim, same ? shared : nullptr));
  }
  if (!lp.empty()) views.push_back(TaskView::build(TaskKind::kLP, lp, d.feature_dim));
  return views;
}

ObjectiveValue evaluate_views(const gnn::ParameterSet& theta, const std::vector<TaskView>& views,
                              const episodes::Lambdas& lambdas) {
  ad::Tape tape;
  const gnn::ParamVars vars = gnn::bind_constants(tape, theta);
  ObjectiveValue out;
  std::map<const gnn::GraphBatch*, ad::Var> cache;
  for (const TaskView& v : views) {
    auto it = cache.find(v.batch.get());
    if (it == cache.end()) it = cache.emplace(v.batch.get(), gnn::encode(vars, theta.config, *v.batch)).first;
    const double l = task_loss_from_embedding(it->second, vars, v).value().item();
    out.task_losses[static_cast<std::size_t>(v.kind)] = l;
    out.value += lambdas[v.kind] * l;
  }
  return out;
}

TrainResult classical_loop(gnn::ParameterSet theta, const Dataset& d, const graph::FoldSplit& split,
                           const TrainConfig& c, std::size_t epochs, const TrainOptions& options) {
  const std::vector<const Graph*> train = select(d, split.train_graph_ids);
  const std::vector<const Graph*> val = select(d, split.validation_graph_ids);
  if (train.empty()) throw std::invalid_argument("train_classical: no training graphs");
  const std::vector<TaskView> val_views = classical_views(val, c.tasks, d, derive_seed(c.seed, {kTagValidation}));
  if (val_views.empty()) throw std::invalid_argument("train_classical: empty validation set");

  AdamState adam;
  Loop loop(c, options);
  const auto epoch_fn = [&](std::size_t epoch, gnn::ParameterSet& th) {
    Accumulator acc;
    std::vector<const Graph*> order = train;
    Rng rng(derive_seed(c.seed, {kTagShuffle, epoch}));
    shuffle(order, rng);
    const auto batches = chunk(order, c.batch_size);
    for (std::size_t b = 0; b < c.batches_per_epoch(batches.size()); ++b) {
      const auto views = classical_views(batches[b], c.tasks, d, derive_seed(c.seed, {kTagLpSplit, epoch, b}));
      if (views.empty()) continue;
      acc.add(classical_update(th, views, c.lambdas, adam, c.outer_lr, c.clip_norm));
    }
    return acc;
  };
  const auto validate = [&](const gnn::ParameterSet& th) { return evaluate_views(th, val_views, c.lambdas); };
  return loop.run(std::move(theta), epochs, epoch_fn, validate);
}

}  // namespace

gnn::GnnConfig model_config(const Dataset& dataset, const TrainConfig& config) {
  gnn::GnnConfig g;
  g.feature_dim = dataset.feature_dim;
  g.hidden = config.hidden;
  g.num_node_classes = dataset.num_node_classes;
  g.num_graph_classes = dataset.num_graph_classes;
  g.unit_norm = config.unit_norm;
  g.residual = config.residual;
  return g;
}

TrainResult train_same(const Dataset& d, const graph::FoldSplit& split, const TrainConfig& c,
                       const TrainOptions& options) {
  c.validate();
  if (!is_meta_mode(c.mode)) {
    throw std::invalid_argument("train_same: mode " + std::string(mode_name(c.mode)) + " is not a meta mode");
  }
  const std::vector<const Graph*> train_graphs = select(d, split.train_graph_ids);
  const std::vector<const Graph*> val_graphs = select(d, split.validation_graph_ids);

  std::vector<PreparedEpisode> val_episodes;
  const auto val_chunks = chunk(val_graphs, c.batch_size);
  for (std::size_t i = 0; i < val_chunks.size(); ++i) {
    if (auto ep = try_episode(val_chunks[i], c, d, derive_seed(c.seed, {kTagValidation, i}))) {
      val_episodes.push_back(prepare_episode(*ep, d.feature_dim));
    }
  }
  if (val_episodes.empty()) throw std::invalid_argument("train_same: no usable validation episodes");

  const InnerLoop inner = inner_loop(c);
  AdamState adam;
  Loop loop(c, options);
  const auto epoch_fn = [&](std::size_t epoch, gnn::ParameterSet& theta) {
    Accumulator acc;
    std::vector<const Graph*> order = train_graphs;
    Rng rng(derive_seed(c.seed, {kTagShuffle, epoch}));
    shuffle(order, rng);
    const auto batches = chunk(order, c.batch_size);
    for (std::size_t b = 0; b < c.batches_per_epoch(batches.size()); ++b) {
      const auto ep = try_episode(batches[b], c, d, derive_seed(c.seed, {kTagEpisode, epoch, b}));
      if (!ep) continue;
      const PreparedEpisode prepared = prepare_episode(*ep, d.feature_dim);
      try {
        acc.add(meta_update(theta, std::span(&prepared, 1), adam, inner, c.outer_lr, c.clip_norm));
      } catch (const std::runtime_error&) {
        dump_offending(options, *ep);
        throw;
      }
    }
    return acc;
  };
  const auto validate = [&](const gnn::ParameterSet& theta) {
    Accumulator acc;
    ObjectiveValue total;
    for (const auto& ep : val_episodes) {
      const ObjectiveValue v = evaluate_meta_objective(theta, ep, inner);
      total.value += v.value;
      acc.add_losses(v.task_losses);
    }
    total.task_losses = acc.mean();
    return total;
  };
  gnn::ParameterSet theta = gnn::init_parameters(model_config(d, c), derive_seed(c.seed, {kTagInit}));
  TrainResult r = loop.run(std::move(theta), c.effective_epochs(), epoch_fn, validate);
  r.heads_discardable = true;
  return r;
}

TrainResult train_classical(const Dataset& d, const graph::FoldSplit& split, const TrainConfig& c,
                            const TrainOptions& options) {
  c.validate();
  if (c.mode == Mode::kAblationConcurrent) return train_same(d, split, c, options);
  if (c.mode != Mode::kClassicalSingle && c.mode != Mode::kClassicalMulti) {
    throw std::invalid_argument("train_classical: mode " + std::string(mode_name(c.mode)) +
                                " is not a classical mode");
  }
  gnn::ParameterSet theta = gnn::init_parameters(model_config(d, c), derive_seed(c.seed, {kTagInit}));
  return classical_loop(std::move(theta), d, split, c, c.effective_epochs(), options);
}

TrainResult fine_tune(const gnn::ParameterSet& theta_all, const Dataset& d, const graph::FoldSplit& split,
                      const TaskSet& task_pair, const TrainConfig& config, const TrainOptions& options) {
  if (task_pair.size() != 2) {
    throw std::invalid_argument("fine_tune: expected two tasks, got '" + task_pair.str() + "'");
  }
  if (theta_all.config.feature_dim != d.feature_dim) {
    throw std::invalid_argument("fine_tune: model feature_dim does not match the dataset");
  }
  TrainConfig c = config;
  c.mode = Mode::kClassicalMulti;
  c.tasks = task_pair;
  c.validate();
  return classical_loop(theta_all, d, split, c, c.effective_epochs(), options);
}

TrainResult train(const Dataset& d, const graph::FoldSplit& split, const TrainConfig& c,
                  const TrainOptions& options) {
  c.validate();
  switch (c.mode) {
    case Mode::kISame:
    case Mode::kESame:
    case Mode::kAblationSingleTaskSame:
      return train_same(d, split, c, options);
    case Mode::kClassicalSingle:
    case Mode::kClassicalMulti:
    case Mode::kAblationConcurrent:
      return train_classical(d, split, c, options);
    case Mode::kFineTune: {
      TrainConfig all = c;
      all.mode = Mode::kClassicalMulti;
      all.tasks = TaskSet::all();
      const TrainResult base = train_classical(d, split, all, options);
      return fine_tune(base.params, d, split, c.tasks, c, options);
    }
  }
  throw std::logic_error("train: unknown mode");
}

}  // namespace metagraph::training
