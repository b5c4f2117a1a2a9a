// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/evaluation/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metagraph/gnn/model.hpp"
#include "metagraph/log.hpp"
#include "metagraph/random.hpp"
#include "metagraph/training/adam.hpp"
#include "metagraph/training/task_loss.hpp"

namespace metagraph::evaluation {

using ad::Tensor;
using graph::Graph;

namespace {

constexpr std::size_t kEncodeChunk = 64;
constexpr std::uint64_t kTagEval = 0x6576616c;
constexpr std::uint64_t kTagHead = 0x68656164;
constexpr std::uint64_t kTagFold = 0x666f6c64;

/// Final embeddings of each chunk of graphs, as plain tensors.
template <class Fn>
void for_each_chunk(const gnn::ParameterSet& theta, const std::vector<Graph>& graphs, Fn&& fn) {
  for (std::size_t begin = 0; begin < graphs.size(); begin += kEncodeChunk) {
    const std::size_t end = std::min(graphs.size(), begin + kEncodeChunk);
    const std::vector<Graph> part(graphs.begin() + static_cast<std::ptrdiff_t>(begin),
                                  graphs.begin() + static_cast<std::ptrdiff_t>(end));
    const gnn::GraphBatch batch = gnn::GraphBatch::build(part, theta.config.feature_dim);
    ad::Tape tape;
    const gnn::ParamVars vars = gnn::bind_constants(tape, theta);
    const ad::Var h = gnn::encode(vars, theta.config, batch);
    fn(part, batch, vars, h);
  }
}

void require_annotations(const Graph& g, TaskKind kind) {
  const bool ok = kind == TaskKind::kGC   ? g.graph_label.has_value()
                  : kind == TaskKind::kNC ? g.has_node_labels()
                                          : (g.positive_edges && g.negative_edges);
  if (!ok) {
    throw std::invalid_argument("graph " + std::to_string(g.id) + " lacks " +
                                std::string(episodes::task_name(kind)) + " annotations");
  }
}

std::vector<Graph> pick(const graph::Dataset& d, const std::vector<std::size_t>& ids, TaskKind kind,
                        std::uint64_t seed) {
  std::vector<const Graph*> ptrs;
  for (std::size_t id : ids) ptrs.push_back(&d.graphs.at(id));
  return evaluation_graphs(ptrs, kind, seed, d.num_node_classes);
}

std::vector<std::size_t> fit_ids(const graph::FoldSplit& s) {
  std::vector<std::size_t> ids = s.train_graph_ids;
  ids.insert(ids.end(), s.validation_graph_ids.begin(), s.validation_graph_ids.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

double score(const std::vector<int>& predictions, const std::vector<double>& scores,
             const std::vector<int>& labels, TaskKind kind) {
  return 100.0 * (kind == TaskKind::kLP ? roc_auc(scores, labels) : accuracy(predictions, labels));
}

std::vector<std::size_t> selected_folds(const CrossValidationSpec& spec) {
  if (spec.only_folds.empty()) {
    std::vector<std::size_t> all(spec.num_folds);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  for (std::size_t f : spec.only_folds) {
    if (f >= spec.num_folds) throw std::invalid_argument("fold " + std::to_string(f) + " out of range");
  }
  return spec.only_folds;
}

MetricsReport new_report(const graph::Dataset& d, const CrossValidationSpec& spec, const std::string& protocol) {
  MetricsReport r;
  r.dataset = d.name;
  r.mode = std::string(training::mode_name(spec.train.mode));
  r.tasks = spec.train.tasks.str();
  r.protocol = protocol;
  r.seed = spec.train.seed;
  r.config_hash = spec.config_hash;
  return r;
}

void summarise(MetricsReport& r) {
  std::map<TaskKind, std::vector<double>> values;
  for (const auto& f : r.folds) {
    if (!f.error.empty()) {
      r.partial = true;
      continue;
    }
    for (const auto& [task, v] : f.metrics) values[task].push_back(v);
  }
  r.summary.clear();
  for (const auto& [task, v] : values) r.summary[task] = mean_std(v);
}

template <class FoldFn>
MetricsReport run_folds(const graph::Dataset& d, const CrossValidationSpec& spec, MetricsReport report,
                        FoldFn&& fold_fn) {
  const std::vector<graph::FoldSplit> folds = graph::make_folds(d, spec.num_folds, spec.fold_seed);
  for (std::size_t f : selected_folds(spec)) {
    FoldResult result;
    result.fold = f;
    training::TrainConfig c = spec.train;
    c.seed = derive_seed(spec.train.seed, {kTagFold, spec.cell_id, f});
    const std::uint64_t eval_seed = fold_eval_seed(spec.train.seed, f);
    try {
      result.metrics = fold_fn(folds[f], c, eval_seed);
    } catch (const std::exception& e) {
      result.error = e.what();
      log_warning("fold " + std::to_string(f) + " failed: " + e.what());
    }
    report.folds.push_back(std::move(result));
  }
  summarise(report);
  return report;
}

}  // namespace

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kAuto: return "auto";
    case Protocol::kLinear: return "linear";
    case Protocol::kHeads: return "heads";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  for (Protocol p : {Protocol::kAuto, Protocol::kLinear, Protocol::kHeads}) {
    if (protocol_name(p) == name) return p;
  }
  return std::nullopt;
}

Protocol resolve_protocol(Protocol p, training::Mode mode) {
  if (p != Protocol::kAuto) return p;
  return training::is_meta_mode(mode) ? Protocol::kLinear : Protocol::kHeads;
}

std::vector<Graph> evaluation_graphs(std::span<const Graph* const> graphs, TaskKind kind, std::uint64_t seed,
                                     int num_node_classes) {
  const episodes::EpisodeOptions opts{num_node_classes};
  std::vector<Graph> out;
  for (const Graph* g : graphs) {
    Graph copy = *g;
    copy.labelled_nodes.reset();
    copy.positive_edges.reset();
    copy.negative_edges.reset();
    switch (kind) {
      case TaskKind::kGC:
        if (!g->graph_label) continue;
        break;
      case TaskKind::kNC:
        if (!g->has_node_labels()) continue;
        break;
      case TaskKind::kLP: {
        if (!episodes::supports_task(*g, kind, opts)) continue;
        episodes::LpSplit s = episodes::split_edges(*g, derive_seed(seed, {kTagEval, g->id}));
        copy.edges = std::move(s.remaining_edges);
        copy.positive_edges = std::move(s.removed_edges);
        copy.negative_edges = std::move(s.target_negatives);
        break;
      }
    }
    out.push_back(std::move(copy));
  }
  return out;
}

TaskFeatures embed_for_task(const gnn::ParameterSet& theta, const std::vector<Graph>& graphs, TaskKind kind) {
  for (const Graph& g : graphs) require_annotations(g, kind);
  const std::size_t h = theta.config.hidden;
  std::vector<double> rows;
  TaskFeatures out;
  std::size_t width = kind == TaskKind::kLP ? 2 * h : h;
  for_each_chunk(theta, graphs, [&](const std::vector<Graph>& part, const gnn::GraphBatch& batch,
                                    const gnn::ParamVars&, const ad::Var& hv) {
    const Tensor& emb = hv.value();
    auto append_row = [&](std::size_t node) {
      const auto r = emb.row(node);
      rows.insert(rows.end(), r.begin(), r.end());
    };
    for (std::size_t gi = 0; gi < part.size(); ++gi) {
      const Graph& g = part[gi];
      const std::size_t off = batch.offsets[gi];
      switch (kind) {
        case TaskKind::kGC: {
          std::vector<double> mean(h, 0.0);
          for (std::size_t v = 0; v < g.num_nodes; ++v) {
            const auto r = emb.row(off + v);
            for (std::size_t k = 0; k < h; ++k) mean[k] += r[k];
          }
          for (double& x : mean) x /= static_cast<double>(g.num_nodes);
          rows.insert(rows.end(), mean.begin(), mean.end());
          out.labels.push_back(*g.graph_label);
          break;
        }
        case TaskKind::kNC: {
          auto add_node = [&](std::size_t v) {
            append_row(off + v);
            out.labels.push_back(g.node_labels[v]);
          };
          if (g.labelled_nodes) {
            for (std::size_t v : *g.labelled_nodes) add_node(v);
          } else {
            for (std::size_t v = 0; v < g.num_nodes; ++v) add_node(v);
          }
          break;
        }
        case TaskKind::kLP: {
          for (int label : {1, 0}) {
            for (const auto& e : label == 1 ? *g.positive_edges : *g.negative_edges) {
              const auto c = e.canonical();
              append_row(off + c.u);
              append_row(off + c.v);
              out.labels.push_back(label);
            }
          }
          break;
        }
      }
    }
  });
  out.features = Tensor(out.labels.size(), width, std::move(rows));
  return out;
}

double head_metric(const gnn::ParameterSet& theta, const std::vector<Graph>& graphs, TaskKind kind) {
  for (const Graph& g : graphs) require_annotations(g, kind);
  std::vector<int> predictions, labels;
  std::vector<double> scores;
  for_each_chunk(theta, graphs, [&](const std::vector<Graph>& part, const gnn::GraphBatch& batch,
                                    const gnn::ParamVars& vars, const ad::Var& h) {
    const training::TaskView view = training::TaskView::build(
        kind, part, theta.config.feature_dim, std::make_shared<const gnn::GraphBatch>(batch));
    Tensor logits;
    switch (kind) {
      case TaskKind::kGC: logits = gnn::gc_logits(h, batch, vars).value(); break;
      case TaskKind::kNC: logits = gnn::nc_logits(ad::gather_rows(h, view.nodes), vars).value(); break;
      case TaskKind::kLP: {
        std::vector<graph::Edge> pairs;
        for (const auto& e : view.pairs) pairs.push_back(e.canonical());
        logits = gnn::lp_logits(h, pairs, vars).value();
        break;
      }
    }
    for (std::size_t r = 0; r < logits.rows(); ++r) {
      const auto row = logits.row(r);
      predictions.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
      scores.push_back(row[0]);
    }
    labels.insert(labels.end(), view.labels.begin(), view.labels.end());
  });
  return score(predictions, scores, labels, kind);
}

double linear_metric(const gnn::ParameterSet& theta, const std::vector<Graph>& train, const std::vector<Graph>& test,
                     TaskKind kind, const LinearOptions& options) {
  const TaskFeatures fit = embed_for_task(theta, train, kind);
  const TaskFeatures eval = embed_for_task(theta, test, kind);
  const LinearClassifier clf = train_linear(fit.features, fit.labels, options);
  std::vector<int> predictions;
  std::vector<double> scores;
  if (kind == TaskKind::kLP) {
    scores = clf.scores(eval.features);
  } else {
    predictions = clf.predict(eval.features);
  }
  return score(predictions, scores, eval.labels, kind);
}

gnn::ParameterSet train_fresh_head(const gnn::ParameterSet& theta, TaskKind kind, const std::vector<Graph>& train,
                                   const std::vector<Graph>& validation, const training::TrainConfig& config) {
  if (train.empty()) throw std::invalid_argument("train_fresh_head: no training graphs");
  const gnn::Part part = kind == TaskKind::kGC ? gnn::Part::kGc : kind == TaskKind::kNC ? gnn::Part::kNc : gnn::Part::kLp;
  gnn::ParameterSet current = theta;
  const gnn::ParameterSet fresh = gnn::init_parameters(theta.config, derive_seed(config.seed, {kTagHead}));
  std::vector<std::size_t> head_ids;
  for (std::size_t id = 0; id < gnn::kNumParams; ++id) {
    if (gnn::part_of(id) != part) continue;
    current[id] = fresh[id];
    head_ids.push_back(id);
  }

  struct Frozen {
    training::TaskView view;
    Tensor embedding;
  };
  const auto freeze = [&](const std::vector<Graph>& graphs) {
    Frozen f;
    f.view = training::TaskView::build(kind, graphs, theta.config.feature_dim);
    ad::Tape tape;
    f.embedding = gnn::encode(gnn::bind_constants(tape, theta), theta.config, *f.view.batch).value();
    return f;
  };
  const Frozen fit = freeze(train);
  const std::optional<Frozen> val = validation.empty() ? std::nullopt : std::optional<Frozen>(freeze(validation));

  const auto loss_of = [&](const gnn::ParameterSet& p, const Frozen& f, std::vector<Tensor>* grads) {
    ad::Tape tape;
    gnn::ParamVars vars = gnn::bind_constants(tape, p);
    std::vector<ad::Var> wrt;
    for (std::size_t id : head_ids) {
      vars[id] = tape.parameter(p[id]);
      wrt.push_back(vars[id]);
    }
    const ad::Var l = training::task_loss_from_embedding(tape.constant(f.embedding), vars, f.view);
    if (grads) {
      grads->clear();
      for (const ad::Var& g : tape.gradients(l, wrt)) grads->push_back(g.value());
    }
    return l.value().item();
  };

  training::TrainConfig head_config = config;
  head_config.mode = training::Mode::kClassicalSingle;
  head_config.tasks = episodes::TaskSet{kind};
  const std::size_t epochs = head_config.effective_epochs();

  training::AdamState adam;
  gnn::ParameterSet best = current;
  double best_loss = val ? loss_of(current, *val, nullptr) : INFINITY;
  std::size_t stale = 0;
  std::vector<Tensor> grads;
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    loss_of(current, fit, &grads);
    std::vector<Tensor> head;
    for (std::size_t id : head_ids) head.push_back(current[id]);
    training::adam_step(adam, head, grads, config.outer_lr);
    for (std::size_t k = 0; k < head_ids.size(); ++k) current[head_ids[k]] = std::move(head[k]);
    if (!val || (epoch % config.eval_every != 0 && epoch != epochs)) continue;
    const double v = loss_of(current, *val, nullptr);
    if (v < best_loss) {
      best_loss = v;
      best = current;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return val ? best : current;
}

std::vector<std::size_t> MetricsReport::failed_folds() const {
  std::vector<std::size_t> out;
  for (const auto& f : folds) {
    if (!f.error.empty()) out.push_back(f.fold);
  }
  return out;
}

MetricsReport cross_validate(const graph::Dataset& d, const CrossValidationSpec& spec) {
  spec.train.validate();
  const Protocol protocol = resolve_protocol(spec.protocol, spec.train.mode);
  return run_folds(d, spec, new_report(d, spec, std::string(protocol_name(protocol))),
                   [&](const graph::FoldSplit& split, const training::TrainConfig& c, std::uint64_t eval_seed) {
                     const training::TrainResult trained = training::train(d, split, c, spec.train_options);
                     return evaluate_fold(trained.params, d, split, c.tasks, protocol, eval_seed, spec.linear);
                   });
}

std::map<TaskKind, double> evaluate_fold(const gnn::ParameterSet& theta, const graph::Dataset& d,
                                         const graph::FoldSplit& split, const episodes::TaskSet& tasks,
                                         Protocol protocol, std::uint64_t eval_seed, const LinearOptions& linear) {
  if (protocol == Protocol::kAuto) throw std::invalid_argument("evaluate_fold: protocol must be resolved");
  std::map<TaskKind, double> metrics;
  for (TaskKind kind : tasks.kinds()) {
    const std::vector<Graph> test = pick(d, split.test_graph_ids, kind, eval_seed);
    if (protocol == Protocol::kHeads) {
      metrics[kind] = head_metric(theta, test, kind);
    } else {
      metrics[kind] = linear_metric(theta, pick(d, fit_ids(split), kind, eval_seed), test, kind, linear);
    }
  }
  return metrics;
}

std::uint64_t fold_eval_seed(std::uint64_t base_seed, std::size_t fold) {
  return derive_seed(base_seed, {kTagEval, fold});
}

double transfer_eval(const gnn::ParameterSet& model, const episodes::TaskSet& trained_tasks, TaskKind unseen,
                     const graph::Dataset& d, const graph::FoldSplit& split, const training::TrainConfig& config,
                     const TransferOptions& options) {
  if (trained_tasks.contains(unseen)) {
    throw std::invalid_argument("transfer_eval: task " + std::string(episodes::task_name(unseen)) +
                                " was seen during training");
  }
  if (model.config.feature_dim != d.feature_dim) {
    throw std::invalid_argument("transfer_eval: model feature_dim does not match the dataset");
  }
  const std::uint64_t eval_seed = options.eval_seed.value_or(derive_seed(config.seed, {kTagEval}));
  const std::vector<Graph> test = pick(d, split.test_graph_ids, unseen, eval_seed);
  if (options.linear_for_meta && training::is_meta_mode(config.mode)) {
    return linear_metric(model, pick(d, fit_ids(split), unseen, eval_seed), test, unseen, options.linear);
  }
  const gnn::ParameterSet with_head =
      train_fresh_head(model, unseen, pick(d, split.train_graph_ids, unseen, eval_seed),
                       pick(d, split.validation_graph_ids, unseen, eval_seed), config);
  return head_metric(with_head, test, unseen);
}

MetricsReport cross_validate_transfer(const graph::Dataset& d, const CrossValidationSpec& spec, TaskKind unseen,
                                      const TransferOptions& options) {
  spec.train.validate();
  if (spec.train.tasks.contains(unseen)) {
    throw std::invalid_argument("cross_validate_transfer: unseen task is among the training tasks");
  }
  const bool linear = options.linear_for_meta && training::is_meta_mode(spec.train.mode);
  MetricsReport report = new_report(d, spec, linear ? "transfer-linear" : "transfer-head");
  return run_folds(d, spec, std::move(report),
                   [&](const graph::FoldSplit& split, const training::TrainConfig& c, std::uint64_t eval_seed) {
                     const training::TrainResult trained = training::train(d, split, c, spec.train_options);
                     TransferOptions fold_options = options;
                     fold_options.eval_seed = eval_seed;
                     fold_options.linear = spec.linear;
                     return std::map<TaskKind, double>{
                         {unseen, transfer_eval(trained.params, c.tasks, unseen, d, split, c, fold_options)}};
  });
}

void attach_delta_m(MetricsReport& report, const std::map<TaskKind, MetricsReport>& baselines) {
  report.baseline.clear();
  report.delta_m_folds.clear();
  report.delta_m_per_fold.clear();
  report.delta_m.reset();
  std::vector<TaskKind> tasks;
  for (const auto& [task, _] : report.summary) tasks.push_back(task);
  if (tasks.empty()) return;
  for (TaskKind t : tasks) {
    if (!baselines.count(t)) {
      throw std::invalid_argument("attach_delta_m: no baseline for task " + std::string(episodes::task_name(t)));
    }
  }
  const auto baseline_value = [&](TaskKind t, std::size_t fold) -> std::optional<double> {
    for (const auto& f : baselines.at(t).folds) {
      if (f.fold == fold && f.error.empty() && f.metrics.count(t)) return f.metrics.at(t);
    }
    return std::nullopt;
  };
  for (const auto& f : report.folds) {
    if (!f.error.empty()) continue;
    std::vector<double> multi, base;
    for (TaskKind t : tasks) {
      const auto b = baseline_value(t, f.fold);
      if (!b || !f.metrics.count(t)) break;
      multi.push_back(f.metrics.at(t));
      base.push_back(*b);
    }
    if (multi.size() != tasks.size()) continue;
    for (std::size_t k = 0; k < tasks.size(); ++k) report.baseline[tasks[k]].push_back(base[k]);
    report.delta_m_folds.push_back(f.fold);
    report.delta_m_per_fold.push_back(delta_m(multi, base));
  }
  if (!report.delta_m_per_fold.empty()) report.delta_m = mean_std(report.delta_m_per_fold);
}

}  // namespace metagraph::evaluation
