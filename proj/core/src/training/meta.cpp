// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/training/meta.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "metagraph/log.hpp"

namespace metagraph::training {

using ad::Tensor;
using ad::Var;
using episodes::TaskKind;
using gnn::ParamVars;

namespace {

Var accumulate(const Var& total, const Var& term) { return total.valid() ? ad::add(total, term) : term; }

Var zero_scalar(const ParamVars& p) { return p[0].tape().constant(Tensor::scalar(0.0)); }

std::size_t task_index(TaskKind k) { return static_cast<std::size_t>(k); }

bool backbone_frozen(const InnerLoop& loop) {
  return loop.steps == 0 || !loop.adapt_set.contains(gnn::Part::kGcn);
}

/// Target loss of one task after adapting on its own support view.
Var adapted_target_loss(const ParamVars& theta, const gnn::GnnConfig& config, const PreparedTask& task,
                        const InnerLoop& loop) {
  if (loop.steps == 0) return task_loss(theta, config, task.target);
  if (backbone_frozen(loop)) {
    const Var h_support = gnn::encode(theta, config, *task.support.batch);
    const ParamVars adapted = adapt(theta, config, task.support, loop, &h_support);
    const Var h_target = task.shared_topology ? h_support : gnn::encode(theta, config, *task.target.batch);
    return task_loss_from_embedding(h_target, adapted, task.target);
  }
  const ParamVars adapted = adapt(theta, config, task.support, loop);
  return task_loss(adapted, config, task.target);
}

MetaObjective concurrent_objective(const ParamVars& theta, const gnn::GnnConfig& config,
                                   const PreparedEpisode& episode, const InnerLoop& loop) {
  MetaObjective out;
  const bool frozen = backbone_frozen(loop);
  std::vector<Var> support_h(episode.tasks.size());
  if (frozen && loop.steps > 0) {
    for (std::size_t k = 0; k < episode.tasks.size(); ++k) {
      support_h[k] = gnn::encode(theta, config, *episode.tasks[k].support.batch);
    }
  }

  ParamVars adapted = theta;
  if (loop.steps > 0) {
    std::array<bool, gnn::kNumParams> mask{};
    for (std::size_t id = 0; id < gnn::kNumParams; ++id) mask[id] = loop.adapt_set.contains_param(id);
    const LossFn joint = [&](std::span<const Var> params) {
      ParamVars p;
      std::copy(params.begin(), params.end(), p.begin());
      Var total;
      for (std::size_t k = 0; k < episode.tasks.size(); ++k) {
        const PreparedTask& t = episode.tasks[k];
        const double lambda = episode.lambdas[t.kind];
        if (lambda == 0.0) continue;
        const Var l = frozen ? task_loss_from_embedding(support_h[k], p, t.support)
                             : task_loss(p, config, t.support);
        total = accumulate(total, ad::scale(l, lambda));
      }
      return total.valid() ? total : zero_scalar(p);
    };
    const auto result = adapt(theta, joint, mask, loop.alpha, loop.steps, loop.first_order);
    std::copy(result.begin(), result.end(), adapted.begin());
  }

  Var total;
  for (std::size_t k = 0; k < episode.tasks.size(); ++k) {
    const PreparedTask& t = episode.tasks[k];
    const double lambda = episode.lambdas[t.kind];
    if (lambda == 0.0) continue;
    Var l;
    if (frozen) {
      const Var h = (t.shared_topology && support_h[k].valid()) ? support_h[k]
                                                                : gnn::encode(theta, config, *t.target.batch);
      l = task_loss_from_embedding(h, adapted, t.target);
    } else {
      l = task_loss(adapted, config, t.target);
    }
    out.task_losses[task_index(t.kind)] = l.value().item();
    total = accumulate(total, ad::scale(l, lambda));
  }
  out.value = total.valid() ? total : zero_scalar(theta);
  return out;
}

double global_norm(std::span<const Tensor> grads) {
  double s = 0.0;
  for (const auto& g : grads) s += g.squared_norm();
  return std::sqrt(s);
}

UpdateInfo apply_update(gnn::ParameterSet& theta, ad::Tape& tape, const ParamVars& vars, const Var& objective,
                        AdamState& adam, double beta, double clip_norm, const std::string& context) {
  UpdateInfo info;
  info.objective = objective.value().item();
  const std::vector<Var> grad_vars = tape.gradients(objective, vars);
  std::vector<Tensor> grads;
  grads.reserve(grad_vars.size());
  for (const Var& g : grad_vars) grads.push_back(g.value());

  info.grad_norm = global_norm(grads);
  if (!std::isfinite(info.objective) || !std::isfinite(info.grad_norm)) {
    throw std::runtime_error("non-finite outer gradient (" + context + "), objective " +
                             std::to_string(info.objective));
  }
  if (info.grad_norm > clip_norm) {
    const double factor = clip_norm / info.grad_norm;
    for (auto& g : grads) {
      for (double& x : g.values()) x *= factor;
    }
    info.clipped = true;
    log_info("outer gradient norm " + std::to_string(info.grad_norm) + " clipped to " +
             std::to_string(clip_norm) + " (" + context + ")");
  }
  adam_step(adam, theta.values, grads, beta);
  return info;
}

}  // namespace

std::vector<Var> adapt(std::span<const Var> params, const LossFn& loss, std::span<const bool> mask,
                       double alpha, std::size_t steps, bool first_order) {
  if (mask.size() != params.size()) throw std::invalid_argument("adapt: mask size mismatch");
  std::vector<Var> current(params.begin(), params.end());
  if (steps == 0) return current;
  ad::Tape& tape = params.front().tape();
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) selected.push_back(i);
  }
  if (selected.empty()) return current;

  std::vector<Var> wrt(selected.size());
  for (std::size_t s = 0; s < steps; ++s) {
    const Var l = loss(current);
    for (std::size_t k = 0; k < selected.size(); ++k) wrt[k] = current[selected[k]];
    const std::vector<Var> grads = tape.gradients(l, wrt, !first_order);
    for (std::size_t k = 0; k < selected.size(); ++k) {
      const std::size_t i = selected[k];
      current[i] = ad::sub(current[i], ad::scale(grads[k], alpha));
    }
  }
  return current;
}

ParamVars adapt(const ParamVars& theta, const gnn::GnnConfig& config, const TaskView& support,
                const InnerLoop& loop, const Var* support_embedding) {
  if (support.labels.empty()) throw std::invalid_argument("adapt: empty support set");
  if (support_embedding && loop.adapt_set.contains(gnn::Part::kGcn) && loop.steps > 0) {
    throw std::invalid_argument("adapt: a cached embedding cannot be used while adapting the backbone");
  }
  std::array<bool, gnn::kNumParams> mask{};
  for (std::size_t id = 0; id < gnn::kNumParams; ++id) mask[id] = loop.adapt_set.contains_param(id);
  const LossFn loss = [&](std::span<const Var> params) {
    ParamVars p;
    std::copy(params.begin(), params.end(), p.begin());
    return support_embedding ? task_loss_from_embedding(*support_embedding, p, support)
                             : task_loss(p, config, support);
  };
  const auto result = adapt(theta, loss, mask, loop.alpha, loop.steps, loop.first_order);
  ParamVars out;
  std::copy(result.begin(), result.end(), out.begin());
  return out;
}

gnn::ParameterSet adapt(const gnn::ParameterSet& theta, const episodes::TaskData& task, const InnerLoop& loop) {
  if (task.support.empty()) throw std::invalid_argument("adapt: empty support set");
  const TaskView support = TaskView::build(task.kind, task.support, theta.config.feature_dim);
  ad::Tape tape;
  const ParamVars vars = bind_parameters(tape, theta);
  std::optional<Var> h;
  if (backbone_frozen(loop)) h = gnn::encode(vars, theta.config, *support.batch);
  const ParamVars adapted = adapt(vars, theta.config, support, loop, h ? &*h : nullptr);
  return gnn::snapshot(adapted, theta.config);
}

MetaObjective meta_objective(const ParamVars& theta, const gnn::GnnConfig& config, const PreparedEpisode& episode,
                             const InnerLoop& loop) {
  if (episode.concurrent) return concurrent_objective(theta, config, episode, loop);
  MetaObjective out;
  Var total;
  for (const PreparedTask& t : episode.tasks) {
    const double lambda = episode.lambdas[t.kind];
    if (lambda == 0.0) continue;
    const Var l = adapted_target_loss(theta, config, t, loop);
    out.task_losses[task_index(t.kind)] = l.value().item();
    total = accumulate(total, ad::scale(l, lambda));
  }
  out.value = total.valid() ? total : zero_scalar(theta);
  return out;
}

UpdateInfo meta_update(gnn::ParameterSet& theta, std::span<const PreparedEpisode> episodes, AdamState& adam,
                       const InnerLoop& loop, double beta, double clip_norm) {
  if (episodes.empty()) throw std::invalid_argument("meta_update: no episodes");
  ad::Tape tape;
  const ParamVars vars = bind_parameters(tape, theta);
  Var total;
  TaskLosses losses = no_task_losses();
  std::string ids;
  for (const PreparedEpisode& ep : episodes) {
    MetaObjective obj = meta_objective(vars, theta.config, ep, loop);
    for (std::size_t k = 0; k < 3; ++k) {
      if (std::isnan(obj.task_losses[k])) continue;
      losses[k] = std::isnan(losses[k]) ? obj.task_losses[k] : losses[k] + obj.task_losses[k];
    }
    total = accumulate(total, obj.value);
    ids += (ids.empty() ? "" : ",") + std::to_string(ep.id);
  }
  UpdateInfo info = apply_update(theta, tape, vars, total, adam, beta, clip_norm, "episode " + ids);
  info.task_losses = losses;
  return info;
}

UpdateInfo classical_update(gnn::ParameterSet& theta, std::span<const TaskView> views,
                            const episodes::Lambdas& lambdas, AdamState& adam, double beta, double clip_norm) {
  if (views.empty()) throw std::invalid_argument("classical_update: no task views");
  ad::Tape tape;
  const ParamVars vars = bind_parameters(tape, theta);
  Var total;
  TaskLosses losses = no_task_losses();
  for (const TaskView& v : views) {
    const double lambda = lambdas[v.kind];
    if (lambda == 0.0) continue;
    const Var l = task_loss(vars, theta.config, v);
    losses[task_index(v.kind)] = l.value().item();
    total = accumulate(total, ad::scale(l, lambda));
  }
  if (!total.valid()) total = zero_scalar(vars);
  UpdateInfo info = apply_update(theta, tape, vars, total, adam, beta, clip_norm, "classical step");
  info.task_losses = losses;
  return info;
}

ObjectiveValue evaluate_meta_objective(const gnn::ParameterSet& theta, const PreparedEpisode& episode,
                                       const InnerLoop& loop) {
  ad::Tape tape;
  const ParamVars vars = bind_parameters(tape, theta);
  InnerLoop first = loop;
  first.first_order = true;  // values match; no outer gradient is needed
  const MetaObjective obj = meta_objective(vars, theta.config, episode, first);
  return ObjectiveValue{obj.value.value().item(), obj.task_losses};
}

}  // namespace metagraph::training
