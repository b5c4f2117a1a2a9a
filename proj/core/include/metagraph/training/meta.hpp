// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0
//
// Inner-loop adaptation, the multi-task meta-objective and the outer Adam
// update.

#pragma once

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "metagraph/gnn/params.hpp"
#include "metagraph/training/adam.hpp"
#include "metagraph/training/task_loss.hpp"

namespace metagraph::training {

struct InnerLoop {
  double alpha = 1e-2;
  std::size_t steps = 1;
  gnn::PartSet adapt_set = gnn::PartSet::all();
  /// Treat inner gradients as constants in the outer backward pass.
  bool first_order = false;
};

/// Loss over an ordered list of parameters.
using LossFn = std::function<ad::Var(std::span<const ad::Var>)>;

/// `steps` of gradient descent on `loss` over the parameters selected by
/// `mask`. Unselected parameters are returned as the same Vars. Without
/// `first_order` the results stay differentiable through the gradients.
std::vector<ad::Var> adapt(std::span<const ad::Var> params, const LossFn& loss,
                           std::span<const bool> mask, double alpha, std::size_t steps,
                           bool first_order);

/// Adapts the model on one support view. When the backbone is not adapted,
/// a precomputed `support_embedding` may be supplied to skip the encoder.
gnn::ParamVars adapt(const gnn::ParamVars& theta, const gnn::GnnConfig& config, const TaskView& support,
                     const InnerLoop& loop, const ad::Var* support_embedding = nullptr);

/// Value-level adaptation of `theta` on the support set of `task`.
gnn::ParameterSet adapt(const gnn::ParameterSet& theta, const episodes::TaskData& task,
                        const InnerLoop& loop);

/// Per-task losses indexed by TaskKind; NaN for tasks not present.
using TaskLosses = std::array<double, 3>;

inline TaskLosses no_task_losses() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan, nan};
}

struct MetaObjective {
  ad::Var value;
  TaskLosses task_losses = no_task_losses();  // unweighted target losses
};

/// Sum over tasks of lambda * target loss after adapting on that task's
/// support set alone. Concurrent episodes adapt once on the lambda-weighted
/// sum of all support losses instead.
MetaObjective meta_objective(const gnn::ParamVars& theta, const gnn::GnnConfig& config,
                             const PreparedEpisode& episode, const InnerLoop& loop);

struct UpdateInfo {
  double objective = 0.0;
  TaskLosses task_losses = no_task_losses();
  double grad_norm = 0.0;
  bool clipped = false;
};

/// One Adam step on the summed meta-objective of `episodes`. Throws
/// std::runtime_error naming the episode ids when the gradient is not finite.
UpdateInfo meta_update(gnn::ParameterSet& theta, std::span<const PreparedEpisode> episodes,
                       AdamState& adam, const InnerLoop& loop, double beta, double clip_norm);

/// One Adam step on sum_k lambda_k * loss(views[k]) without adaptation.
UpdateInfo classical_update(gnn::ParameterSet& theta, std::span<const TaskView> views,
                            const episodes::Lambdas& lambdas, AdamState& adam, double beta,
                            double clip_norm);

struct ObjectiveValue {
  double value = 0.0;
  TaskLosses task_losses = no_task_losses();
};

/// Meta-objective value without an update, for validation.
ObjectiveValue evaluate_meta_objective(const gnn::ParameterSet& theta, const PreparedEpisode& episode,
                                      const InnerLoop& loop);

}  // namespace metagraph::training
