// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "metagraph/episodes/episode.hpp"
#include "metagraph/graph/folds.hpp"
#include "metagraph/graph/synthetic.hpp"
#include "metagraph/training/adam.hpp"
#include "metagraph/training/config.hpp"
#include "metagraph/training/meta.hpp"
#include "metagraph/training/trainer.hpp"
#include "oracles.hpp"

namespace metagraph::training {
namespace {

using ad::Tape;
using ad::Tensor;
using ad::Var;
using episodes::TaskKind;
using episodes::TaskSet;

TEST(Adam, ThreeStepTraceOnScalar) {
  AdamState s;
  std::vector<Tensor> p{Tensor(1, 1, 1.0)};
  const std::vector<double> grads{0.5, -1.0, 2.0};
  double m = 0, v = 0, x = 1.0;
  for (std::size_t t = 1; t <= 3; ++t) {
    const double g = grads[t - 1];
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1 - std::pow(0.9, t));
    const double vh = v / (1 - std::pow(0.999, t));
    x -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    const std::vector<Tensor> gt{Tensor(1, 1, g)};
    adam_step(s, p, gt, 0.01);
    EXPECT_NEAR(p[0][0], x, 1e-15) << "step " << t;
  }
  EXPECT_EQ(s.step, 3u);
}

TEST(Adam, FirstStepIsSignedLearningRate) {
  AdamState s;
  std::vector<Tensor> p{Tensor::from_rows({{0.0, 0.0, 0.0}})};
  const std::vector<Tensor> g{Tensor::from_rows({{3.0, -0.2, 0.0}})};
  adam_step(s, p, g, 0.1);
  EXPECT_NEAR(p[0][0], -0.1, 1e-7);
  EXPECT_NEAR(p[0][1], 0.1, 1e-6);
  EXPECT_EQ(p[0][2], 0.0);
}

TEST(Config, JsonRoundTripAndDefaults) {
  TrainConfig c;
  c.mode = Mode::kISame;
  c.tasks = TaskSet{TaskKind::kGC, TaskKind::kLP};
  c.epochs = 17;
  c.lambdas[TaskKind::kNC] = 0.5;
  c.first_order = true;
  c.seed = 99;
  EXPECT_EQ(train_config_from_json(train_config_to_json(c)), c);
  EXPECT_EQ(TrainConfig{}.inner_lr, 1e-2);
  EXPECT_EQ(TrainConfig{}.outer_lr, 1e-3);
  EXPECT_EQ(TrainConfig{}.inner_steps, 1u);
  EXPECT_FALSE(TrainConfig{}.first_order);
}

TEST(Config, DefaultEpochsPerMode) {
  TrainConfig c;
  c.tasks = TaskSet{TaskKind::kGC};
  c.mode = Mode::kClassicalSingle;
  EXPECT_EQ(c.effective_epochs(), 1000u);
  c.mode = Mode::kESame;
  EXPECT_EQ(c.effective_epochs(), 5000u);
  c.tasks = TaskSet::all();
  EXPECT_EQ(c.effective_epochs(), 15000u);
  c.mode = Mode::kClassicalMulti;
  EXPECT_EQ(c.effective_epochs(), 5000u);
  c.epochs = 3;
  EXPECT_EQ(c.effective_epochs(), 3u);
}

TEST(Config, ValidateRejectsBadFields) {
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), std::invalid_argument);
  };
  bad([](TrainConfig& c) { c.inner_lr = 0; });
  bad([](TrainConfig& c) { c.outer_lr = -1; });
  bad([](TrainConfig& c) { c.lambdas[TaskKind::kGC] = 1.5; });
  bad([](TrainConfig& c) { c.tasks = TaskSet{}; });
  bad([](TrainConfig& c) { c.batch_size = 0; });
  bad([](TrainConfig& c) { c.batch_divisor = 0; });
  EXPECT_ANY_THROW(train_config_from_json({{"mode", "maml"}}));
  EXPECT_NO_THROW(TrainConfig{}.validate());
}

// L_s = 0.5 x'Ax + b'x, L_t = 0.5 x'Cx + d'x, with x a 1x2 row.
struct Quadratic {
  Tensor a = Tensor::from_rows({{2.0, 0.5}, {0.5, 1.0}});
  Tensor b = Tensor::from_rows({{0.3, -0.7}});
  Tensor c = Tensor::from_rows({{1.0, -0.2}, {-0.2, 3.0}});
  Tensor d = Tensor::from_rows({{-1.0, 0.4}});
  double alpha = 0.1;

  Var loss(Tape& t, const Var& x, const Tensor& q, const Tensor& l) const {
    return ad::add(ad::scale(ad::sum(ad::mul(ad::matmul(x, t.constant(q)), x)), 0.5),
                   ad::sum(ad::mul(x, t.constant(l))));
  }

  Var meta(Tape& t, const Var& x, bool first_order, std::size_t steps = 1) const {
    const std::vector<Var> params{x};
    const bool mask[] = {true};
    const LossFn support = [&](std::span<const Var> p) { return loss(t, p[0], a, b); };
    const auto adapted = adapt(params, support, mask, alpha, steps, first_order);
    return loss(t, adapted[0], c, d);
  }

  // (I - alpha A)(C x' + d) and the first-order C x' + d
  std::pair<Tensor, Tensor> closed_form(const Tensor& x) const {
    Tensor xp(1, 2), g(1, 2), full(1, 2);
    for (int j = 0; j < 2; ++j) xp[j] = x[j] - alpha * (a(0, j) * x[0] + a(1, j) * x[1] + b[j]);
    for (int j = 0; j < 2; ++j) g[j] = c(0, j) * xp[0] + c(1, j) * xp[1] + d[j];
    for (int j = 0; j < 2; ++j) full[j] = g[j] - alpha * (a(j, 0) * g[0] + a(j, 1) * g[1]);
    return {full, g};
  }
};

TEST(Adapt, ScalarQuadraticStep) {
  Tape t;
  const std::vector<Var> x{t.parameter(Tensor(1, 1, 1.0))};
  const bool mask[] = {true};
  const LossFn f = [](std::span<const Var> p) { return ad::sum(ad::mul(p[0], p[0])); };
  EXPECT_NEAR(adapt(x, f, mask, 0.1, 1, false)[0].value().item(), 0.8, 1e-15);
  EXPECT_EQ(adapt(x, f, mask, 0.1, 0, false)[0].value().item(), 1.0);
  const bool frozen[] = {false};
  EXPECT_EQ(adapt(x, f, frozen, 0.1, 3, false)[0].value().item(), 1.0);
}

TEST(Adapt, SecondOrderMetaGradientMatchesOracles) {
  const Quadratic q;
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x0 = testing::random_tensor(1, 2, rng);
    const testing::ScalarFn f = [&](Tape& t, std::span<const Var> in) { return q.meta(t, in[0], false); };
    EXPECT_LT(testing::gradient_check(f, {x0}), 1e-4);
    const auto [full, first] = q.closed_form(x0);
    EXPECT_LT(ad::max_abs_diff(testing::analytic_gradients(f, {x0})[0], full), 1e-12);
    const testing::ScalarFn fo = [&](Tape& t, std::span<const Var> in) { return q.meta(t, in[0], true); };
    EXPECT_LT(ad::max_abs_diff(testing::analytic_gradients(fo, {x0})[0], first), 1e-12);
  }
}

TEST(Adapt, MultiStepSecondOrderMatchesFiniteDifferences) {
  const Quadratic q;
  Rng rng(2);
  for (std::size_t steps : {2u, 3u}) {
    const Tensor x0 = testing::random_tensor(1, 2, rng);
    const testing::ScalarFn f = [&](Tape& t, std::span<const Var> in) { return q.meta(t, in[0], false, steps); };
    EXPECT_LT(testing::gradient_check(f, {x0}), 1e-4);
  }
}

struct Fixture {
  graph::Dataset data;
  gnn::GnnConfig config;
  gnn::ParameterSet theta;
  episodes::MultiTaskEpisode episode;
  PreparedEpisode prepared;

  explicit Fixture(std::uint64_t seed, std::size_t hidden = 4) {
    graph::SynthSpec spec;
    spec.num_graphs = 9;
    spec.feature_dim = 3;
    data = graph::synth_dataset(spec, seed);
    config.feature_dim = 3;
    config.hidden = hidden;
    config.num_node_classes = data.num_node_classes;
    config.num_graph_classes = data.num_graph_classes;
    theta = gnn::init_parameters(config, seed);
    episode = episodes::build_episode(data.graphs, {}, TaskSet::all(), seed);
    prepared = prepare_episode(episode, 3);
  }
};

TEST(Adapt, EsameLeavesBackboneBitIdentical) {
  const Fixture fx(3);
  InnerLoop loop;
  loop.adapt_set = gnn::PartSet::heads();
  for (const auto& task : fx.episode.tasks) {
    const gnn::ParameterSet out = adapt(fx.theta, task, loop);
    EXPECT_EQ(out.checksum(gnn::PartSet{gnn::Part::kGcn}), fx.theta.checksum(gnn::PartSet{gnn::Part::kGcn}));
    EXPECT_NE(out.checksum(), fx.theta.checksum());
  }
  loop.adapt_set = gnn::PartSet::all();
  const gnn::ParameterSet isame = adapt(fx.theta, fx.episode.tasks[0], loop);
  EXPECT_NE(isame.checksum(gnn::PartSet{gnn::Part::kGcn}), fx.theta.checksum(gnn::PartSet{gnn::Part::kGcn}));
  loop.steps = 0;
  EXPECT_EQ(adapt(fx.theta, fx.episode.tasks[1], loop), fx.theta);
}

TEST(MetaObjective, LambdaAndZeroStepIdentities) {
  Fixture fx(4);
  InnerLoop loop;
  loop.steps = 0;
  double sum = 0.0;
  Tape t;
  const gnn::ParamVars v = gnn::bind_constants(t, fx.theta);
  for (const auto& task : fx.prepared.tasks) sum += task_loss(v, fx.config, task.target).value().item();
  EXPECT_NEAR(evaluate_meta_objective(fx.theta, fx.prepared, loop).value, sum, 1e-12);
  fx.prepared.lambdas = episodes::Lambdas{{0.0, 0.0, 0.0}};
  loop.steps = 1;
  EXPECT_EQ(evaluate_meta_objective(fx.theta, fx.prepared, loop).value, 0.0);
}

TEST(MetaObjective, TasksAdaptInIsolation) {
  Fixture fx(5);
  InnerLoop loop;
  const ObjectiveValue base = evaluate_meta_objective(fx.theta, fx.prepared, loop);
  // poison every task but NC; NC's adapted target loss must not move
  for (auto& task : fx.episode.tasks) {
    if (task.kind == TaskKind::kNC) continue;
    for (auto* view : {&task.support, &task.target}) {
      for (auto& g : *view) {
        for (std::size_t i = 0; i < g.node_features.size(); ++i) g.node_features[i] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  const ObjectiveValue poisoned = evaluate_meta_objective(fx.theta, prepare_episode(fx.episode, 3), loop);
  const auto nc = static_cast<std::size_t>(TaskKind::kNC);
  EXPECT_EQ(poisoned.task_losses[nc], base.task_losses[nc]);
  EXPECT_NE(poisoned.value, base.value);
}

TEST(MetaObjective, ModelGradientMatchesFiniteDifferences) {
  const Fixture fx(6, 3);
  Rng rng(6);
  for (bool isame : {true, false}) {
    InnerLoop loop;
    loop.alpha = 0.5;
    loop.adapt_set = isame ? gnn::PartSet::all() : gnn::PartSet::heads();
    // move off the zero-initialised biases, which sit on ReLU kinks
    std::vector<Tensor> inputs(fx.theta.values.begin(), fx.theta.values.end());
    for (auto& x : inputs) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.1 * (uniform01(rng) - 0.5);
    }
    const testing::ScalarFn f = [&](Tape&, std::span<const Var> in) {
      gnn::ParamVars v;
      std::copy(in.begin(), in.end(), v.begin());
      return meta_objective(v, fx.config, fx.prepared, loop).value;
    };
    EXPECT_LT(testing::gradient_check(f, inputs), 1e-4) << (isame ? "isame" : "esame");
  }
}

TEST(MetaUpdate, ZeroStepsEqualsClassicalStep) {
  const Fixture fx(7);
  InnerLoop loop;
  loop.steps = 0;
  gnn::ParameterSet meta = fx.theta;
  AdamState a1;
  const std::vector<PreparedEpisode> eps{fx.prepared};
  meta_update(meta, eps, a1, loop, 1e-3, 10.0);

  gnn::ParameterSet classical = fx.theta;
  AdamState a2;
  std::vector<TaskView> views;
  for (const auto& task : fx.prepared.tasks) views.push_back(task.target);
  classical_update(classical, views, fx.prepared.lambdas, a2, 1e-3, 10.0);
  for (std::size_t id = 0; id < gnn::kNumParams; ++id) {
    EXPECT_LT(ad::max_abs_diff(meta[id], classical[id]), 1e-12) << id;
  }
}

TEST(MetaUpdate, ZeroLambdasLeaveParametersUnchanged) {
  Fixture fx(8);
  fx.prepared.lambdas = episodes::Lambdas{{0.0, 0.0, 0.0}};
  gnn::ParameterSet theta = fx.theta;
  AdamState adam;
  const std::vector<PreparedEpisode> eps{fx.prepared};
  meta_update(theta, eps, adam, InnerLoop{}, 1e-3, 10.0);
  EXPECT_EQ(theta, fx.theta);
}

TEST(MetaUpdate, ClipsLargeGradients) {
  const Fixture fx(9);
  gnn::ParameterSet theta = fx.theta;
  AdamState adam;
  const std::vector<PreparedEpisode> eps{fx.prepared};
  const UpdateInfo info = meta_update(theta, eps, adam, InnerLoop{}, 1e-3, 1e-6);
  EXPECT_TRUE(info.clipped);
  EXPECT_GT(info.grad_norm, 1e-6);
  gnn::ParameterSet again = fx.theta;
  AdamState fresh;
  EXPECT_FALSE(meta_update(again, eps, fresh, InnerLoop{}, 1e-3, 1e6).clipped);
}

TEST(MetaUpdate, NonFiniteGradientThrows) {
  Fixture fx(10);
  fx.theta[gnn::kGcnW1](0, 0) = std::numeric_limits<double>::quiet_NaN();
  AdamState adam;
  const std::vector<PreparedEpisode> eps{fx.prepared};
  EXPECT_ANY_THROW(meta_update(fx.theta, eps, adam, InnerLoop{}, 1e-3, 10.0));
}

struct SmallRun {
  graph::Dataset data;
  graph::FoldSplit split;
  TrainConfig config;

  explicit SmallRun(Mode mode, TaskSet tasks = TaskSet::all()) {
    graph::SynthSpec spec;
    spec.num_graphs = 40;
    data = graph::synth_dataset(spec, 11);
    split = graph::make_folds(data, 10, 0).front();
    config.mode = mode;
    config.tasks = tasks;
    config.hidden = 8;
    config.batch_size = 9;
    config.epochs = 12;
    config.eval_every = 3;
    config.patience = 2;
    config.seed = 5;
  }
};

TEST(Train, SameBeatsInitialisationAndIsDeterministic) {
  testing::QuietLog quiet;
  SmallRun r(Mode::kESame);
  r.config.epochs = 40;
  r.config.eval_every = 5;
  r.config.patience = 100;
  r.config.outer_lr = 1e-2;
  std::ostringstream log;
  TrainOptions opts;
  opts.log = &log;
  opts.log_context = {{"config_hash", "x"}};
  const TrainResult a = train(r.data, r.split, r.config, opts);
  EXPECT_LT(a.best_validation, a.initial_validation);
  EXPECT_TRUE(a.heads_discardable);
  EXPECT_TRUE(a.params.all_finite());
  ASSERT_FALSE(a.log.empty());
  EXPECT_EQ(a.log.front()["config_hash"], "x");
  EXPECT_NE(log.str().find("\"config_hash\":\"x\""), std::string::npos);
  const TrainResult b = train(r.data, r.split, r.config);
  EXPECT_EQ(a.params, b.params);
}

TEST(Train, IsameAndEsameDiverge) {
  testing::QuietLog quiet;
  SmallRun i(Mode::kISame), e(Mode::kESame);
  i.config.epochs = e.config.epochs = 3;
  const TrainResult ri = train(i.data, i.split, i.config);
  const TrainResult re = train(e.data, e.split, e.config);
  EXPECT_NE(ri.params, re.params);
  EXPECT_TRUE(ri.params.all_finite());
  EXPECT_TRUE(re.params.all_finite());
}

TEST(Train, EveryModeRuns) {
  testing::QuietLog quiet;
  for (Mode m : {Mode::kClassicalSingle, Mode::kClassicalMulti, Mode::kFineTune, Mode::kAblationConcurrent,
                 Mode::kAblationSingleTaskSame, Mode::kISame}) {
    const TaskSet tasks = m == Mode::kClassicalSingle || m == Mode::kAblationSingleTaskSame
                              ? TaskSet{TaskKind::kLP}
                              : m == Mode::kFineTune ? TaskSet{TaskKind::kGC, TaskKind::kNC} : TaskSet::all();
    SmallRun r(m, tasks);
    r.config.epochs = 3;
    const TrainResult res = train(r.data, r.split, r.config);
    EXPECT_TRUE(res.params.all_finite()) << mode_name(m);
    EXPECT_EQ(res.heads_discardable, is_meta_mode(m)) << mode_name(m);
  }
}

TEST(Train, EarlyStoppingHonoursPatience) {
  testing::QuietLog quiet;
  SmallRun r(Mode::kClassicalMulti);
  r.config.epochs = 400;
  r.config.eval_every = 1;
  r.config.patience = 1;
  r.config.outer_lr = 0.5;
  const TrainResult res = train(r.data, r.split, r.config);
  EXPECT_TRUE(res.stopped_early);
  EXPECT_LT(res.epochs_run, 400u);
  EXPECT_LE(res.best_epoch, res.epochs_run);
}

TEST(FineTune, ZeroEpochsKeepsParameters) {
  testing::QuietLog quiet;
  SmallRun r(Mode::kClassicalMulti);
  const TrainResult all = train(r.data, r.split, r.config);
  TrainConfig c = r.config;
  c.epochs = 0;
  const TrainResult ft = fine_tune(all.params, r.data, r.split, TaskSet{TaskKind::kGC, TaskKind::kLP}, c);
  EXPECT_EQ(ft.params, all.params);
  EXPECT_ANY_THROW(fine_tune(all.params, r.data, r.split, TaskSet{TaskKind::kGC}, c));
}

TEST(Train, RejectsEmptyValidation) {
  SmallRun r(Mode::kESame);
  r.split.validation_graph_ids.clear();
  EXPECT_ANY_THROW(train(r.data, r.split, r.config));
  SmallRun c(Mode::kClassicalSingle, TaskSet{TaskKind::kGC});
  c.split.validation_graph_ids.clear();
  EXPECT_ANY_THROW(train(c.data, c.split, c.config));
}

}  // namespace
}  // namespace metagraph::training
