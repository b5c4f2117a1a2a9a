// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "metagraph/evaluation/linear.hpp"
#include "metagraph/evaluation/metrics.hpp"
#include "metagraph/evaluation/protocol.hpp"
#include "metagraph/evaluation/report.hpp"
#include "metagraph/graph/folds.hpp"
#include "metagraph/graph/synthetic.hpp"
#include "metagraph/training/trainer.hpp"
#include "oracles.hpp"

namespace metagraph::evaluation {
namespace {

using ad::Tensor;
using episodes::TaskSet;
using training::Mode;

TEST(Auc, WorkedExampleAndExtremes) {
  const std::vector<double> s{0.9, 0.5, 0.5, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(roc_auc(s, y), 0.875);
  const std::vector<double> ordered{0.1, 0.2, 0.8, 0.9};
  const std::vector<int> yo{0, 0, 1, 1};
  EXPECT_EQ(roc_auc(ordered, yo), 1.0);
  const std::vector<int> yr{1, 1, 0, 0};
  EXPECT_EQ(roc_auc(ordered, yr), 0.0);
  const std::vector<int> one{1, 1, 1, 1};
  EXPECT_ANY_THROW(roc_auc(ordered, one));
}

TEST(Auc, MatchesMannWhitneyEnumeration) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 49);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(rng, 8)) / 4.0;  // many ties
      y[i] = static_cast<int>(uniform_index(rng, 2));
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_NEAR(roc_auc(s, y), testing::brute_force_auc(s, y), 1e-12);
  }
}

TEST(Auc, InvariantUnderMonotoneTransform) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(30), t(30);
    std::vector<int> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
      s[i] = uniform01(rng) * 4 - 2;
      t[i] = std::exp(3 * s[i]) + 7;
      y[i] = static_cast<int>(i % 2);
    }
    EXPECT_DOUBLE_EQ(roc_auc(s, y), roc_auc(t, y));
  }
}

TEST(Accuracy, FractionCorrect) {
  const std::vector<int> p{0, 1, 2, 2};
  const std::vector<int> y{0, 1, 1, 2};
  EXPECT_DOUBLE_EQ(accuracy(p, y), 0.75);
  EXPECT_DOUBLE_EQ(accuracy(p, y) + 0.25, 1.0);
  EXPECT_ANY_THROW(accuracy(std::vector<int>{}, std::vector<int>{}));
}

TEST(DeltaM, Arithmetic) {
  const std::vector<double> m{55.0};
  const std::vector<double> b{50.0};
  EXPECT_NEAR(delta_m(m, b), 10.0, 1e-12);
  const std::vector<double> x{40.0, 80.0, 60.0};
  EXPECT_EQ(delta_m(x, x), 0.0);
  const std::vector<double> mm{45.0, 88.0};
  const std::vector<double> bb{50.0, 80.0};
  EXPECT_NEAR(delta_m(mm, bb), 100.0 * (-0.1 + 0.1) / 2.0, 1e-12);
  const std::vector<double> zero{0.0};
  EXPECT_ANY_THROW(delta_m(m, zero));
}

TEST(MeanStd, Population) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const MeanStd ms = mean_std(v);
  EXPECT_DOUBLE_EQ(ms.mean, 5.0);
  EXPECT_DOUBLE_EQ(ms.std, 2.0);
}

Tensor clusters(std::size_t n, Rng& rng, std::vector<int>& labels, double gap) {
  Tensor x(n, 3);
  labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(i % 3);
    for (std::size_t c = 0; c < 3; ++c) x(i, c) = standard_normal(rng) * 0.3 + (c == static_cast<std::size_t>(labels[i]) ? gap : 0.0);
  }
  return x;
}

TEST(Linear, SeparableClustersFitPerfectly) {
  Rng rng(3);
  std::vector<int> y;
  const Tensor x = clusters(90, rng, y, 4.0);
  const LinearClassifier clf = train_linear(x, y);
  EXPECT_TRUE(clf.trained);
  EXPECT_EQ(clf.classes, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(accuracy(clf.predict(x), y), 1.0);
}

TEST(Linear, PermutedLabelsScoreNearChance) {
  Rng rng(4);
  std::vector<int> y;
  const Tensor x = clusters(600, rng, y, 1.0);
  std::vector<int> shuffled = y;
  shuffle(shuffled, rng);
  const std::size_t half = 300;
  Tensor train(half, 3), test(half, 3);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      train(i, c) = x(i, c);
      test(i, c) = x(half + i, c);
    }
  }
  const std::vector<int> ytrain(shuffled.begin(), shuffled.begin() + half);
  const std::vector<int> ytest(shuffled.begin() + half, shuffled.end());
  const double acc = accuracy(train_linear(train, ytrain).predict(test), ytest);
  EXPECT_NEAR(acc, 1.0 / 3.0, 0.10);
}

TEST(Linear, DuplicatedRowsKeepBoundary) {
  Rng rng(5);
  std::vector<int> y;
  const Tensor x = clusters(60, rng, y, 1.0);
  Tensor xx(120, 3);
  std::vector<int> yy;
  for (std::size_t rep = 0; rep < 2; ++rep) {
    for (std::size_t i = 0; i < 60; ++i) {
      for (std::size_t c = 0; c < 3; ++c) xx(rep * 60 + i, c) = x(i, c);
      yy.push_back(y[i]);
    }
  }
  LinearOptions tight;
  tight.gradient_tolerance = 1e-9;
  const LinearClassifier a = train_linear(x, y, tight);
  const LinearClassifier b = train_linear(xx, yy, tight);
  EXPECT_LT(ad::max_abs_diff(a.weights, b.weights), 1e-6);
  for (std::size_t k = 0; k < a.bias.size(); ++k) EXPECT_NEAR(a.bias[k], b.bias[k], 1e-6);
}

TEST(Linear, BinaryScoresAndSingleClassRejected) {
  Rng rng(6);
  Tensor x(40, 2);
  std::vector<int> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    y[i] = static_cast<int>(i % 2);
    x(i, 0) = standard_normal(rng) + 3.0 * y[i];
    x(i, 1) = standard_normal(rng);
  }
  const LinearClassifier clf = train_linear(x, y);
  EXPECT_EQ(clf.weights.cols(), 1u);
  EXPECT_GT(roc_auc(clf.scores(x), y), 0.9);
  EXPECT_EQ(train_linear(x, y).weights, clf.weights);
  EXPECT_ANY_THROW(train_linear(x, std::vector<int>(40, 1)));
}

struct SynthSetup {
  graph::Dataset data;
  std::vector<graph::FoldSplit> folds;
  gnn::ParameterSet theta;

  explicit SynthSetup(double strength = 1.0, std::size_t graphs = 40) {
    graph::SynthSpec spec;
    spec.num_graphs = graphs;
    spec.strength = strength;
    data = graph::synth_dataset(spec, 21);
    folds = graph::make_folds(data, 10, 0);
    training::TrainConfig c;
    c.hidden = 8;
    theta = gnn::init_parameters(training::model_config(data, c), 3);
  }

  std::vector<const graph::Graph*> ptrs(std::size_t count) const {
    std::vector<const graph::Graph*> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(&data.graphs[i]);
    return out;
  }
};

TEST(Embed, ShapesPerTask) {
  const SynthSetup s;
  const auto p = s.ptrs(4);
  const auto gc = evaluation_graphs(p, TaskKind::kGC, 1);
  const TaskFeatures fg = embed_for_task(s.theta, gc, TaskKind::kGC);
  EXPECT_EQ(fg.features.shape(), (ad::Shape{4, 8}));
  EXPECT_EQ(fg.labels.size(), 4u);

  const auto nc = evaluation_graphs(p, TaskKind::kNC, 1);
  std::size_t nodes = 0;
  for (const auto* g : p) nodes += g->num_nodes;
  const TaskFeatures fn = embed_for_task(s.theta, nc, TaskKind::kNC);
  EXPECT_EQ(fn.features.rows(), nodes);
  EXPECT_EQ(fn.features.cols(), 8u);

  const auto lp = evaluation_graphs(p, TaskKind::kLP, 1);
  std::size_t pairs = 0;
  for (const auto& g : lp) pairs += g.positive_edges->size() + g.negative_edges->size();
  const TaskFeatures fl = embed_for_task(s.theta, lp, TaskKind::kLP);
  EXPECT_EQ(fl.features.shape(), (ad::Shape{pairs, 16}));
  EXPECT_EQ(evaluation_graphs(p, TaskKind::kLP, 1), lp);
}

TEST(Embed, LpRowIsConcatenationOfEndpoints) {
  const SynthSetup s;
  const auto lp = evaluation_graphs(s.ptrs(1), TaskKind::kLP, 2);
  const TaskFeatures fl = embed_for_task(s.theta, lp, TaskKind::kLP);
  const TaskFeatures nodes = embed_for_task(s.theta, lp, TaskKind::kNC);
  const graph::Edge e = lp[0].positive_edges->front().canonical();
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_DOUBLE_EQ(fl.features(0, k), nodes.features(e.u, k));
    EXPECT_DOUBLE_EQ(fl.features(0, 8 + k), nodes.features(e.v, k));
  }
  EXPECT_EQ(fl.labels.front(), 1);
  EXPECT_EQ(fl.labels.back(), 0);
}

TEST(Embed, MissingAnnotationsRejected) {
  SynthSetup s;
  s.data.graphs[0].graph_label.reset();
  EXPECT_EQ(evaluation_graphs(s.ptrs(3), TaskKind::kGC, 1).size(), 2u);
  EXPECT_ANY_THROW(embed_for_task(s.theta, std::vector<graph::Graph>{s.data.graphs[0]}, TaskKind::kGC));
  s.data.graphs[1].node_labels.clear();
  EXPECT_ANY_THROW(embed_for_task(s.theta, std::vector<graph::Graph>{s.data.graphs[1]}, TaskKind::kNC));
  EXPECT_ANY_THROW(embed_for_task(s.theta, std::vector<graph::Graph>{s.data.graphs[2]}, TaskKind::kLP));
}

TEST(Protocol, LinearEvaluationLeavesEncoderUntouched) {
  const SynthSetup s;
  const auto before = s.theta.checksum(gnn::PartSet{gnn::Part::kGcn});
  const auto metrics = evaluate_fold(s.theta, s.data, s.folds[0], TaskSet::all(), Protocol::kLinear, 7);
  EXPECT_EQ(s.theta.checksum(gnn::PartSet{gnn::Part::kGcn}), before);
  EXPECT_EQ(metrics.size(), 3u);
  for (const auto& [k, v] : metrics) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 100.0);
  }
  EXPECT_EQ(metrics, evaluate_fold(s.theta, s.data, s.folds[0], TaskSet::all(), Protocol::kLinear, 7));
  EXPECT_ANY_THROW(evaluate_fold(s.theta, s.data, s.folds[0], TaskSet::all(), Protocol::kAuto, 7));
}

TEST(Protocol, ResolveAndParse) {
  EXPECT_EQ(resolve_protocol(Protocol::kAuto, Mode::kESame), Protocol::kLinear);
  EXPECT_EQ(resolve_protocol(Protocol::kAuto, Mode::kClassicalMulti), Protocol::kHeads);
  EXPECT_EQ(resolve_protocol(Protocol::kHeads, Mode::kISame), Protocol::kHeads);
  EXPECT_EQ(parse_protocol("linear"), Protocol::kLinear);
  EXPECT_FALSE(parse_protocol("svm").has_value());
}

TEST(Transfer, RejectsSeenTask) {
  const SynthSetup s;
  training::TrainConfig c;
  c.hidden = 8;
  EXPECT_ANY_THROW(transfer_eval(s.theta, TaskSet::all(), TaskKind::kLP, s.data, s.folds[0], c));
  EXPECT_ANY_THROW(
      transfer_eval(s.theta, TaskSet{TaskKind::kGC, TaskKind::kLP}, TaskKind::kLP, s.data, s.folds[0], c));
}

TEST(Transfer, FreshHeadTrainsOnlyTheHead) {
  testing::QuietLog quiet;
  const SynthSetup s;
  training::TrainConfig c;
  c.hidden = 8;
  c.epochs = 20;
  c.eval_every = 5;
  const auto train = evaluation_graphs(s.ptrs(10), TaskKind::kGC, 1);
  const gnn::ParameterSet head = train_fresh_head(s.theta, TaskKind::kGC, train, train, c);
  EXPECT_EQ(head.checksum(gnn::PartSet{gnn::Part::kGcn}), s.theta.checksum(gnn::PartSet{gnn::Part::kGcn}));
  EXPECT_EQ(head.checksum(gnn::PartSet{gnn::Part::kNc}), s.theta.checksum(gnn::PartSet{gnn::Part::kNc}));
  EXPECT_NE(head.checksum(gnn::PartSet{gnn::Part::kGc}), s.theta.checksum(gnn::PartSet{gnn::Part::kGc}));
  const double m = transfer_eval(s.theta, TaskSet{TaskKind::kNC, TaskKind::kLP}, TaskKind::kGC, s.data, s.folds[0], c);
  EXPECT_GE(m, 0.0);
  EXPECT_LE(m, 100.0);
}

CrossValidationSpec small_spec(Mode mode, TaskSet tasks, std::size_t epochs = 4) {
  CrossValidationSpec spec;
  spec.train.mode = mode;
  spec.train.tasks = tasks;
  spec.train.hidden = 8;
  spec.train.batch_size = 9;
  spec.train.epochs = epochs;
  spec.train.eval_every = 2;
  spec.train.patience = 2;
  spec.config_hash = "h";
  return spec;
}

TEST(CrossValidate, FoldRecordsAndSummary) {
  testing::QuietLog quiet;
  const SynthSetup s;
  CrossValidationSpec spec = small_spec(Mode::kClassicalMulti, TaskSet::all());
  spec.num_folds = 4;
  const MetricsReport r = cross_validate(s.data, spec);
  EXPECT_EQ(r.folds.size(), 4u);
  EXPECT_FALSE(r.partial);
  EXPECT_EQ(r.summary.size(), 3u);
  EXPECT_EQ(r.protocol, "heads");
  EXPECT_EQ(r.config_hash, "h");
  std::vector<double> gc;
  for (const auto& f : r.folds) gc.push_back(f.metrics.at(TaskKind::kGC));
  EXPECT_DOUBLE_EQ(r.summary.at(TaskKind::kGC).mean, mean_std(gc).mean);
  EXPECT_DOUBLE_EQ(r.summary.at(TaskKind::kGC).std, mean_std(gc).std);
}

TEST(CrossValidate, FailingFoldsMarkReportPartial) {
  testing::QuietLog quiet;
  SynthSetup s;
  CrossValidationSpec spec = small_spec(Mode::kClassicalSingle, TaskSet{TaskKind::kNC}, 2);
  spec.num_folds = 4;
  // NC training fails on any fold whose training graphs carry no node labels
  const auto folds = graph::make_folds(s.data, 4, 0);
  for (std::size_t id : folds[1].test_graph_ids) s.data.graphs[id].node_labels.clear();
  for (std::size_t id : folds[1].validation_graph_ids) s.data.graphs[id].node_labels.clear();
  for (std::size_t id : folds[1].train_graph_ids) s.data.graphs[id].node_labels.clear();
  const MetricsReport r = cross_validate(s.data, spec);
  EXPECT_TRUE(r.partial);
  EXPECT_FALSE(r.failed_folds().empty());
  for (std::size_t f : r.failed_folds()) EXPECT_FALSE(r.folds[f].error.empty());
}

TEST(CrossValidate, OnlyFoldsRestrictsRun) {
  testing::QuietLog quiet;
  const SynthSetup s;
  CrossValidationSpec spec = small_spec(Mode::kClassicalSingle, TaskSet{TaskKind::kGC}, 2);
  spec.num_folds = 5;
  spec.only_folds = {1, 3};
  const MetricsReport r = cross_validate(s.data, spec);
  ASSERT_EQ(r.folds.size(), 2u);
  EXPECT_EQ(r.folds[0].fold, 1u);
  EXPECT_EQ(r.folds[1].fold, 3u);
}

TEST(DeltaM, AttachMatchesFoldByFold) {
  MetricsReport multi;
  multi.folds = {{0, {{TaskKind::kGC, 45.0}, {TaskKind::kNC, 88.0}}, ""},
                 {1, {{TaskKind::kGC, 55.0}, {TaskKind::kNC, 80.0}}, ""}};
  multi.summary[TaskKind::kGC] = {50.0, 5.0};
  multi.summary[TaskKind::kNC] = {84.0, 4.0};
  std::map<TaskKind, MetricsReport> base;
  base[TaskKind::kGC].folds = {{0, {{TaskKind::kGC, 50.0}}, ""}, {1, {{TaskKind::kGC, 50.0}}, ""}};
  base[TaskKind::kNC].folds = {{0, {{TaskKind::kNC, 80.0}}, ""}, {1, {{TaskKind::kNC, 80.0}}, ""}};
  attach_delta_m(multi, base);
  ASSERT_TRUE(multi.delta_m.has_value());
  ASSERT_EQ(multi.delta_m_per_fold.size(), 2u);
  EXPECT_NEAR(multi.delta_m_per_fold[0], 0.0, 1e-12);
  EXPECT_NEAR(multi.delta_m_per_fold[1], 5.0, 1e-12);
  EXPECT_NEAR(multi.delta_m->mean, 2.5, 1e-12);
  EXPECT_NEAR(multi.delta_m->std, 2.5, 1e-12);
  // recomputable from stored values
  const std::vector<double> m1{45.0, 88.0};
  const std::vector<double> b1{multi.baseline.at(TaskKind::kGC)[0], multi.baseline.at(TaskKind::kNC)[0]};
  EXPECT_DOUBLE_EQ(delta_m(m1, b1), multi.delta_m_per_fold[0]);
}

TEST(Report, JsonRoundTripAndCsv) {
  MetricsReport r;
  r.dataset = "SYN";
  r.mode = "esame";
  r.tasks = "gc,lp";
  r.protocol = "linear";
  r.seed = 3;
  r.config_hash = "abc";
  r.folds = {{0, {{TaskKind::kGC, 50.0}, {TaskKind::kLP, 70.0}}, ""}, {1, {}, "boom"}};
  r.summary[TaskKind::kGC] = {50.0, 0.0};
  r.partial = true;
  const MetricsReport back = report_from_json(report_to_json(r));
  EXPECT_EQ(report_to_json(back), report_to_json(r));
  std::ostringstream csv;
  write_csv(csv, r);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  EXPECT_NE(text.find("abc,SYN,esame,\"gc,lp\",linear,3,0,gc,accuracy,50"), std::string::npos);
  EXPECT_NE(text.find("roc_auc,70"), std::string::npos);
  EXPECT_NE(text.find(",1,all,error,"), std::string::npos);
}

double classical_gc_accuracy(double strength) {
  testing::QuietLog quiet;
  const SynthSetup s(strength, 80);
  CrossValidationSpec spec = small_spec(Mode::kClassicalSingle, TaskSet{TaskKind::kGC}, 150);
  spec.train.outer_lr = 1e-2;
  spec.train.eval_every = 10;
  spec.train.patience = 5;
  spec.num_folds = 5;
  spec.only_folds = {0, 1};
  return cross_validate(s.data, spec).summary.at(TaskKind::kGC).mean;
}

TEST(EndToEnd, PlantedSignalIsLearned) {
  const double acc = classical_gc_accuracy(1.0);
  EXPECT_GT(acc, 90.0);
}

TEST(EndToEnd, NoSignalScoresNearChance) {
  const double acc = classical_gc_accuracy(0.0);
  EXPECT_NEAR(acc, 50.0, 20.0);
}

}  // namespace
}  // namespace metagraph::evaluation
