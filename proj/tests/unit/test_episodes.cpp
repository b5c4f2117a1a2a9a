// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "metagraph/episodes/dump.hpp"
#include "metagraph/episodes/episode.hpp"
#include "oracles.hpp"

namespace metagraph::episodes {
namespace {

using graph::Edge;
using graph::Graph;

std::vector<Graph> random_batch(std::size_t count, Rng& rng, std::size_t first_id = 0) {
  std::vector<Graph> gs;
  for (std::size_t i = 0; i < count; ++i) {
    gs.push_back(testing::random_graph(first_id + i, 8 + uniform_index(rng, 20), 3, 3, 2, 0.2, rng));
  }
  return gs;
}

Graph complete_graph(std::size_t n, std::size_t id) {
  Graph g;
  g.id = id;
  g.num_nodes = n;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) g.edges.push_back({u, v});
  }
  g.node_features = ad::Tensor(n, 2, 1.0);
  for (std::size_t v = 0; v < n; ++v) g.node_labels.push_back(static_cast<int>(v % 2));
  g.graph_label = 0;
  return g;
}

bool near(std::size_t got, double want) { return std::abs(static_cast<double>(got) - want) <= 1.0; }

TEST(SplitCount, FloorWithMinimumOne) {
  EXPECT_EQ(split_count(10, 0.3), 3u);
  EXPECT_EQ(split_count(20, 0.2), 4u);
  EXPECT_EQ(split_count(3, 0.2), 1u);
  EXPECT_EQ(split_count(10, 0.6), 6u);
}

TEST(Tasks, ParseAndPrint) {
  EXPECT_EQ(TaskSet::parse("gc,lp").str(), "gc,lp");
  EXPECT_EQ(TaskSet::parse("lp,gc"), (TaskSet{TaskKind::kGC, TaskKind::kLP}));
  EXPECT_EQ(TaskSet::parse("gc,nc,lp").size(), 3u);
  EXPECT_ANY_THROW(TaskSet::parse("gc,xx"));
  EXPECT_EQ(parse_task("nc"), TaskKind::kNC);
  EXPECT_FALSE(parse_task("node").has_value());
}

TEST(BuildEpisode, EqualDivisionAcrossTasks) {
  Rng rng(1);
  const auto batch = random_batch(9, rng);
  const MultiTaskEpisode e = build_episode(batch, {}, TaskSet::all(), 5);
  ASSERT_EQ(e.tasks.size(), 3u);
  EXPECT_EQ(e.tasks[0].kind, TaskKind::kGC);
  EXPECT_EQ(e.tasks[1].kind, TaskKind::kNC);
  EXPECT_EQ(e.tasks[2].kind, TaskKind::kLP);
  EXPECT_EQ(e.tasks[0].support.size() + e.tasks[0].target.size(), 3u);
  EXPECT_EQ(e.tasks[1].support.size(), 3u);
  EXPECT_EQ(e.tasks[2].support.size(), 3u);
  EXPECT_TRUE(validate_episode(e).empty());
}

TEST(BuildEpisode, GcSixtyForty) {
  Rng rng(2);
  const auto batch = random_batch(10, rng);
  const MultiTaskEpisode e = build_episode(batch, {}, TaskSet{TaskKind::kGC}, 3);
  ASSERT_EQ(e.tasks.size(), 1u);
  EXPECT_EQ(e.tasks[0].support.size(), 6u);
  EXPECT_EQ(e.tasks[0].target.size(), 4u);
}

TEST(SplitNodes, ThirtyPercentSupport) {
  Rng rng(3);
  Graph g = testing::random_graph(0, 10, 2, 3, 2, 0.3, rng);
  const NcSplit s = split_nodes(g, 11);
  EXPECT_EQ(s.support.size(), 3u);
  EXPECT_EQ(s.target.size(), 7u);
  std::set<std::size_t> all(s.support.begin(), s.support.end());
  all.insert(s.target.begin(), s.target.end());
  EXPECT_EQ(all.size(), 10u);
}

TEST(SplitNodes, CoversEveryClassWhenPossible) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t classes = 2 + uniform_index(rng, 3);
    Graph g = testing::random_graph(0, 10 + uniform_index(rng, 30), 2, classes, 2, 0.2, rng);
    shuffle(g.node_labels, rng);
    const NcSplit s = split_nodes(g, trial);
    EXPECT_TRUE(near(s.support.size(), 0.3 * g.num_nodes));
    std::set<int> present(g.node_labels.begin(), g.node_labels.end());
    if (split_count(g.num_nodes, 0.3) < present.size()) continue;
    std::set<int> covered;
    for (std::size_t v : s.support) covered.insert(g.node_labels[v]);
    EXPECT_EQ(covered, present);
  }
}

TEST(SplitEdges, TwentyEdgeExample) {
  Graph g;
  g.num_nodes = 12;
  for (std::size_t v = 1; v < 12; ++v) g.edges.push_back({v - 1, v});
  for (std::size_t v = 2; v < 11; ++v) g.edges.push_back({v - 2, v});
  ASSERT_EQ(g.edges.size(), 20u);
  g.node_features = ad::Tensor(12, 1, 1.0);
  const LpSplit s = split_edges(g, 8);
  EXPECT_EQ(s.removed_edges.size(), 4u);
  EXPECT_EQ(s.remaining_edges.size(), 16u);
  EXPECT_EQ(s.support_negatives.size(), 16u);
  EXPECT_EQ(s.target_negatives.size(), 4u);
}

TEST(SplitEdges, FractionsAndDisjointness) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = testing::random_graph(0, 8 + uniform_index(rng, 30), 2, 2, 2, 0.25, rng);
    const LpSplit s = split_edges(g, trial);
    const std::size_t m = g.edges.size();
    EXPECT_TRUE(near(s.removed_edges.size(), 0.2 * m));
    EXPECT_EQ(s.removed_edges.size() + s.remaining_edges.size(), m);
    const std::size_t negatives = s.support_negatives.size() + s.target_negatives.size();
    EXPECT_LE(negatives, m);
    EXPECT_TRUE(near(s.target_negatives.size(), 0.2 * negatives));
    std::set<Edge> real;
    for (const Edge& e : g.edges) real.insert(e.canonical());
    std::set<Edge> seen;
    for (const auto* list : {&s.support_negatives, &s.target_negatives}) {
      for (const Edge& e : *list) {
        EXPECT_NE(e.u, e.v);
        EXPECT_FALSE(real.count(e.canonical()));
        EXPECT_TRUE(seen.insert(e.canonical()).second);
      }
    }
  }
}

TEST(NegativeSampling, DenseGraphFallsBackToEnumeration) {
  Graph g = complete_graph(7, 0);
  g.edges.erase(g.edges.begin() + 3);
  g.edges.erase(g.edges.begin() + 10);
  const auto negs = sample_negative_edges(g, 5, 1);
  EXPECT_EQ(negs.size(), 2u);
  EXPECT_TRUE(sample_negative_edges(complete_graph(5, 0), 3, 1).empty());
}

TEST(BuildEpisode, RandomBatchesAlwaysValid) {
  Rng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto batch = random_batch(6 + uniform_index(rng, 10), rng);
    TaskSet tasks;
    for (TaskKind t : kAllTasks) {
      if (uniform_index(rng, 2) == 0) tasks.insert(t);
    }
    if (tasks.empty()) tasks = TaskSet::all();
    const auto e = build_episode(batch, {}, tasks, rng());
    const auto violations = validate_episode(e);
    EXPECT_TRUE(violations.empty()) << "trial " << trial << ": " << violations.front();
  }
}

TEST(BuildEpisode, Deterministic) {
  Rng rng(7);
  const auto batch = random_batch(12, rng);
  const auto a = build_episode(batch, {}, TaskSet::all(), 99);
  const auto b = build_episode(batch, {}, TaskSet::all(), 99);
  EXPECT_EQ(episode_to_json(a), episode_to_json(b));
  EXPECT_NE(episode_to_json(a), episode_to_json(build_episode(batch, {}, TaskSet::all(), 100)));
}

TEST(BuildEpisode, ReassignsGraphsLackingAnnotations) {
  Rng rng(8);
  auto batch = random_batch(12, rng);
  for (std::size_t i = 0; i < 6; ++i) batch[i].graph_label.reset();
  const auto e = build_episode(batch, {}, TaskSet::all(), 1);
  EXPECT_TRUE(validate_episode(e).empty());
  const TaskData* gc = e.find(TaskKind::kGC);
  ASSERT_NE(gc, nullptr);
  for (const auto* view : {&gc->support, &gc->target}) {
    for (const Graph& g : *view) EXPECT_GE(g.id, 6u);
  }
  std::size_t placed = 0;
  for (const TaskData& t : e.tasks) placed += t.kind == TaskKind::kGC ? t.support.size() + t.target.size() : t.support.size();
  EXPECT_EQ(placed, 12u);

  for (auto& g : batch) g.graph_label.reset();
  EXPECT_ANY_THROW(build_episode(batch, {}, TaskSet::all(), 1));
}

TEST(BuildEpisode, SkipsSmallLpGraphs) {
  Rng rng(9);
  Graph tiny;
  tiny.id = 0;
  tiny.num_nodes = 3;
  tiny.edges = {{0, 1}, {1, 2}};
  tiny.node_features = ad::Tensor(3, 3, 1.0);
  EXPECT_FALSE(supports_task(tiny, TaskKind::kLP));
  EXPECT_FALSE(supports_task(tiny, TaskKind::kGC));
  EXPECT_ANY_THROW(build_episode(std::vector<Graph>{tiny}, {}, TaskSet{TaskKind::kLP}, 1));
}

TEST(BuildEpisode, SingleTaskModeUsesWholeBatch) {
  Rng rng(10);
  const auto batch = random_batch(10, rng);
  const auto e = build_episode(batch, {}, TaskSet{TaskKind::kNC}, 1);
  ASSERT_EQ(e.tasks.size(), 1u);
  EXPECT_EQ(e.tasks[0].support.size(), 10u);
}

TEST(ConcurrentEpisode, EveryTaskOnEveryGraph) {
  Rng rng(11);
  const auto batch = random_batch(6, rng);
  std::vector<const Graph*> ptrs;
  for (const auto& g : batch) ptrs.push_back(&g);
  const auto e = build_concurrent_episode(ptrs, {}, TaskSet::all(), 3);
  EXPECT_TRUE(e.concurrent);
  EXPECT_TRUE(validate_episode(e).empty());
  EXPECT_EQ(e.find(TaskKind::kNC)->support.size(), 6u);
  EXPECT_EQ(e.find(TaskKind::kLP)->support.size(), 6u);
  EXPECT_EQ(e.find(TaskKind::kGC)->support.size() + e.find(TaskKind::kGC)->target.size(), 6u);
}

TEST(Validate, MultiAssignedGraph) {
  Rng rng(12);
  const auto batch = random_batch(9, rng);
  auto e = build_episode(batch, {}, TaskSet::all(), 2);
  ASSERT_TRUE(validate_episode(e).empty());
  TaskData& gc = e.tasks[0];
  const std::size_t lp_id = e.tasks[2].support[0].id;
  Graph dup = batch[lp_id];
  gc.target.push_back(dup);
  const auto v = validate_episode(e);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("multi-assigned"), std::string::npos);
}

TEST(Validate, NegativeThatIsARealEdge) {
  Rng rng(13);
  const auto batch = random_batch(3, rng);
  auto e = build_episode(batch, {}, TaskSet{TaskKind::kLP}, 4);
  ASSERT_TRUE(validate_episode(e).empty());
  TaskData& lp = e.tasks[0];
  lp.support[0].negative_edges->push_back(lp.target[0].positive_edges->front());
  const auto v = validate_episode(e);
  ASSERT_FALSE(v.empty());
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const std::string& s) {
    return s.find("negative is a real edge") != std::string::npos;
  }));
}

TEST(Validate, NcOverlapAndLambdaRange) {
  Rng rng(14);
  const auto batch = random_batch(3, rng);
  auto e = build_episode(batch, {}, TaskSet{TaskKind::kNC}, 4);
  e.tasks[0].target[0].labelled_nodes->push_back(e.tasks[0].support[0].labelled_nodes->front());
  e.lambdas[TaskKind::kGC] = 1.5;
  const auto v = validate_episode(e);
  EXPECT_EQ(v.size(), 2u);
}

TEST(Dump, RoundTrip) {
  Rng rng(15);
  const auto batch = random_batch(9, rng);
  Lambdas l;
  l[TaskKind::kLP] = 0.25;
  const auto e = build_episode(batch, l, TaskSet::all(), 21);
  const nlohmann::json j = episode_to_json(e);
  const auto back = episode_from_json(j);
  EXPECT_EQ(episode_to_json(back), j);
  EXPECT_EQ(back.lambdas, l);
  EXPECT_TRUE(j.contains("tasks"));
}

}  // namespace
}  // namespace metagraph::episodes
