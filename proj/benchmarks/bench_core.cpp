// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "metagraph/autodiff/ops.hpp"
#include "metagraph/episodes/episode.hpp"
#include "metagraph/gnn/model.hpp"
#include "metagraph/graph/synthetic.hpp"
#include "metagraph/random.hpp"
#include "metagraph/training/meta.hpp"

namespace {

using namespace metagraph;

ad::Tensor filled(std::size_t r, std::size_t c, Rng& rng) {
  ad::Tensor t(r, c);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = uniform01(rng) - 0.5;
  return t;
}

// ENZYMES-sized graphs: ~33 nodes, 18 features
graph::Dataset enzymes_like(std::size_t graphs) {
  graph::SynthSpec spec;
  spec.num_graphs = graphs;
  spec.min_nodes = 20;
  spec.max_nodes = 46;
  spec.num_graph_classes = 6;
  spec.num_node_classes = 3;
  spec.feature_dim = 18;
  return graph::synth_dataset(spec, 1);
}

gnn::GnnConfig model_for(const graph::Dataset& d, std::size_t hidden) {
  gnn::GnnConfig c;
  c.feature_dim = d.feature_dim;
  c.hidden = hidden;
  c.num_node_classes = d.num_node_classes;
  c.num_graph_classes = d.num_graph_classes;
  return c;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  ad::Tape tape;
  const ad::Var a = tape.constant(filled(n, n, rng));
  const ad::Var b = tape.constant(filled(n, n, rng));
  for (auto _ : state) benchmark::DoNotOptimize(ad::matmul(a, b).value()[0]);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256);

void BM_Encode(benchmark::State& state) {
  const graph::Dataset d = enzymes_like(30);
  const gnn::GnnConfig c = model_for(d, static_cast<std::size_t>(state.range(0)));
  const gnn::ParameterSet p = gnn::init_parameters(c, 2);
  const gnn::GraphBatch batch = gnn::GraphBatch::build(d.graphs, d.feature_dim);
  for (auto _ : state) {
    ad::Tape tape;
    benchmark::DoNotOptimize(gnn::encode(gnn::bind_constants(tape, p), c, batch).value()[0]);
  }
}
BENCHMARK(BM_Encode)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BuildEpisode(benchmark::State& state) {
  const graph::Dataset d = enzymes_like(30);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(episodes::build_episode(d.graphs, {}, episodes::TaskSet::all(), ++seed).tasks.size());
  }
}
BENCHMARK(BM_BuildEpisode)->Unit(benchmark::kMicrosecond);

void BM_MetaUpdate(benchmark::State& state) {
  const graph::Dataset d = enzymes_like(30);
  const gnn::GnnConfig c = model_for(d, static_cast<std::size_t>(state.range(0)));
  gnn::ParameterSet theta = gnn::init_parameters(c, 3);
  const std::vector<training::PreparedEpisode> eps{
      training::prepare_episode(episodes::build_episode(d.graphs, {}, episodes::TaskSet::all(), 4), d.feature_dim)};
  training::InnerLoop loop;
  loop.adapt_set = state.range(1) ? gnn::PartSet::all() : gnn::PartSet::heads();
  loop.first_order = state.range(2) != 0;
  training::AdamState adam;
  for (auto _ : state) benchmark::DoNotOptimize(training::meta_update(theta, eps, adam, loop, 1e-3, 10.0).objective);
}
BENCHMARK(BM_MetaUpdate)
    ->ArgNames({"hidden", "isame", "first_order"})
    ->Args({64, 0, 0})
    ->Args({64, 1, 0})
    ->Args({64, 1, 1})
    ->Args({256, 1, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
