// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/episodes/episode.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "metagraph/log.hpp"
#include "metagraph/random.hpp"

namespace metagraph::episodes {

using graph::Edge;
using graph::Graph;

namespace {

constexpr std::uint64_t kTagAssign = 0x61737369676e;
constexpr std::uint64_t kTagGc = 0x6763;
constexpr std::uint64_t kTagNc = 0x6e63;
constexpr std::uint64_t kTagLp = 0x6c70;
constexpr std::uint64_t kTagNegatives = 0x6e6567;

std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

Graph stripped(const Graph& g) {
  Graph out = g;
  out.labelled_nodes.reset();
  out.positive_edges.reset();
  out.negative_edges.reset();
  return out;
}

TaskData split_gc(std::vector<const Graph*> graphs, std::uint64_t seed) {
  TaskData t{TaskKind::kGC, {}, {}};
  if (graphs.size() < 2) return t;
  Rng rng(derive_seed(seed, {kTagGc}));
  shuffle(graphs, rng);
  const std::size_t n_support = std::min(split_count(graphs.size(), kGcSupportFraction), graphs.size() - 1);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    (i < n_support ? t.support : t.target).push_back(stripped(*graphs[i]));
  }
  return t;
}

TaskData split_nc(const std::vector<const Graph*>& graphs, std::uint64_t seed) {
  TaskData t{TaskKind::kNC, {}, {}};
  for (const Graph* g : graphs) {
    NcSplit s = split_nodes(*g, derive_seed(seed, {kTagNc, g->id}));
    Graph support = stripped(*g);
    Graph target = support;
    support.labelled_nodes = std::move(s.support);
    target.labelled_nodes = std::move(s.target);
    t.support.push_back(std::move(support));
    t.target.push_back(std::move(target));
  }
  return t;
}

TaskData split_lp(const std::vector<const Graph*>& graphs, std::uint64_t seed) {
  TaskData t{TaskKind::kLP, {}, {}};
  for (const Graph* g : graphs) {
    LpSplit s = split_edges(*g, derive_seed(seed, {kTagLp, g->id}));
    Graph support = stripped(*g);
    support.edges = s.remaining_edges;
    Graph target = support;
    support.positive_edges = std::move(s.remaining_edges);
    support.negative_edges = std::move(s.support_negatives);
    target.positive_edges = std::move(s.removed_edges);
    target.negative_edges = std::move(s.target_negatives);
    t.support.push_back(std::move(support));
    t.target.push_back(std::move(target));
  }
  return t;
}

TaskData split_task(TaskKind kind, const std::vector<const Graph*>& graphs, std::uint64_t seed) {
  switch (kind) {
    case TaskKind::kGC: return split_gc(graphs, seed);
    case TaskKind::kNC: return split_nc(graphs, seed);
    case TaskKind::kLP: return split_lp(graphs, seed);
  }
  throw std::logic_error("split_task: unknown task");
}

void require_nonempty(const TaskData& t) {
  if (t.support.empty() || t.target.empty()) {
    throw std::invalid_argument("episode: task " + std::string(task_name(t.kind)) +
                                " has an empty support or target set");
  }
}

}  // namespace

std::string_view task_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kGC: return "gc";
    case TaskKind::kNC: return "nc";
    case TaskKind::kLP: return "lp";
  }
  return "?";
}

std::optional<TaskKind> parse_task(std::string_view name) {
  for (TaskKind t : kAllTasks) {
    if (task_name(t) == name) return t;
  }
  return std::nullopt;
}

TaskSet TaskSet::parse(std::string_view list) {
  TaskSet s;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, comma - start);
    const auto kind = parse_task(item);
    if (!kind) throw std::invalid_argument("unknown task '" + std::string(item) + "' (expected gc, nc or lp)");
    s.insert(*kind);
    start = comma + 1;
  }
  return s;
}

std::size_t TaskSet::size() const { return kinds().size(); }

std::vector<TaskKind> TaskSet::kinds() const {
  std::vector<TaskKind> out;
  for (TaskKind t : kAllTasks) {
    if (contains(t)) out.push_back(t);
  }
  return out;
}

std::string TaskSet::str() const {
  std::string s;
  for (TaskKind t : kinds()) {
    if (!s.empty()) s += ',';
    s += task_name(t);
  }
  return s;
}

const TaskData* MultiTaskEpisode::find(TaskKind kind) const {
  for (const auto& t : tasks) {
    if (t.kind == kind) return &t;
  }
  return nullptr;
}

std::size_t split_count(std::size_t n, double fraction) {
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction));
  return std::max<std::size_t>(1, k);
}

bool supports_task(const Graph& g, TaskKind kind, const EpisodeOptions& options) {
  switch (kind) {
    case TaskKind::kGC:
      return g.graph_label.has_value() && g.num_nodes > 0;
    case TaskKind::kNC: {
      if (!g.has_node_labels() || g.num_nodes < 2) return false;
      const std::size_t classes = options.num_node_classes > 0
                                      ? static_cast<std::size_t>(options.num_node_classes)
                                      : graph::distinct_node_labels(g);
      return g.num_nodes >= classes;
    }
    case TaskKind::kLP:
      return g.edges.size() >= kLpMinEdges && pair_count(g.num_nodes) >= g.edges.size() + 2;
  }
  return false;
}

NcSplit split_nodes(const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.num_nodes;
  if (n < 2) throw std::invalid_argument("split_nodes: graph " + std::to_string(g.id) + " has < 2 nodes");
  const std::size_t want = std::min(split_count(n, kNcSupportFraction), n - 1);
  Rng rng(seed);

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t v = 0; v < n; ++v) by_class[g.has_node_labels() ? g.node_labels[v] : 0].push_back(v);
  std::vector<std::vector<std::size_t>> pools;
  for (auto& [label, nodes] : by_class) {
    shuffle(nodes, rng);
    pools.push_back(std::move(nodes));
  }

  // one node per class per round, visiting classes in a fresh random order
  NcSplit s;
  std::vector<std::size_t> order(pools.size());
  while (s.support.size() < want) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    for (std::size_t c : order) {
      if (s.support.size() == want) break;
      if (pools[c].empty()) continue;
      s.support.push_back(pools[c].back());
      pools[c].pop_back();
    }
  }
  std::sort(s.support.begin(), s.support.end());
  std::vector<bool> chosen(n, false);
  for (std::size_t v : s.support) chosen[v] = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (!chosen[v]) s.target.push_back(v);
  }
  return s;
}

std::vector<Edge> sample_negative_edges(const Graph& g, std::size_t count, std::uint64_t seed) {
  const std::size_t n = g.num_nodes;
  const std::set<Edge> real(g.edges.begin(), g.edges.end());
  const std::size_t available = n < 2 ? 0 : pair_count(n) - real.size();
  const std::size_t want = std::min(count, available);
  Rng rng(seed);
  std::set<Edge> taken;
  std::vector<Edge> out;
  out.reserve(want);
  const std::size_t max_attempts = kNegativeSamplingAttemptFactor * want;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < want; ++attempt) {
    const std::size_t u = uniform_index(rng, n);
    const std::size_t v = uniform_index(rng, n);
    if (u == v) continue;
    const Edge e = Edge{u, v}.canonical();
    if (real.count(e) || !taken.insert(e).second) continue;
    out.push_back(e);
  }
  if (out.size() < want) {
    std::vector<Edge> rest;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        const Edge e{u, v};
        if (!real.count(e) && !taken.count(e)) rest.push_back(e);
      }
    }
    shuffle(rest, rng);
    for (std::size_t i = 0; out.size() < want; ++i) out.push_back(rest[i]);
  }
  return out;
}

LpSplit split_edges(const Graph& g, std::uint64_t seed) {
  std::vector<Edge> edges;
  edges.reserve(g.edges.size());
  for (const Edge& e : g.edges) edges.push_back(e.canonical());
  if (edges.size() < 2) {
    throw std::invalid_argument("split_edges: graph " + std::to_string(g.id) + " has < 2 edges");
  }
  Rng rng(seed);
  std::vector<Edge> negatives = sample_negative_edges(g, edges.size(), derive_seed(seed, {kTagNegatives}));
  if (negatives.size() < 2) {
    throw std::invalid_argument("split_edges: graph " + std::to_string(g.id) + " has < 2 non-edges");
  }
  shuffle(negatives, rng);
  shuffle(edges, rng);

  LpSplit s;
  const std::size_t n_removed = std::min(split_count(edges.size(), kLpTargetEdgeFraction), edges.size() - 1);
  s.removed_edges.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_removed));
  s.remaining_edges.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_removed), edges.end());
  const std::size_t n_target_neg =
      std::min(split_count(negatives.size(), kLpTargetNegativeFraction), negatives.size() - 1);
  s.target_negatives.assign(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(n_target_neg));
  s.support_negatives.assign(negatives.begin() + static_cast<std::ptrdiff_t>(n_target_neg), negatives.end());
  for (auto* v : {&s.removed_edges, &s.remaining_edges, &s.target_negatives, &s.support_negatives}) {
    std::sort(v->begin(), v->end());
  }
  return s;
}

MultiTaskEpisode build_episode(std::span<const Graph* const> batch, const Lambdas& lambdas,
                               const TaskSet& active_tasks, std::uint64_t seed,
                               const EpisodeOptions& options) {
  const std::vector<TaskKind> kinds = active_tasks.kinds();
  if (kinds.empty()) throw std::invalid_argument("build_episode: no active tasks");
  if (batch.size() < kinds.size()) {
    throw std::invalid_argument("build_episode: batch of " + std::to_string(batch.size()) +
                                " graphs cannot cover " + std::to_string(kinds.size()) + " tasks");
  }

  std::vector<const Graph*> order(batch.begin(), batch.end());
  Rng rng(derive_seed(seed, {kTagAssign}));
  shuffle(order, rng);

  // equal division, then move graphs to a task they can serve
  std::array<std::vector<const Graph*>, 3> assigned;
  std::vector<const Graph*> misfits;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const TaskKind t = kinds[p % kinds.size()];
    if (supports_task(*order[p], t, options)) {
      assigned[static_cast<std::size_t>(t)].push_back(order[p]);
    } else {
      misfits.push_back(order[p]);
    }
  }
  for (const Graph* g : misfits) {
    std::optional<TaskKind> best;
    for (TaskKind t : kinds) {
      if (!supports_task(*g, t, options)) continue;
      if (!best || assigned[static_cast<std::size_t>(t)].size() < assigned[static_cast<std::size_t>(*best)].size()) {
        best = t;
      }
    }
    if (best) {
      assigned[static_cast<std::size_t>(*best)].push_back(g);
    } else {
      log_warning("episode: graph " + std::to_string(g->id) + " supports none of the active tasks; skipped");
    }
  }

  // GC needs two graphs to split; borrow one from the largest task that can spare it
  auto& gc = assigned[static_cast<std::size_t>(TaskKind::kGC)];
  if (active_tasks.contains(TaskKind::kGC) && gc.size() == 1) {
    std::optional<TaskKind> donor;
    for (TaskKind t : kinds) {
      if (t == TaskKind::kGC) continue;
      const auto& pool = assigned[static_cast<std::size_t>(t)];
      const bool spare = pool.size() > 1 && std::any_of(pool.begin(), pool.end(), [&](const Graph* g) {
        return supports_task(*g, TaskKind::kGC, options);
      });
      if (spare && (!donor || pool.size() > assigned[static_cast<std::size_t>(*donor)].size())) donor = t;
    }
    if (donor) {
      auto& pool = assigned[static_cast<std::size_t>(*donor)];
      auto it = std::find_if(pool.rbegin(), pool.rend(),
                             [&](const Graph* g) { return supports_task(*g, TaskKind::kGC, options); });
      gc.push_back(*it);
      pool.erase(std::next(it).base());
    }
  }

  MultiTaskEpisode ep;
  ep.id = seed;
  ep.lambdas = lambdas;
  for (TaskKind t : kinds) {
    TaskData data = split_task(t, assigned[static_cast<std::size_t>(t)], seed);
    require_nonempty(data);
    ep.tasks.push_back(std::move(data));
  }
  return ep;
}

MultiTaskEpisode build_episode(const std::vector<Graph>& batch, const Lambdas& lambdas,
                               const TaskSet& active_tasks, std::uint64_t seed,
                               const EpisodeOptions& options) {
  std::vector<const Graph*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& g : batch) ptrs.push_back(&g);
  return build_episode(ptrs, lambdas, active_tasks, seed, options);
}

MultiTaskEpisode build_concurrent_episode(std::span<const Graph* const> batch, const Lambdas& lambdas,
                                          const TaskSet& active_tasks, std::uint64_t seed,
                                          const EpisodeOptions& options) {
  const std::vector<TaskKind> kinds = active_tasks.kinds();
  if (kinds.empty()) throw std::invalid_argument("build_concurrent_episode: no active tasks");
  MultiTaskEpisode ep;
  ep.id = seed;
  ep.lambdas = lambdas;
  ep.concurrent = true;
  for (TaskKind t : kinds) {
    std::vector<const Graph*> usable;
    for (const Graph* g : batch) {
      if (supports_task(*g, t, options)) usable.push_back(g);
    }
    TaskData data = split_task(t, usable, seed);
    require_nonempty(data);
    ep.tasks.push_back(std::move(data));
  }
  return ep;
}

}  // namespace metagraph::episodes
