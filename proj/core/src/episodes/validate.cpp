// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>
#include <string>

#include "metagraph/episodes/episode.hpp"

namespace metagraph::episodes {

using graph::Edge;
using graph::Graph;

namespace {

std::string edge_str(const Edge& e) { return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")"; }

std::set<Edge> canonical_set(const std::vector<Edge>& edges) {
  std::set<Edge> s;
  for (const Edge& e : edges) s.insert(e.canonical());
  return s;
}

class Checker {
 public:
  explicit Checker(std::vector<std::string>& out) : out_(out) {}

  void check(const TaskData& t) {
    prefix_ = "task " + std::string(task_name(t.kind)) + ": ";
    if (t.support.empty()) add("empty support set");
    if (t.target.empty()) add("empty target set");
    for (const Graph& g : t.support) graph_ok(g, "support");
    for (const Graph& g : t.target) graph_ok(g, "target");
    switch (t.kind) {
      case TaskKind::kGC: check_gc(t); break;
      case TaskKind::kNC: check_paired(t, &Checker::check_nc_pair); break;
      case TaskKind::kLP: check_paired(t, &Checker::check_lp_pair); break;
    }
  }

 private:
  void add(const std::string& msg) { out_.push_back(prefix_ + msg); }

  void graph_ok(const Graph& g, const char* view) {
    for (const auto& p : graph::check_graph(g)) add(std::string(view) + " " + p);
  }

  void check_gc(const TaskData& t) {
    std::set<std::size_t> support_ids;
    for (const Graph& g : t.support) {
      if (!g.graph_label) add("graph " + std::to_string(g.id) + " has no graph label");
      if (!support_ids.insert(g.id).second) add("graph " + std::to_string(g.id) + " repeated in support");
    }
    std::set<std::size_t> target_ids;
    for (const Graph& g : t.target) {
      if (!g.graph_label) add("graph " + std::to_string(g.id) + " has no graph label");
      if (support_ids.count(g.id)) add("graph " + std::to_string(g.id) + " in both support and target");
      if (!target_ids.insert(g.id).second) add("graph " + std::to_string(g.id) + " repeated in target");
    }
  }

  void check_paired(const TaskData& t, void (Checker::*pair_check)(const Graph&, const Graph&)) {
    if (t.support.size() != t.target.size()) {
      add("support and target hold different graph counts");
      return;
    }
    std::set<std::size_t> ids;
    for (std::size_t i = 0; i < t.support.size(); ++i) {
      const Graph& s = t.support[i];
      const Graph& q = t.target[i];
      if (!ids.insert(s.id).second) add("graph " + std::to_string(s.id) + " repeated");
      if (s.id != q.id || s.num_nodes != q.num_nodes || canonical_set(s.edges) != canonical_set(q.edges)) {
        add("support and target views of graph " + std::to_string(s.id) + " differ");
        continue;
      }
      (this->*pair_check)(s, q);
    }
  }

  void check_nc_pair(const Graph& s, const Graph& q) {
    const std::string g = "graph " + std::to_string(s.id) + ": ";
    if (!s.has_node_labels()) add(g + "missing node labels");
    if (!s.labelled_nodes || !q.labelled_nodes) {
      add(g + "missing labelled_nodes");
      return;
    }
    std::set<std::size_t> support(s.labelled_nodes->begin(), s.labelled_nodes->end());
    std::set<std::size_t> all = support;
    for (std::size_t v : *q.labelled_nodes) {
      if (support.count(v)) add(g + "node " + std::to_string(v) + " labelled in both support and target");
      all.insert(v);
    }
    if (all.size() != s.num_nodes || (!all.empty() && *all.rbegin() >= s.num_nodes)) {
      add(g + "support and target labelled nodes do not cover the graph");
    }
    if (s.labelled_nodes->empty()) add(g + "no support nodes");
    if (q.labelled_nodes->empty()) add(g + "no target nodes");
  }

  void check_lp_pair(const Graph& s, const Graph& q) {
    const std::string g = "graph " + std::to_string(s.id) + ": ";
    if (!s.positive_edges || !s.negative_edges || !q.positive_edges || !q.negative_edges) {
      add(g + "missing query edges");
      return;
    }
    const std::set<Edge> topology = canonical_set(s.edges);
    const std::set<Edge> sp = canonical_set(*s.positive_edges);
    const std::set<Edge> tp = canonical_set(*q.positive_edges);
    const std::set<Edge> sn = canonical_set(*s.negative_edges);
    const std::set<Edge> tn = canonical_set(*q.negative_edges);
    for (const Edge& e : sp) {
      if (!topology.count(e)) add(g + "support positive " + edge_str(e) + " missing from topology");
      if (tp.count(e)) add(g + "positive " + edge_str(e) + " in both support and target");
    }
    for (const Edge& e : tp) {
      if (topology.count(e)) add(g + "target positive " + edge_str(e) + " still present in topology");
    }
    for (const Edge& e : sn) {
      if (tn.count(e)) add(g + "negative " + edge_str(e) + " in both support and target");
    }
    for (const std::set<Edge>* negs : {&sn, &tn}) {
      for (const Edge& e : *negs) {
        // the removed target positives are still real edges of the source graph
        if (tp.count(e)) add(g + "negative is a real edge " + edge_str(e));
      }
    }
    if (sp.empty() || tp.empty()) add(g + "empty positive set");
    if (sn.empty() || tn.empty()) add(g + "empty negative set");
  }

  std::vector<std::string>& out_;
  std::string prefix_;
};

}  // namespace

std::vector<std::string> validate_episode(const MultiTaskEpisode& episode) {
  std::vector<std::string> out;
  Checker checker(out);
  std::set<TaskKind> seen;
  for (const TaskData& t : episode.tasks) {
    if (!seen.insert(t.kind).second) out.push_back("task " + std::string(task_name(t.kind)) + " listed twice");
    checker.check(t);
  }
  for (TaskKind t : kAllTasks) {
    const double l = episode.lambdas[t];
    if (!(l >= 0.0 && l <= 1.0)) out.push_back("lambda for " + std::string(task_name(t)) + " outside [0,1]");
  }
  if (!episode.concurrent) {
    std::map<std::size_t, TaskKind> owner;
    for (const TaskData& t : episode.tasks) {
      std::set<std::size_t> ids;
      for (const Graph& g : t.support) ids.insert(g.id);
      for (const Graph& g : t.target) ids.insert(g.id);
      for (std::size_t id : ids) {
        auto [it, fresh] = owner.emplace(id, t.kind);
        if (!fresh) {
          out.push_back("graph " + std::to_string(id) + " multi-assigned (" +
                        std::string(task_name(it->second)) + ", " + std::string(task_name(t.kind)) + ")");
        }
      }
    }
  }
  return out;
}

}  // namespace metagraph::episodes
