// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/graph/tudataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "metagraph/log.hpp"

namespace metagraph::graph {
namespace {

namespace fs = std::filesystem;

struct Line {
  std::size_t number;  // 1-based
  std::vector<std::string> fields;
};

std::vector<std::string> split_fields(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Reads every line; blank lines are only tolerated at the end of the file.
std::vector<Line> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string() + ": cannot open file");
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  std::size_t first_blank = 0;
  while (std::getline(in, text)) {
    ++number;
    auto fields = split_fields(text);
    if (fields.empty()) {
      if (first_blank == 0) first_blank = number;
      continue;
    }
    if (first_blank != 0) {
      throw ParseError(file.string() + ":" + std::to_string(first_blank) +
                       ": blank line inside data");
    }
    lines.push_back(Line{number, std::move(fields)});
  }
  return lines;
}

[[noreturn]] void fail(const fs::path& file, std::size_t line, const std::string& what) {
  throw ParseError(file.string() + ":" + std::to_string(line) + ": " + what);
}

long long parse_int(const fs::path& file, std::size_t line, const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(file, line, "expected integer, got '" + s + "'");
  return v;
}

double parse_double(const fs::path& file, std::size_t line, const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) fail(file, line, "expected number, got '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(file, line, "expected number, got '" + s + "'");
  }
}

std::vector<long long> read_single_column(const fs::path& file) {
  std::vector<long long> out;
  for (const Line& l : read_lines(file)) {
    if (l.fields.size() != 1) fail(file, l.number, "expected one value per line");
    out.push_back(parse_int(file, l.number, l.fields[0]));
  }
  return out;
}

// Maps raw label values to 0..k-1 in ascending order of value.
std::pair<std::vector<int>, int> remap_labels(const std::vector<long long>& raw) {
  std::map<long long, int> ids;
  for (long long v : raw) ids.emplace(v, 0);
  int next = 0;
  for (auto& [v, id] : ids) id = next++;
  std::vector<int> out;
  out.reserve(raw.size());
  for (long long v : raw) out.push_back(ids[v]);
  return {out, next};
}

fs::path file_for(const fs::path& dir, const std::string& name, const std::string& suffix) {
  return dir / (name + "_" + suffix + ".txt");
}

fs::path require(const fs::path& dir, const std::string& name, const std::string& suffix) {
  fs::path f = file_for(dir, name, suffix);
  if (!fs::exists(f)) throw ParseError(f.string() + ": required file is missing");
  return f;
}

}  // namespace

Dataset parse_tudataset(const fs::path& directory, const std::string& name,
                        const ParseOptions& options) {
  const fs::path a_file = require(directory, name, "A");
  const fs::path indicator_file = require(directory, name, "graph_indicator");
  const fs::path graph_label_file = require(directory, name, "graph_labels");
  const fs::path node_label_file = require(directory, name, "node_labels");
  const fs::path attr_file = file_for(directory, name, "node_attributes");

  const std::vector<long long> indicator = read_single_column(indicator_file);
  const std::size_t total_nodes = indicator.size();
  if (total_nodes == 0) throw ParseError(indicator_file.string() + ": no nodes");

  // graph ids are 1-based and must appear in non-decreasing order
  std::vector<std::size_t> node_graph(total_nodes);
  std::vector<std::size_t> node_local(total_nodes);
  std::vector<std::size_t> graph_sizes;
  for (std::size_t i = 0; i < total_nodes; ++i) {
    const long long gid = indicator[i];
    if (gid < 1) fail(indicator_file, i + 1, "graph id must be >= 1");
    const auto g = static_cast<std::size_t>(gid - 1);
    if (g + 1 < graph_sizes.size()) fail(indicator_file, i + 1, "graph ids are not sorted");
    if (g >= graph_sizes.size()) graph_sizes.resize(g + 1, 0);
    node_graph[i] = g;
    node_local[i] = graph_sizes[g]++;
  }
  const std::size_t num_graphs = graph_sizes.size();
  for (std::size_t g = 0; g < num_graphs; ++g) {
    if (graph_sizes[g] == 0) {
      throw ParseError(indicator_file.string() + ": graph " + std::to_string(g + 1) + " has no nodes");
    }
  }

  const std::vector<long long> raw_graph_labels = read_single_column(graph_label_file);
  if (raw_graph_labels.size() != num_graphs) {
    throw ParseError(graph_label_file.string() + ": " + std::to_string(raw_graph_labels.size()) +
                     " labels for " + std::to_string(num_graphs) + " graphs");
  }
  const std::vector<long long> raw_node_labels = read_single_column(node_label_file);
  if (raw_node_labels.size() != total_nodes) {
    throw ParseError(node_label_file.string() + ": " + std::to_string(raw_node_labels.size()) +
                     " labels for " + std::to_string(total_nodes) + " nodes");
  }
  auto [graph_labels, num_graph_classes] = remap_labels(raw_graph_labels);
  auto [node_labels, num_node_classes] = remap_labels(raw_node_labels);

  std::vector<std::vector<double>> attributes;
  std::size_t attr_dim = 0;
  const bool has_attributes = fs::exists(attr_file);
  if (has_attributes) {
    for (const Line& l : read_lines(attr_file)) {
      if (attributes.empty()) attr_dim = l.fields.size();
      if (l.fields.size() != attr_dim) {
        fail(attr_file, l.number, "expected " + std::to_string(attr_dim) + " attributes, got " +
                                      std::to_string(l.fields.size()));
      }
      std::vector<double> row;
      row.reserve(attr_dim);
      for (const auto& f : l.fields) row.push_back(parse_double(attr_file, l.number, f));
      attributes.push_back(std::move(row));
    }
    if (attributes.size() != total_nodes) {
      throw ParseError(attr_file.string() + ": " + std::to_string(attributes.size()) +
                       " attribute rows for " + std::to_string(total_nodes) + " nodes");
    }
  } else {
    log_warning("dataset '" + name + "' has no node attributes; using one-hot node labels as features");
  }

  std::vector<std::set<Edge>> edge_sets(num_graphs);
  std::size_t self_loops = 0;
  for (const Line& l : read_lines(a_file)) {
    if (l.fields.size() != 2) fail(a_file, l.number, "expected 'i, j'");
    const long long i = parse_int(a_file, l.number, l.fields[0]);
    const long long j = parse_int(a_file, l.number, l.fields[1]);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > total_nodes ||
        static_cast<std::size_t>(j) > total_nodes) {
      fail(a_file, l.number, "edge references unknown node");
    }
    const std::size_t a = static_cast<std::size_t>(i - 1);
    const std::size_t b = static_cast<std::size_t>(j - 1);
    if (node_graph[a] != node_graph[b]) fail(a_file, l.number, "edge crosses graphs");
    if (a == b) {
      ++self_loops;
      continue;
    }
    edge_sets[node_graph[a]].insert(Edge{node_local[a], node_local[b]}.canonical());
  }
  if (self_loops > 0) {
    log_warning(a_file.string() + ": dropped " + std::to_string(self_loops) + " self-loops");
  }

  const bool one_hot_labels = !has_attributes || options.append_node_labels;
  const std::size_t feature_dim =
      (has_attributes ? attr_dim : 0) + (one_hot_labels ? static_cast<std::size_t>(num_node_classes) : 0);

  Dataset d;
  d.name = name;
  d.num_graph_classes = num_graph_classes;
  d.num_node_classes = num_node_classes;
  d.feature_dim = feature_dim;
  d.graphs.resize(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    Graph& gr = d.graphs[g];
    gr.id = g;
    gr.num_nodes = graph_sizes[g];
    gr.edges.assign(edge_sets[g].begin(), edge_sets[g].end());
    gr.node_features = ad::Tensor(gr.num_nodes, feature_dim);
    gr.node_labels.resize(gr.num_nodes);
    gr.graph_label = graph_labels[g];
  }
  for (std::size_t i = 0; i < total_nodes; ++i) {
    Graph& gr = d.graphs[node_graph[i]];
    const std::size_t v = node_local[i];
    gr.node_labels[v] = node_labels[i];
    auto row = gr.node_features.row(v);
    std::size_t c = 0;
    if (has_attributes) {
      for (double x : attributes[i]) row[c++] = x;
    }
    if (one_hot_labels) row[c + static_cast<std::size_t>(node_labels[i])] = 1.0;
  }
  validate_dataset(d);
  return d;
}

}  // namespace metagraph::graph
