// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reader for the TUDataset flat-file benchmark format.
//
// Files, all with 1-based indices:
//   {name}_A.txt                one "i, j" edge per line (global node ids)
//   {name}_graph_indicator.txt  graph id of each node, one per line
//   {name}_graph_labels.txt     one label per graph
//   {name}_node_labels.txt      one label per node
//   {name}_node_attributes.txt  optional, comma-separated floats per node

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "metagraph/graph/graph.hpp"

namespace metagraph::graph {

/// Raised for malformed or missing dataset files; the message names the file
/// and, where applicable, the 1-based line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseOptions {
  /// Append one-hot node labels to the attribute features. Off by default:
  /// node labels are classification targets.
  bool append_node_labels = false;
};

Dataset parse_tudataset(const std::filesystem::path& directory, const std::string& name,
                        const ParseOptions& options = {});

}  // namespace metagraph::graph
