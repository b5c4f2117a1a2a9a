// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "metagraph/graph/graph.hpp"

namespace metagraph::graph {

/// One cross-validation round: the three id lists partition the dataset.
struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<std::size_t> train_graph_ids;
  std::vector<std::size_t> validation_graph_ids;
  std::vector<std::size_t> test_graph_ids;

  bool operator==(const FoldSplit&) const = default;
};

/// Stratified k-fold split by graph label. Split i tests on fold i and
/// validates on a fold chosen from (i, seed); the rest train.
std::vector<FoldSplit> make_folds(const Dataset& dataset, std::size_t k = 10,
                                  std::uint64_t seed = 0);

/// Validation fold used by split `fold_index`; never equals fold_index.
std::size_t validation_fold(std::size_t fold_index, std::size_t k, std::uint64_t seed);

}  // namespace metagraph::graph
