// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metagraph/autodiff/tensor.hpp"

namespace metagraph::evaluation {

/// Affine classifier. Binary problems keep one column scoring the larger
/// class; multiclass problems keep one one-vs-rest column per class.
struct LinearClassifier {
  ad::Tensor weights;  // features x columns
  std::vector<double> bias;
  std::vector<int> classes;  // ascending
  double c = 1.0;
  bool trained = false;

  /// Raw decision values, rows x columns.
  ad::Tensor decision(const ad::Tensor& x) const;
  std::vector<int> predict(const ad::Tensor& x) const;
  /// Binary only: score of the larger class per row.
  std::vector<double> scores(const ad::Tensor& x) const;
};

struct LinearOptions {
  double c = 1.0;
  double gradient_tolerance = 1e-4;
  std::size_t max_iterations = 1000;
  std::uint64_t seed = 0;
};

/// L2-regularised squared-hinge classifier: for each column minimises
/// (lambda/2)|w|^2 + mean_i max(0, 1 - y_i (w.x_i + b))^2 with
/// lambda = 1/(1000 c), by L-BFGS. Throws when fewer than two classes occur.
LinearClassifier train_linear(const ad::Tensor& x, std::span<const int> labels, const LinearOptions& options = {});

}  // namespace metagraph::evaluation
