// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

namespace metagraph::evaluation {

/// Fraction of positions where prediction equals label.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Labels are 0/1; both must occur.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Average relative change of `multi` against `baseline`, in percent.
double delta_m(std::span<const double> multi, std::span<const double> baseline);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

MeanStd mean_std(std::span<const double> values);

}  // namespace metagraph::evaluation
