// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "metagraph/autodiff/tensor.hpp"

namespace metagraph::training {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::size_t step = 0;
  std::vector<ad::Tensor> m;
  std::vector<ad::Tensor> v;
};

/// One bias-corrected Adam update of `params` in place. Moments are created
/// on the first call.
void adam_step(AdamState& state, std::span<ad::Tensor> params, std::span<const ad::Tensor> grads,
               double lr);

}  // namespace metagraph::training
