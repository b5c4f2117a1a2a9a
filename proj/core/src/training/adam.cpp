// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/training/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace metagraph::training {

void adam_step(AdamState& state, std::span<ad::Tensor> params, std::span<const ad::Tensor> grads,
               double lr) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: params/grads count mismatch");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.rows(), p.cols());
      state.v.emplace_back(p.rows(), p.cols());
    }
  }
  if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: state does not match params");
  ++state.step;
  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    ad::Tensor& p = params[i];
    const ad::Tensor& g = grads[i];
    if (p.shape() != g.shape() || state.m[i].shape() != p.shape()) {
      throw ad::ShapeError("adam_step: shape mismatch for parameter " + std::to_string(i));
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      double& m = state.m[i][k];
      double& v = state.v[i][k];
      m = c.beta1 * m + (1.0 - c.beta1) * g[k];
      v = c.beta2 * v + (1.0 - c.beta2) * g[k] * g[k];
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      p[k] -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace metagraph::training
