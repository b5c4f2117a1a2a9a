// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "metagraph/autodiff/ops.hpp"
#include "metagraph/autodiff/tape.hpp"
#include "metagraph/graph/graph.hpp"
#include "metagraph/log.hpp"
#include "metagraph/random.hpp"

namespace metagraph::testing {

using ad::Tensor;
using ad::Var;

/// Silences warnings for the lifetime of the guard.
class QuietLog {
 public:
  QuietLog() : previous_(log_level()) { set_log_level(LogLevel::kError); }
  ~QuietLog() { set_log_level(previous_); }
  QuietLog(const QuietLog&) = delete;
  QuietLog& operator=(const QuietLog&) = delete;

 private:
  LogLevel previous_;
};

inline Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = lo + (hi - lo) * uniform01(rng);
  return t;
}

/// ||a - b|| / max(||a||, ||b||), with a floor so exact zeros compare cleanly.
inline double relative_error(const Tensor& a, const Tensor& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-8});
}

/// Scalar function of several tensors evaluated on a fresh tape.
using ScalarFn = std::function<Var(ad::Tape&, std::span<const Var>)>;

inline double evaluate(const ScalarFn& f, const std::vector<Tensor>& inputs) {
  ad::Tape tape;
  std::vector<Var> vars;
  // parameters, so functions that differentiate internally see live leaves
  for (const auto& t : inputs) vars.push_back(tape.parameter(t));
  return f(tape, vars).value().item();
}

/// Central finite differences of f with respect to every input.
inline std::vector<Tensor> numeric_gradients(const ScalarFn& f, const std::vector<Tensor>& inputs,
                                             double eps = 1e-6) {
  std::vector<Tensor> grads;
  std::vector<Tensor> x = inputs;
  for (std::size_t k = 0; k < x.size(); ++k) {
    Tensor g(x[k].rows(), x[k].cols());
    for (std::size_t i = 0; i < x[k].size(); ++i) {
      const double orig = x[k][i];
      x[k][i] = orig + eps;
      const double up = evaluate(f, x);
      x[k][i] = orig - eps;
      const double down = evaluate(f, x);
      x[k][i] = orig;
      g[i] = (up - down) / (2.0 * eps);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

inline std::vector<Tensor> analytic_gradients(const ScalarFn& f, const std::vector<Tensor>& inputs) {
  ad::Tape tape;
  std::vector<Var> vars;
  for (const auto& t : inputs) vars.push_back(tape.parameter(t));
  const Var out = f(tape, vars);
  std::vector<Tensor> grads;
  for (const Var& g : tape.gradients(out, vars)) grads.push_back(g.value());
  return grads;
}

/// Largest relative error between analytic and numeric gradients.
inline double gradient_check(const ScalarFn& f, const std::vector<Tensor>& inputs, double eps = 1e-6) {
  const auto a = analytic_gradients(f, inputs);
  const auto n = numeric_gradients(f, inputs, eps);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, relative_error(a[k], n[k]));
  return worst;
}

/// Reduces any output to a scalar through a fixed random projection.
inline Var project(ad::Tape& tape, const Var& out, std::uint64_t seed) {
  Rng rng(seed);
  const Var r = tape.constant(random_tensor(out.shape().rows, out.shape().cols, rng));
  return ad::sum(ad::mul(out, r));
}

/// Dense D^-1/2 (A + I) D^-1/2.
inline Tensor dense_normalized_adjacency(std::size_t n, std::span<const graph::Edge> edges) {
  Tensor a = Tensor::identity(n);
  for (const auto& e : edges) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) deg[i] += a(i, j);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) /= std::sqrt(deg[i] * deg[j]);
  }
  return a;
}

inline Tensor dense_matmul(const Tensor& a, const Tensor& b) {
  Tensor c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  }
  return c;
}

/// Probability that a random positive outscores a random negative, ties 1/2,
/// by enumerating every pair.
inline double brute_force_auc(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

/// Random connected-ish graph with every annotation present.
inline graph::Graph random_graph(std::size_t id, std::size_t n, std::size_t feature_dim, int node_classes,
                                 int graph_classes, double p, Rng& rng) {
  graph::Graph g;
  g.id = id;
  g.num_nodes = n;
  for (std::size_t v = 1; v < n; ++v) g.edges.push_back({uniform_index(rng, v), v});
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (uniform01(rng) < p) g.edges.push_back({u, v});
    }
  }
  for (auto& e : g.edges) e = e.canonical();
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.node_features = random_tensor(n, feature_dim, rng);
  for (std::size_t v = 0; v < n; ++v) {
    g.node_labels.push_back(static_cast<int>(v % static_cast<std::size_t>(node_classes)));
  }
  g.graph_label = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(graph_classes)));
  return g;
}

}  // namespace metagraph::testing
