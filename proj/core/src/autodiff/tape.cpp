// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/autodiff/tape.hpp"

#include <array>
#include <optional>
#include <stdexcept>

#include "metagraph/autodiff/ops.hpp"

namespace metagraph::ad {

std::string_view primitive_name(Primitive kind) {
  switch (kind) {
    case Primitive::kParameter: return "parameter";
    case Primitive::kConstant: return "constant";
    case Primitive::kMatmul: return "matmul";
    case Primitive::kTranspose: return "transpose";
    case Primitive::kAdd: return "add";
    case Primitive::kSub: return "subtract";
    case Primitive::kMul: return "elementwise-multiply";
    case Primitive::kDiv: return "divide";
    case Primitive::kScale: return "scalar-multiply";
    case Primitive::kPow: return "pow";
    case Primitive::kExp: return "exp";
    case Primitive::kLog: return "log";
    case Primitive::kRelu: return "relu";
    case Primitive::kSigmoid: return "sigmoid";
    case Primitive::kLogSigmoid: return "log-sigmoid";
    case Primitive::kRowSoftmax: return "row-softmax";
    case Primitive::kRowLogSoftmax: return "row-log-softmax";
    case Primitive::kSumAll: return "sum";
    case Primitive::kSumRows: return "sum-over-rows";
    case Primitive::kSumCols: return "sum-over-cols";
    case Primitive::kMeanRows: return "mean-over-rows";
    case Primitive::kConcatCols: return "row-concatenate";
    case Primitive::kSliceCols: return "slice-cols";
    case Primitive::kRowL2Normalize: return "row-L2-normalize";
    case Primitive::kGatherRows: return "gather-rows";
    case Primitive::kSparseAggregate: return "sparse-aggregate";
  }
  return "unknown";
}

Var Tape::parameter(Tensor value) {
  nodes_.push_back(Node{Primitive::kParameter, std::move(value), {}, true, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{Primitive::kConstant, std::move(value), {}, false, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Primitive kind, Tensor value, std::span<const Var> inputs, BackwardRule rule) {
  bool tracked = false;
  if (recording_) {
    for (const Var& in : inputs) {
      if (&in.tape() != this) {
        throw std::invalid_argument(std::string(primitive_name(kind)) +
                                    ": operands belong to different tapes");
      }
      tracked = tracked || in.requires_grad();
    }
  }
  if (inputs.size() > kMaxInputs) {
    throw std::invalid_argument(std::string(primitive_name(kind)) + ": too many operands");
  }
  Node n;
  n.kind = kind;
  n.value = std::move(value);
  n.requires_grad = tracked;
  if (tracked) {
    n.inputs.reserve(inputs.size());
    for (const Var& in : inputs) n.inputs.push_back(in.id());
    n.backward = std::move(rule);
  }
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

std::vector<Var> Tape::gradients(const Var& output, std::span<const Var> wrt,
                                 bool build_higher_order) {
  if (&output.tape() != this) throw std::invalid_argument("gradients: output from another tape");
  if (output.shape() != Shape{1, 1}) {
    throw ShapeError("backward: output must be scalar [1x1], got " + output.shape().str());
  }
  const std::size_t last = output.id();

  // Nodes on a path from some wrt entry forward to the output.
  std::vector<char> leads(last + 1, 0);
  for (const Var& w : wrt) {
    if (&w.tape() != this) throw std::invalid_argument("gradients: wrt from another tape");
    if (w.id() <= last) leads[w.id()] = 1;
  }
  for (std::size_t i = 0; i <= last; ++i) {
    if (leads[i]) continue;
    const Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    for (std::size_t in : n.inputs) {
      if (leads[in]) {
        leads[i] = 1;
        break;
      }
    }
  }

  std::vector<Var> grads(last + 1);
  std::vector<Var> results(wrt.size());
  {
    std::optional<PauseRecording> pause;
    if (!build_higher_order) pause.emplace(*this);

    if (leads[last]) grads[last] = constant(Tensor::scalar(1.0));

    std::vector<Var> inputs;
    std::vector<Var> input_grads;
    std::array<bool, kMaxInputs> needed{};
    for (std::size_t i = last + 1; i-- > 0;) {
      if (!grads[i].valid()) continue;
      const Node& n = nodes_[i];
      if (!n.requires_grad || !n.backward) continue;

      inputs.clear();
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        inputs.push_back(Var(this, n.inputs[k]));
        needed[k] = leads[n.inputs[k]] != 0;
      }
      input_grads.assign(inputs.size(), Var());

      n.backward(Var(this, i), grads[i], inputs,
                 std::span<const bool>(needed.data(), inputs.size()), input_grads);

      for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (!needed[k] || !input_grads[k].valid()) continue;
        const std::size_t in = inputs[k].id();
        grads[in] = grads[in].valid() ? add(grads[in], input_grads[k]) : input_grads[k];
      }
    }

    for (std::size_t k = 0; k < wrt.size(); ++k) {
      const std::size_t id = wrt[k].id();
      if (id <= last && grads[id].valid()) {
        results[k] = grads[id];
      } else {
        results[k] = constant(Tensor(wrt[k].shape().rows, wrt[k].shape().cols));
      }
    }
  }
  return results;
}

GradientMap Tape::backward(const Var& output, std::span<const Var> wrt) {
  std::vector<Var> g = gradients(output, wrt, false);
  GradientMap map;
  for (std::size_t k = 0; k < wrt.size(); ++k) map[wrt[k].id()] = g[k].value();
  return map;
}

}  // namespace metagraph::ad
