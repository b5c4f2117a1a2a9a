// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode differentiation over a linear tape of primitive applications.
//
// A Tape owns every intermediate value of one differentiable computation.
// Nodes are appended in evaluation order, so the node sequence is always a
// topological order of the computation graph. Backward rules are themselves
// written with the differentiable primitives of ops.hpp; when higher-order
// gradients are requested the backward pass is recorded onto the same tape
// and can be differentiated again (gradient-through-gradient steps).

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "metagraph/autodiff/tensor.hpp"

namespace metagraph::ad {

enum class Primitive : std::uint8_t {
  kParameter,
  kConstant,
  kMatmul,
  kTranspose,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kScale,
  kPow,
  kExp,
  kLog,
  kRelu,
  kSigmoid,
  kLogSigmoid,
  kRowSoftmax,
  kRowLogSoftmax,
  kSumAll,
  kSumRows,
  kSumCols,
  kMeanRows,
  kConcatCols,
  kSliceCols,
  kRowL2Normalize,
  kGatherRows,
  kSparseAggregate,
};

std::string_view primitive_name(Primitive kind);

class Tape;

/// Handle to one node of a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  Primitive kind() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Computes the gradient contribution of one node to each of its inputs.
/// `needed[i]` is false when input i does not lead to any requested
/// parameter; the rule may leave `input_grads[i]` invalid in that case.
using BackwardRule = std::function<void(const Var& output, const Var& grad_output,
                                        std::span<const Var> inputs,
                                        std::span<const bool> needed,
                                        std::span<Var> input_grads)>;

struct Node {
  Primitive kind = Primitive::kConstant;
  Tensor value;
  std::vector<std::size_t> inputs;
  bool requires_grad = false;
  BackwardRule backward;
};

/// Gradient tensors keyed by the tape id of the parameter they belong to.
using GradientMap = std::unordered_map<std::size_t, Tensor>;

class Tape {
 public:
  static constexpr std::size_t kMaxInputs = 4;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that gradients can be taken with respect to.
  Var parameter(Tensor value);
  /// Leaf that is never differentiated.
  Var constant(Tensor value);

  /// Appends a primitive application. The node tracks gradients iff recording
  /// is enabled and at least one input does.
  Var record(Primitive kind, Tensor value, std::span<const Var> inputs, BackwardRule rule);

  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  bool recording() const { return recording_; }

  /// Gradients of scalar `output` with respect to each of `wrt`, in order.
  /// A parameter that `output` does not depend on receives zeros. With
  /// `build_higher_order` the returned Vars are differentiable functions of
  /// the tape's parameters; otherwise they are constants.
  std::vector<Var> gradients(const Var& output, std::span<const Var> wrt,
                             bool build_higher_order = false);

  /// Value-level convenience over gradients().
  GradientMap backward(const Var& output, std::span<const Var> wrt);

  /// Disables gradient tracking for nodes recorded while alive.
  class PauseRecording {
   public:
    explicit PauseRecording(Tape& tape) : tape_(tape), previous_(tape.recording_) {
      tape_.recording_ = false;
    }
    ~PauseRecording() { tape_.recording_ = previous_; }
    PauseRecording(const PauseRecording&) = delete;
    PauseRecording& operator=(const PauseRecording&) = delete;

   private:
    Tape& tape_;
    bool previous_;
  };

 private:
  friend class Var;
  // deque keeps node references stable while backward rules append nodes.
  std::deque<Node> nodes_;
  bool recording_ = true;
};

inline const Tensor& Var::value() const { return tape_->nodes_[id_].value; }
inline bool Var::requires_grad() const { return tape_->nodes_[id_].requires_grad; }
inline Primitive Var::kind() const { return tape_->nodes_[id_].kind; }

}  // namespace metagraph::ad
