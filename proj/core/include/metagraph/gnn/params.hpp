// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "metagraph/autodiff/tape.hpp"
#include "metagraph/autodiff/tensor.hpp"

namespace metagraph::gnn {

/// The four disjoint parameter groups: backbone and one head per task.
enum class Part : std::uint8_t { kGcn, kNc, kGc, kLp };

inline constexpr std::size_t kNumParts = 4;

/// Indices into a ParameterSet.
enum ParamId : std::size_t {
  kGcnW1,
  kGcnW2,
  kGcnW3,
  kNcW,
  kNcB,
  kGcW1,
  kGcB1,
  kGcW2,
  kGcB2,
  kLpW1,
  kLpB1,
  kLpW2,
  kLpB2,
  kNumParams,
};

Part part_of(std::size_t id);
std::string_view param_name(std::size_t id);
std::string_view part_name(Part p);

/// Subset of parameter groups, e.g. the groups adapted in the inner loop.
class PartSet {
 public:
  constexpr PartSet() = default;
  constexpr PartSet(std::initializer_list<Part> parts) {
    for (Part p : parts) insert(p);
  }
  static constexpr PartSet all() { return {Part::kGcn, Part::kNc, Part::kGc, Part::kLp}; }
  static constexpr PartSet heads() { return {Part::kNc, Part::kGc, Part::kLp}; }

  constexpr void insert(Part p) { bits_ |= bit(p); }
  constexpr bool contains(Part p) const { return (bits_ & bit(p)) != 0; }
  constexpr bool contains_param(std::size_t id) const { return contains(part_of_constexpr(id)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const PartSet&) const = default;

 private:
  static constexpr std::uint8_t bit(Part p) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(p)); }
  static constexpr Part part_of_constexpr(std::size_t id) {
    if (id <= kGcnW3) return Part::kGcn;
    if (id <= kNcB) return Part::kNc;
    if (id <= kGcB2) return Part::kGc;
    return Part::kLp;
  }
  std::uint8_t bits_ = 0;
};

struct GnnConfig {
  std::size_t feature_dim = 0;
  std::size_t hidden = 256;
  int num_node_classes = 0;
  int num_graph_classes = 0;
  bool unit_norm = true;
  bool residual = true;

  bool operator==(const GnnConfig&) const = default;
};

/// Concrete parameter values for the backbone and all three heads.
struct ParameterSet {
  GnnConfig config;
  std::array<ad::Tensor, kNumParams> values;

  ad::Tensor& operator[](std::size_t id) { return values[id]; }
  const ad::Tensor& operator[](std::size_t id) const { return values[id]; }

  bool all_finite() const;
  /// Hash over the exact bits of every tensor in `parts`.
  std::uint64_t checksum(PartSet parts = PartSet::all()) const;

  bool operator==(const ParameterSet&) const = default;
};

/// Expected shape of parameter `id` under `config`.
ad::Shape param_shape(const GnnConfig& config, std::size_t id);

/// Glorot-uniform weights and zero biases drawn from `seed`.
ParameterSet init_parameters(const GnnConfig& config, std::uint64_t seed);

/// Parameters placed on a tape. Entries may be leaves or, after adaptation,
/// differentiable functions of the leaves.
using ParamVars = std::array<ad::Var, kNumParams>;

/// Every tensor becomes a differentiable leaf.
ParamVars bind_parameters(ad::Tape& tape, const ParameterSet& params);
/// Every tensor becomes a constant.
ParamVars bind_constants(ad::Tape& tape, const ParameterSet& params);

/// Copies the current values of `vars` back into a ParameterSet.
ParameterSet snapshot(const ParamVars& vars, const GnnConfig& config);

}  // namespace metagraph::gnn
