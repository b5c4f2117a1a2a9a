// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/gnn/params.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "metagraph/hash.hpp"
#include "metagraph/random.hpp"

namespace metagraph::gnn {

Part part_of(std::size_t id) {
  if (id >= kNumParams) throw std::out_of_range("part_of: bad parameter id");
  if (id <= kGcnW3) return Part::kGcn;
  if (id <= kNcB) return Part::kNc;
  if (id <= kGcB2) return Part::kGc;
  return Part::kLp;
}

std::string_view param_name(std::size_t id) {
  static constexpr std::array<std::string_view, kNumParams> kNames = {
      "gcn.w1", "gcn.w2", "gcn.w3", "nc.w",  "nc.b",  "gc.w1", "gc.b1",
      "gc.w2",  "gc.b2",  "lp.w1",  "lp.b1", "lp.w2", "lp.b2"};
  if (id >= kNumParams) throw std::out_of_range("param_name: bad parameter id");
  return kNames[id];
}

std::string_view part_name(Part p) {
  switch (p) {
    case Part::kGcn: return "gcn";
    case Part::kNc: return "nc";
    case Part::kGc: return "gc";
    case Part::kLp: return "lp";
  }
  return "?";
}

ad::Shape param_shape(const GnnConfig& c, std::size_t id) {
  const std::size_t h = c.hidden;
  const auto cn = static_cast<std::size_t>(c.num_node_classes);
  const auto cg = static_cast<std::size_t>(c.num_graph_classes);
  switch (id) {
    case kGcnW1: return {c.feature_dim, h};
    case kGcnW2:
    case kGcnW3: return {h, h};
    case kNcW: return {h, cn};
    case kNcB: return {1, cn};
    case kGcW1: return {h, h};
    case kGcB1: return {1, h};
    case kGcW2: return {h, cg};
    case kGcB2: return {1, cg};
    case kLpW1: return {h, h};
    case kLpB1: return {1, h};
    case kLpW2: return {2 * h, 1};
    case kLpB2: return {1, 1};
    default: throw std::out_of_range("param_shape: bad parameter id");
  }
}

bool ParameterSet::all_finite() const {
  for (const auto& t : values) {
    if (!t.all_finite()) return false;
  }
  return true;
}

std::uint64_t ParameterSet::checksum(PartSet parts) const {
  std::string bytes;
  for (std::size_t id = 0; id < kNumParams; ++id) {
    if (!parts.contains(part_of(id))) continue;
    const auto& t = values[id];
    bytes.append(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(double));
    bytes.push_back('|');
  }
  return fnv1a64(bytes);
}

ParameterSet init_parameters(const GnnConfig& config, std::uint64_t seed) {
  if (config.feature_dim == 0 || config.hidden == 0) {
    throw std::invalid_argument("init_parameters: feature_dim and hidden must be positive");
  }
  if (config.num_node_classes < 0 || config.num_graph_classes < 0) {
    throw std::invalid_argument("init_parameters: negative class count");
  }
  ParameterSet p;
  p.config = config;
  for (std::size_t id = 0; id < kNumParams; ++id) {
    const ad::Shape s = param_shape(config, id);
    ad::Tensor t(s.rows, s.cols);
    const bool is_bias = id == kNcB || id == kGcB1 || id == kGcB2 || id == kLpB1 || id == kLpB2;
    if (!is_bias && s.size() > 0) {
      Rng rng(derive_seed(seed, {0x696e6974, id}));
      const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
      for (double& x : t.values()) x = (2.0 * uniform01(rng) - 1.0) * limit;
    }
    p.values[id] = std::move(t);
  }
  return p;
}

ParamVars bind_parameters(ad::Tape& tape, const ParameterSet& params) {
  ParamVars v;
  for (std::size_t id = 0; id < kNumParams; ++id) v[id] = tape.parameter(params.values[id]);
  return v;
}

ParamVars bind_constants(ad::Tape& tape, const ParameterSet& params) {
  ParamVars v;
  for (std::size_t id = 0; id < kNumParams; ++id) v[id] = tape.constant(params.values[id]);
  return v;
}

ParameterSet snapshot(const ParamVars& vars, const GnnConfig& config) {
  ParameterSet p;
  p.config = config;
  for (std::size_t id = 0; id < kNumParams; ++id) p.values[id] = vars[id].value();
  return p;
}

}  // namespace metagraph::gnn
