// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable primitives. Every function records one node on the tape of
// its operands and throws ShapeError naming the primitive when shapes do not
// conform.
//
// Binary elementwise ops (add, sub, mul, div) accept a right operand of the
// same shape as the left, or a 1x1, 1xn (row) or mx1 (column) operand that is
// broadcast across the left operand.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "metagraph/autodiff/tape.hpp"

namespace metagraph::ad {

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
Var pow(const Var& a, double exponent);

Var exp(const Var& a);
Var log(const Var& a);
Var relu(const Var& a);
Var sigmoid(const Var& a);
/// log(sigmoid(a)) evaluated without overflow.
Var log_sigmoid(const Var& a);

Var row_softmax(const Var& a);
/// Row-wise log-softmax with log-sum-exp stabilisation.
Var row_log_softmax(const Var& a);

/// 1x1 sum of all elements.
Var sum(const Var& a);
/// 1xn column totals (sum over rows).
Var sum_rows(const Var& a);
/// mx1 row totals (sum over columns).
Var sum_cols(const Var& a);
/// 1xn column means.
Var mean_rows(const Var& a);

/// Row-wise concatenation [a_i | b_i]; row counts must agree.
Var concat_cols(const Var& a, const Var& b);
Var slice_cols(const Var& a, std::size_t begin, std::size_t count);

/// Rows with L2 norm below this are passed through unchanged.
inline constexpr double kNormGuard = 1e-12;
Var row_l2_normalize(const Var& a);

/// out[i] = a[indices[i]].
Var gather_rows(const Var& a, std::span<const std::size_t> indices);

/// Weighted neighbour sums: out[dst] += coeff * in[src] for every entry.
struct SparseEdges {
  std::vector<std::size_t> dst;
  std::vector<std::size_t> src;
  std::vector<double> coeff;

  std::size_t size() const { return dst.size(); }
  void push(std::size_t d, std::size_t s, double c) {
    dst.push_back(d);
    src.push_back(s);
    coeff.push_back(c);
  }
  SparseEdges transposed() const { return SparseEdges{src, dst, coeff}; }
};

Var sparse_aggregate(const Var& a, std::shared_ptr<const SparseEdges> edges,
                     std::size_t out_rows);

/// Dispatches the attribute-free primitives by kind. Kinds that need extra
/// arguments (scale, pow, slice, gather, sparse-aggregate) are rejected.
Var apply_primitive(Primitive kind, std::span<const Var> inputs);

}  // namespace metagraph::ad
