// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/autodiff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

namespace metagraph::ad {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

[[noreturn]] void shape_error(Primitive kind, const std::string& detail) {
  throw ShapeError(std::string(primitive_name(kind)) + ": " + detail);
}

[[noreturn]] void shape_error(Primitive kind, const Shape& a, const Shape& b) {
  shape_error(kind, "shape mismatch " + a.str() + " vs " + b.str());
}

enum class Broadcast { kSame, kScalar, kRow, kCol };

Broadcast broadcast_of(Primitive kind, const Shape& a, const Shape& b) {
  if (a == b) return Broadcast::kSame;
  if (b.rows == 1 && b.cols == 1) return Broadcast::kScalar;
  if (b.rows == 1 && b.cols == a.cols) return Broadcast::kRow;
  if (b.cols == 1 && b.rows == a.rows) return Broadcast::kCol;
  shape_error(kind, a, b);
}

template <class F>
Tensor elementwise(const Tensor& a, const Tensor& b, Broadcast bc, F f) {
  Tensor out(a.rows(), a.cols());
  const std::size_t n = a.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      double rhs = 0.0;
      switch (bc) {
        case Broadcast::kSame: rhs = b(r, c); break;
        case Broadcast::kScalar: rhs = b[0]; break;
        case Broadcast::kRow: rhs = b[c]; break;
        case Broadcast::kCol: rhs = b[r]; break;
      }
      out(r, c) = f(a(r, c), rhs);
    }
  }
  return out;
}

template <class F>
Tensor map(const Tensor& a, F f) {
  Tensor out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

Var constant_like(Tape& tape, const Shape& s, double fill) {
  return tape.constant(Tensor(s.rows, s.cols, fill));
}

// Sums a full-shape gradient down to the shape of a broadcast operand.
Var reduce_to(const Var& g, Broadcast bc) {
  switch (bc) {
    case Broadcast::kSame: return g;
    case Broadcast::kScalar: return sum(g);
    case Broadcast::kRow: return sum_rows(g);
    case Broadcast::kCol: return sum_cols(g);
  }
  return g;
}

// Expands g (1x1, 1xn or mx1) to `s` by multiplying with a ones constant.
Var expand(const Var& g, const Shape& s) {
  return mul(constant_like(g.tape(), s, 1.0), g);
}

Var record(Primitive kind, Tensor value, std::initializer_list<Var> inputs, BackwardRule rule) {
  const Var& first = *inputs.begin();
  return first.tape().record(kind, std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                             std::move(rule));
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.cols != sb.rows) shape_error(Primitive::kMatmul, sa, sb);
  Tensor out(sa.rows, sb.cols);
  if (out.size() > 0 && sa.cols > 0) {
    Eigen::Map<const RowMatrix> ma(a.value().data(), sa.rows, sa.cols);
    Eigen::Map<const RowMatrix> mb(b.value().data(), sb.rows, sb.cols);
    Eigen::Map<RowMatrix> mo(out.data(), sa.rows, sb.cols);
    mo.noalias() = ma * mb;
  }
  return record(Primitive::kMatmul, std::move(out), {a, b},
                [](const Var&, const Var& g, std::span<const Var> in, std::span<const bool> need,
                   std::span<Var> dx) {
                  if (need[0]) dx[0] = matmul(g, transpose(in[1]));
                  if (need[1]) dx[1] = matmul(transpose(in[0]), g);
                });
}

Var transpose(const Var& a) {
  const Tensor& v = a.value();
  Tensor out(v.cols(), v.rows());
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c) out(c, r) = v(r, c);
  return record(Primitive::kTranspose, std::move(out), {a},
                [](const Var&, const Var& g, std::span<const Var>, std::span<const bool>,
                   std::span<Var> dx) { dx[0] = transpose(g); });
}

Var add(const Var& a, const Var& b) {
  const Broadcast bc = broadcast_of(Primitive::kAdd, a.shape(), b.shape());
  Tensor out = elementwise(a.value(), b.value(), bc, [](double x, double y) { return x + y; });
  return record(Primitive::kAdd, std::move(out), {a, b},
                [bc](const Var&, const Var& g, std::span<const Var>, std::span<const bool> need,
                     std::span<Var> dx) {
                  if (need[0]) dx[0] = g;
                  if (need[1]) dx[1] = reduce_to(g, bc);
                });
}

Var sub(const Var& a, const Var& b) {
  const Broadcast bc = broadcast_of(Primitive::kSub, a.shape(), b.shape());
  Tensor out = elementwise(a.value(), b.value(), bc, [](double x, double y) { return x - y; });
  return record(Primitive::kSub, std::move(out), {a, b},
                [bc](const Var&, const Var& g, std::span<const Var>, std::span<const bool> need,
                     std::span<Var> dx) {
                  if (need[0]) dx[0] = g;
                  if (need[1]) dx[1] = scale(reduce_to(g, bc), -1.0);
                });
}

Var mul(const Var& a, const Var& b) {
  const Broadcast bc = broadcast_of(Primitive::kMul, a.shape(), b.shape());
  Tensor out = elementwise(a.value(), b.value(), bc, [](double x, double y) { return x * y; });
  return record(Primitive::kMul, std::move(out), {a, b},
                [bc](const Var&, const Var& g, std::span<const Var> in, std::span<const bool> need,
                     std::span<Var> dx) {
                  if (need[0]) dx[0] = mul(g, in[1]);
                  if (need[1]) dx[1] = reduce_to(mul(g, in[0]), bc);
                });
}

Var div(const Var& a, const Var& b) {
  const Broadcast bc = broadcast_of(Primitive::kDiv, a.shape(), b.shape());
  Tensor out = elementwise(a.value(), b.value(), bc, [](double x, double y) { return x / y; });
  return record(Primitive::kDiv, std::move(out), {a, b},
                [bc](const Var& y, const Var& g, std::span<const Var> in,
                     std::span<const bool> need, std::span<Var> dx) {
                  if (need[0]) dx[0] = div(g, in[1]);
                  if (need[1]) dx[1] = scale(reduce_to(div(mul(g, y), in[1]), bc), -1.0);
                });
}

Var scale(const Var& a, double factor) {
  Tensor out = map(a.value(), [factor](double x) { return x * factor; });
  return record(Primitive::kScale, std::move(out), {a},
                [factor](const Var&, const Var& g, std::span<const Var>, std::span<const bool>,
                         std::span<Var> dx) { dx[0] = scale(g, factor); });
}

Var pow(const Var& a, double exponent) {
  Tensor out = map(a.value(), [exponent](double x) { return std::pow(x, exponent); });
  return record(Primitive::kPow, std::move(out), {a},
                [exponent](const Var&, const Var& g, std::span<const Var> in,
                           std::span<const bool>, std::span<Var> dx) {
                  dx[0] = mul(g, scale(pow(in[0], exponent - 1.0), exponent));
                });
}

Var exp(const Var& a) {
  Tensor out = map(a.value(), [](double x) { return std::exp(x); });
  return record(Primitive::kExp, std::move(out), {a},
                [](const Var& y, const Var& g, std::span<const Var>, std::span<const bool>,
                   std::span<Var> dx) { dx[0] = mul(g, y); });
}

Var log(const Var& a) {
  Tensor out = map(a.value(), [](double x) { return std::log(x); });
  return record(Primitive::kLog, std::move(out), {a},
                [](const Var&, const Var& g, std::span<const Var> in, std::span<const bool>,
                   std::span<Var> dx) { dx[0] = div(g, in[0]); });
}

Var relu(const Var& a) {
  // NaN passes through so divergence is not masked
  Tensor out = map(a.value(), [](double x) { return x > 0.0 || std::isnan(x) ? x : 0.0; });
  return record(Primitive::kRelu, std::move(out), {a},
                [](const Var&, const Var& g, std::span<const Var> in, std::span<const bool>,
                   std::span<Var> dx) {
                  // subgradient at exactly 0 is 0
                  Tensor mask = map(in[0].value(), [](double x) { return x > 0.0 || std::isnan(x) ? 1.0 : 0.0; });
                  dx[0] = mul(g, g.tape().constant(std::move(mask)));
                });
}

namespace {
double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace

Var sigmoid(const Var& a) {
  Tensor out = map(a.value(), stable_sigmoid);
  return record(Primitive::kSigmoid, std::move(out), {a},
                [](const Var& y, const Var& g, std::span<const Var>, std::span<const bool>,
                   std::span<Var> dx) { dx[0] = mul(g, sub(y, mul(y, y))); });
}

Var log_sigmoid(const Var& a) {
  // log σ(x) = min(x, 0) - log1p(exp(-|x|))
  Tensor out = map(a.value(), [](double x) {
    return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x)));
  });
  return record(Primitive::kLogSigmoid, std::move(out), {a},
                [](const Var&, const Var& g, std::span<const Var> in, std::span<const bool>,
                   std::span<Var> dx) { dx[0] = mul(g, sigmoid(scale(in[0], -1.0))); });
}

Var row_softmax(const Var& a) {
  const Tensor& v = a.value();
  Tensor out(v.rows(), v.cols());
  for (std::size_t r = 0; r < v.rows(); ++r) {
    auto in = v.row(r);
    auto o = out.row(r);
    if (in.empty()) continue;
    const double m = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) z += (o[c] = std::exp(in[c] - m));
    for (double& x : o) x /= z;
  }
  return record(Primitive::kRowSoftmax, std::move(out), {a},
                [](const Var& y, const Var& g, std::span<const Var>, std::span<const bool>,
                   std::span<Var> dx) { dx[0] = mul(y, sub(g, sum_cols(mul(g, y)))); });
}

Var row_log_softmax(const Var& a) {
  const Tensor& v = a.value();
  Tensor out(v.rows(), v.cols());
  for (std::size_t r = 0; r < v.rows(); ++r) {
    auto in = v.row(r);
    auto o = out.row(r);
    if (in.empty()) continue;
    const double m = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (double x : in) z += std::exp(x - m);
    const double lse = m + std::log(z);
    for (std::size_t c = 0; c < in.size(); ++c) o[c] = in[c] - lse;
  }
  return record(Primitive::kRowLogSoftmax, std::move(out), {a},
                [](const Var& y, const Var& g, std::span<const Var>, std::span<const bool>,
                   std::span<Var> dx) { dx[0] = sub(g, mul(exp(y), sum_cols(g))); });
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double x : a.value().values()) s += x;
  const Shape in_shape = a.shape();
  return record(Primitive::kSumAll, Tensor::scalar(s), {a},
                [in_shape](const Var&, const Var& g, std::span<const Var>, std::span<const bool>,
                           std::span<Var> dx) { dx[0] = expand(g, in_shape); });
}

Var sum_rows(const Var& a) {
  const Tensor& v = a.value();
  Tensor out(1, v.cols());
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c) out[c] += v(r, c);
  const Shape in_shape = a.shape();
  return record(Primitive::kSumRows, std::move(out), {a},
                [in_shape](const Var&, const Var& g, std::span<const Var>, std::span<const bool>,
                           std::span<Var> dx) { dx[0] = expand(g, in_shape); });
}

Var sum_cols(const Var& a) {
  const Tensor& v = a.value();
  Tensor out(v.rows(), 1);
  for (std::size_t r = 0; r < v.rows(); ++r) {
    double s = 0.0;
    for (double x : v.row(r)) s += x;
    out[r] = s;
  }
  const Shape in_shape = a.shape();
  return record(Primitive::kSumCols, std::move(out), {a},
                [in_shape](const Var&, const Var& g, std::span<const Var>, std::span<const bool>,
                           std::span<Var> dx) { dx[0] = expand(g, in_shape); });
}

Var mean_rows(const Var& a) {
  const Tensor& v = a.value();
  if (v.rows() == 0) shape_error(Primitive::kMeanRows, "mean over zero rows " + v.shape().str());
  Tensor out(1, v.cols());
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c) out[c] += v(r, c);
  const double inv = 1.0 / static_cast<double>(v.rows());
  for (double& x : out.values()) x *= inv;
  const Shape in_shape = a.shape();
  return record(Primitive::kMeanRows, std::move(out), {a},
                [in_shape, inv](const Var&, const Var& g, std::span<const Var>,
                                std::span<const bool>, std::span<Var> dx) {
                  dx[0] = scale(expand(g, in_shape), inv);
                });
}

Var concat_cols(const Var& a, const Var& b) {
  const Tensor& va = a.value();
  const Tensor& vb = b.value();
  if (va.rows() != vb.rows()) shape_error(Primitive::kConcatCols, va.shape(), vb.shape());
  Tensor out(va.rows(), va.cols() + vb.cols());
  for (std::size_t r = 0; r < va.rows(); ++r) {
    auto o = out.row(r);
    std::copy(va.row(r).begin(), va.row(r).end(), o.begin());
    std::copy(vb.row(r).begin(), vb.row(r).end(), o.begin() + static_cast<std::ptrdiff_t>(va.cols()));
  }
  const std::size_t ca = va.cols();
  const std::size_t cb = vb.cols();
  return record(Primitive::kConcatCols, std::move(out), {a, b},
                [ca, cb](const Var&, const Var& g, std::span<const Var>, std::span<const bool> need,
                         std::span<Var> dx) {
                  if (need[0]) dx[0] = slice_cols(g, 0, ca);
                  if (need[1]) dx[1] = slice_cols(g, ca, cb);
                });
}

Var slice_cols(const Var& a, std::size_t begin, std::size_t count) {
  const Tensor& v = a.value();
  if (begin + count > v.cols()) {
    shape_error(Primitive::kSliceCols, "columns [" + std::to_string(begin) + ", " +
                                           std::to_string(begin + count) + ") out of " +
                                           v.shape().str());
  }
  Tensor out(v.rows(), count);
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = v(r, begin + c);
  const Shape in_shape = a.shape();
  return record(Primitive::kSliceCols, std::move(out), {a},
                [in_shape, begin, count](const Var&, const Var& g, std::span<const Var>,
                                         std::span<const bool>, std::span<Var> dx) {
                  Tape& t = g.tape();
                  Var padded = g;
                  if (begin > 0) padded = concat_cols(constant_like(t, {in_shape.rows, begin}, 0.0), padded);
                  const std::size_t right = in_shape.cols - begin - count;
                  if (right > 0) padded = concat_cols(padded, constant_like(t, {in_shape.rows, right}, 0.0));
                  dx[0] = padded;
                });
}

Var row_l2_normalize(const Var& a) {
  const Tensor& v = a.value();
  Tensor out(v.rows(), v.cols());
  Tensor scaled_mask(v.rows(), 1);
  bool any_guarded = false;
  for (std::size_t r = 0; r < v.rows(); ++r) {
    auto in = v.row(r);
    auto o = out.row(r);
    double n2 = 0.0;
    for (double x : in) n2 += x * x;
    const double n = std::sqrt(n2);
    if (n < kNormGuard) {
      std::copy(in.begin(), in.end(), o.begin());
      any_guarded = true;
    } else {
      for (std::size_t c = 0; c < in.size(); ++c) o[c] = in[c] / n;
      scaled_mask[r] = 1.0;
    }
  }
  return record(
      Primitive::kRowL2Normalize, std::move(out), {a},
      [mask = std::move(scaled_mask), any_guarded](const Var& y, const Var& g,
                                                   std::span<const Var> in,
                                                   std::span<const bool>, std::span<Var> dx) {
        Tape& t = g.tape();
        // d(x/|x|) = (g - y <g, y>) / |x| on normalised rows, identity on guarded rows.
        Tensor offset(mask.rows(), 1);
        for (std::size_t r = 0; r < mask.rows(); ++r) offset[r] = 1.0 - mask[r];
        Var inv_norm = pow(add(sum_cols(mul(in[0], in[0])), t.constant(offset)), -0.5);
        Var radial = mul(y, sum_cols(mul(g, y)));
        Var d = mul(sub(g, radial), mul(inv_norm, t.constant(mask)));
        if (any_guarded) d = add(d, mul(g, t.constant(std::move(offset))));
        dx[0] = d;
      });
}

Var gather_rows(const Var& a, std::span<const std::size_t> indices) {
  const Tensor& v = a.value();
  auto edges = std::make_shared<SparseEdges>();
  Tensor out(indices.size(), v.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= v.rows()) {
      shape_error(Primitive::kGatherRows,
                  "row index " + std::to_string(indices[i]) + " out of " + v.shape().str());
    }
    std::copy(v.row(indices[i]).begin(), v.row(indices[i]).end(), out.row(i).begin());
    edges->push(indices[i], i, 1.0);
  }
  const std::size_t in_rows = v.rows();
  return record(Primitive::kGatherRows, std::move(out), {a},
                [edges = std::shared_ptr<const SparseEdges>(std::move(edges)), in_rows](
                    const Var&, const Var& g, std::span<const Var>, std::span<const bool>,
                    std::span<Var> dx) { dx[0] = sparse_aggregate(g, edges, in_rows); });
}

Var sparse_aggregate(const Var& a, std::shared_ptr<const SparseEdges> edges,
                     std::size_t out_rows) {
  const Tensor& v = a.value();
  const std::size_t n = v.cols();
  Tensor out(out_rows, n);
  for (std::size_t e = 0; e < edges->size(); ++e) {
    const std::size_t d = edges->dst[e];
    const std::size_t s = edges->src[e];
    if (d >= out_rows || s >= v.rows()) {
      shape_error(Primitive::kSparseAggregate,
                  "edge (" + std::to_string(d) + " <- " + std::to_string(s) + ") outside " +
                      Shape{out_rows, n}.str() + " <- " + v.shape().str());
    }
    const double c = edges->coeff[e];
    const double* src = v.data() + s * n;
    double* dst = out.data() + d * n;
    for (std::size_t k = 0; k < n; ++k) dst[k] += c * src[k];
  }
  const std::size_t in_rows = v.rows();
  std::shared_ptr<const SparseEdges> reverse;
  if (a.requires_grad() && a.tape().recording()) {
    reverse = std::make_shared<const SparseEdges>(edges->transposed());
  }
  return record(Primitive::kSparseAggregate, std::move(out), {a},
                [reverse = std::move(reverse), in_rows](const Var&, const Var& g,
                                                        std::span<const Var>,
                                                        std::span<const bool>, std::span<Var> dx) {
                  dx[0] = sparse_aggregate(g, reverse, in_rows);
                });
}

Var apply_primitive(Primitive kind, std::span<const Var> inputs) {
  auto arity = [&](std::size_t n) {
    if (inputs.size() != n) {
      throw std::invalid_argument(std::string(primitive_name(kind)) + ": expected " +
                                  std::to_string(n) + " operands, got " +
                                  std::to_string(inputs.size()));
    }
  };
  switch (kind) {
    case Primitive::kMatmul: arity(2); return matmul(inputs[0], inputs[1]);
    case Primitive::kAdd: arity(2); return add(inputs[0], inputs[1]);
    case Primitive::kSub: arity(2); return sub(inputs[0], inputs[1]);
    case Primitive::kMul: arity(2); return mul(inputs[0], inputs[1]);
    case Primitive::kDiv: arity(2); return div(inputs[0], inputs[1]);
    case Primitive::kConcatCols: arity(2); return concat_cols(inputs[0], inputs[1]);
    case Primitive::kTranspose: arity(1); return transpose(inputs[0]);
    case Primitive::kExp: arity(1); return exp(inputs[0]);
    case Primitive::kLog: arity(1); return log(inputs[0]);
    case Primitive::kRelu: arity(1); return relu(inputs[0]);
    case Primitive::kSigmoid: arity(1); return sigmoid(inputs[0]);
    case Primitive::kLogSigmoid: arity(1); return log_sigmoid(inputs[0]);
    case Primitive::kRowSoftmax: arity(1); return row_softmax(inputs[0]);
    case Primitive::kRowLogSoftmax: arity(1); return row_log_softmax(inputs[0]);
    case Primitive::kSumAll: arity(1); return sum(inputs[0]);
    case Primitive::kSumRows: arity(1); return sum_rows(inputs[0]);
    case Primitive::kSumCols: arity(1); return sum_cols(inputs[0]);
    case Primitive::kMeanRows: arity(1); return mean_rows(inputs[0]);
    case Primitive::kRowL2Normalize: arity(1); return row_l2_normalize(inputs[0]);
    default:
      throw std::invalid_argument(std::string(primitive_name(kind)) +
                                  ": needs extra arguments; call it directly");
  }
}

}  // namespace metagraph::ad
