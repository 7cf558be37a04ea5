#pragma once

#include <memory>
#include <vector>

#include "fctgan/numerics/rng.hpp"
#include "fctgan/numerics/tensor.hpp"

// Differentiable primitives. Every reverse rule is written in terms of these
// same primitives, so gradients can themselves be differentiated (needed by
// the gradient penalty).
namespace fctgan::ops {

using IndexMap = std::shared_ptr<const std::vector<std::size_t>>;

IndexMap make_index_map(std::vector<std::size_t> indices);

// Elementwise, identical shapes.
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T> Tensor<T> scale(const Tensor<T>& x, T factor);
template <typename T> Tensor<T> add_const(const Tensor<T>& x, T value);
template <typename T> Tensor<T> neg(const Tensor<T>& x) { return scale(x, T(-1)); }

/// x times a single-element tensor `s`.
template <typename T> Tensor<T> mul_scalar(const Tensor<T>& x, const Tensor<T>& s);

// Leading-axis broadcasting: v.shape() must be a suffix of x.shape(); v repeats over the leading axes.
template <typename T> Tensor<T> add_bcast(const Tensor<T>& x, const Tensor<T>& v);
template <typename T> Tensor<T> mul_bcast(const Tensor<T>& x, const Tensor<T>& v);
/// Sum over axis 0; result has shape x.shape()[1:].
template <typename T> Tensor<T> sum_leading(const Tensor<T>& x);
/// Stacks `count` copies of v along a new axis 0.
template <typename T> Tensor<T> bcast_leading(const Tensor<T>& v, std::size_t count);

/// Sum over the last axis.
template <typename T> Tensor<T> sum_trailing(const Tensor<T>& x);
/// Repeats every element `count` times along a new last axis.
template <typename T> Tensor<T> bcast_trailing(const Tensor<T>& v, std::size_t count);

/// Sum of all elements as a shape-() tensor.
template <typename T> Tensor<T> sum_all(const Tensor<T>& x);
template <typename T> Tensor<T> mean_all(const Tensor<T>& x);
template <typename T> Tensor<T> bcast_scalar(const Tensor<T>& s, const Shape& shape);

/// op(a) * op(b) for rank-2 operands, op = transpose when the flag is set.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b, bool transpose_a = false, bool transpose_b = false);
template <typename T> Tensor<T> transpose(const Tensor<T>& x);

template <typename T> Tensor<T> reshape(const Tensor<T>& x, Shape shape);

/// out[i] = x[index[i]] (flat indices).
template <typename T> Tensor<T> gather(const Tensor<T>& x, IndexMap index, Shape out_shape);
/// out[index[i]] += y[i] on a zero tensor of `out_shape`; adjoint of gather.
template <typename T> Tensor<T> scatter_add(const Tensor<T>& y, IndexMap index, Shape out_shape);

// Columns of a rank-2 tensor.
template <typename T> Tensor<T> slice_cols(const Tensor<T>& x, std::size_t offset, std::size_t width);
template <typename T> Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts);
/// Right-pads each row with zeros up to `width` columns.
template <typename T> Tensor<T> pad_cols(const Tensor<T>& x, std::size_t width);

// Unary maps.
template <typename T> Tensor<T> exp(const Tensor<T>& x);
template <typename T> Tensor<T> log(const Tensor<T>& x);
template <typename T> Tensor<T> tanh(const Tensor<T>& x);
template <typename T> Tensor<T> pow(const Tensor<T>& x, T exponent);
template <typename T> Tensor<T> normal_cdf(const Tensor<T>& x);
template <typename T> Tensor<T> leaky_relu(const Tensor<T>& x, T slope);

/// Euclidean norm of all elements; its gradient at zero is taken as zero.
template <typename T> Tensor<T> norm2(const Tensor<T>& x);

// Composites.
template <typename T> Tensor<T> square(const Tensor<T>& x) { return mul(x, x); }
template <typename T> Tensor<T> normal_pdf(const Tensor<T>& x);
template <typename T> Tensor<T> gelu(const Tensor<T>& x);
/// x @ w + b for x [n, in], w [in, out], b [out].
template <typename T> Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);
/// Normalizes over the last axis, then applies per-feature gain and bias.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps = T(1e-5));

/// Contiguous column segment [offset, offset+width) of a row.
struct Segment {
  std::size_t offset = 0;
  std::size_t width = 0;
};

/// Softmax applied independently to each segment of every row of x [n, m].
/// The segments must tile [0, m). Throws on an empty segment.
template <typename T> Tensor<T> softmax_segments(const Tensor<T>& x, const std::vector<Segment>& segments);

/// Inverted dropout with keep-probability `keep`; identity when keep == 1.
template <typename T> Tensor<T> dropout(const Tensor<T>& x, double keep, Rng& rng);

}  // namespace fctgan::ops
