#include "fctgan/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace fctgan::ops {
namespace {

template <typename T>
using Backward = typename Tape<T>::Backward;

template <typename T>
using Grads = std::vector<Tensor<T>>;

// Records `out` on the operands' tape when one is recording.
template <typename T>
Tensor<T> finish(Tensor<T> out, std::initializer_list<const Tensor<T>*> inputs, Backward<T> backward) {
  Tape<T>* tape = recording_tape<T>(inputs);
  if (tape == nullptr) return out;
  std::vector<Tensor<T>> ins;
  ins.reserve(inputs.size());
  for (const auto* in : inputs) ins.push_back(*in);
  return tape->record(std::move(out), ins, std::move(backward));
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

template <typename T>
void require_rank(const Tensor<T>& x, std::size_t rank, const char* op) {
  if (x.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " + shape_string(x.shape()));
  }
}

template <typename T, typename F>
Tensor<T> map_unary(const Tensor<T>& x, F&& f) {
  std::vector<T> out(x.size());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return Tensor<T>(x.shape(), std::move(out));
}

template <typename T, typename F>
Tensor<T> map_binary(const Tensor<T>& a, const Tensor<T>& b, F&& f) {
  std::vector<T> out(a.size());
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i], y[i]);
  return Tensor<T>(a.shape(), std::move(out));
}

Shape drop_front(const Shape& s) { return Shape(s.begin() + 1, s.end()); }
Shape drop_back(const Shape& s) { return Shape(s.begin(), s.end() - 1); }

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

IndexMap make_index_map(std::vector<std::size_t> indices) {
  return std::make_shared<const std::vector<std::size_t>>(std::move(indices));
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  auto out = map_binary(a, b, [](T x, T y) { return x + y; });
  return finish<T>(std::move(out), {&a, &b}, [](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{g, g};
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "sub");
  auto out = map_binary(a, b, [](T x, T y) { return x - y; });
  return finish<T>(std::move(out), {&a, &b}, [](const Tensor<T>& g, const std::vector<bool>& need) {
    return Grads<T>{g, need[1] ? neg(g) : Tensor<T>()};
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  auto out = map_binary(a, b, [](T x, T y) { return x * y; });
  return finish<T>(std::move(out), {&a, &b}, [a, b](const Tensor<T>& g, const std::vector<bool>& need) {
    return Grads<T>{need[0] ? mul(g, b) : Tensor<T>(), need[1] ? mul(g, a) : Tensor<T>()};
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  auto out = map_unary(x, [factor](T v) { return v * factor; });
  return finish<T>(std::move(out), {&x}, [factor](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{scale(g, factor)};
  });
}

template <typename T>
Tensor<T> add_const(const Tensor<T>& x, T value) {
  auto out = map_unary(x, [value](T v) { return v + value; });
  return finish<T>(std::move(out), {&x}, [](const Tensor<T>& g, const std::vector<bool>&) { return Grads<T>{g}; });
}

template <typename T>
Tensor<T> mul_scalar(const Tensor<T>& x, const Tensor<T>& s) {
  if (s.size() != 1) throw ShapeError("mul_scalar: scalar operand has shape " + shape_string(s.shape()));
  const T factor = s[0];
  auto out = map_unary(x, [factor](T v) { return v * factor; });
  return finish<T>(std::move(out), {&x, &s}, [x, s](const Tensor<T>& g, const std::vector<bool>& need) {
    return Grads<T>{need[0] ? mul_scalar(g, s) : Tensor<T>(),
                    need[1] ? reshape(sum_all(mul(g, x)), s.shape()) : Tensor<T>()};
  });
}

static bool is_suffix(const Shape& tail, const Shape& full) {
  if (tail.size() > full.size()) return false;
  return std::equal(tail.begin(), tail.end(), full.end() - static_cast<std::ptrdiff_t>(tail.size()));
}

template <typename T>
Tensor<T> add_bcast(const Tensor<T>& x, const Tensor<T>& v) {
  const std::size_t r = v.size();
  if (r == 0 || !is_suffix(v.shape(), x.shape())) {
    throw ShapeError("add_bcast: " + shape_string(v.shape()) + " does not tile " + shape_string(x.shape()));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  const auto vv = v.data();
  for (std::size_t base = 0; base < out.size(); base += r) {
    T* row = out.data() + base;
    for (std::size_t j = 0; j < r; ++j) row[j] += vv[j];
  }
  return finish<T>(Tensor<T>(x.shape(), std::move(out)), {&x, &v},
                   [r, vshape = v.shape()](const Tensor<T>& g, const std::vector<bool>& need) {
                     Tensor<T> gv;
                     if (need[1]) gv = reshape(sum_leading(reshape(g, Shape{g.size() / r, r})), vshape);
                     return Grads<T>{g, gv};
                   });
}

template <typename T>
Tensor<T> mul_bcast(const Tensor<T>& x, const Tensor<T>& v) {
  const std::size_t r = v.size();
  if (r == 0 || !is_suffix(v.shape(), x.shape())) {
    throw ShapeError("mul_bcast: " + shape_string(v.shape()) + " does not tile " + shape_string(x.shape()));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  const auto vv = v.data();
  for (std::size_t base = 0; base < out.size(); base += r) {
    T* row = out.data() + base;
    for (std::size_t j = 0; j < r; ++j) row[j] *= vv[j];
  }
  return finish<T>(Tensor<T>(x.shape(), std::move(out)), {&x, &v},
                   [x, v, r](const Tensor<T>& g, const std::vector<bool>& need) {
                     Tensor<T> gx, gv;
                     if (need[0]) gx = mul_bcast(g, v);
                     if (need[1]) gv = reshape(sum_leading(reshape(mul(g, x), Shape{g.size() / r, r})), v.shape());
                     return Grads<T>{gx, gv};
                   });
}

template <typename T>
Tensor<T> sum_leading(const Tensor<T>& x) {
  if (x.rank() == 0) throw ShapeError("sum_leading: scalar input");
  const std::size_t n = x.dim(0);
  const std::size_t r = n == 0 ? 0 : x.size() / n;
  std::vector<T> out(r, T(0));
  const auto in = x.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) out[j] += in[i * r + j];
  }
  return finish<T>(Tensor<T>(drop_front(x.shape()), std::move(out)), {&x},
                   [n](const Tensor<T>& g, const std::vector<bool>&) { return Grads<T>{bcast_leading(g, n)}; });
}

template <typename T>
Tensor<T> bcast_leading(const Tensor<T>& v, std::size_t count) {
  const std::size_t r = v.size();
  std::vector<T> out(count * r);
  const auto in = v.data();
  for (std::size_t i = 0; i < count; ++i) std::copy(in.begin(), in.end(), out.begin() + static_cast<std::ptrdiff_t>(i * r));
  Shape shape{count};
  shape.insert(shape.end(), v.shape().begin(), v.shape().end());
  return finish<T>(Tensor<T>(std::move(shape), std::move(out)), {&v},
                   [](const Tensor<T>& g, const std::vector<bool>&) { return Grads<T>{sum_leading(g)}; });
}

template <typename T>
Tensor<T> sum_trailing(const Tensor<T>& x) {
  if (x.rank() == 0) throw ShapeError("sum_trailing: scalar input");
  const std::size_t r = x.shape().back();
  const std::size_t n = r == 0 ? 0 : x.size() / r;
  std::vector<T> out(n, T(0));
  const auto in = x.data();
  for (std::size_t i = 0; i < n; ++i) {
    T acc(0);
    for (std::size_t j = 0; j < r; ++j) acc += in[i * r + j];
    out[i] = acc;
  }
  return finish<T>(Tensor<T>(drop_back(x.shape()), std::move(out)), {&x},
                   [r](const Tensor<T>& g, const std::vector<bool>&) { return Grads<T>{bcast_trailing(g, r)}; });
}

template <typename T>
Tensor<T> bcast_trailing(const Tensor<T>& v, std::size_t count) {
  std::vector<T> out(v.size() * count);
  const auto in = v.data();
  for (std::size_t i = 0; i < v.size(); ++i) std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(i * count), count, in[i]);
  Shape shape = v.shape();
  shape.push_back(count);
  return finish<T>(Tensor<T>(std::move(shape), std::move(out)), {&v},
                   [](const Tensor<T>& g, const std::vector<bool>&) { return Grads<T>{sum_trailing(g)}; });
}

template <typename T>
Tensor<T> sum_all(const Tensor<T>& x) {
  T acc(0);
  for (T v : x.data()) acc += v;
  return finish<T>(Tensor<T>::scalar(acc), {&x}, [shape = x.shape()](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{bcast_scalar(g, shape)};
  });
}

template <typename T>
Tensor<T> mean_all(const Tensor<T>& x) {
  if (x.size() == 0) throw ShapeError("mean_all: empty tensor");
  return scale(sum_all(x), T(1) / static_cast<T>(x.size()));
}

template <typename T>
Tensor<T> bcast_scalar(const Tensor<T>& s, const Shape& shape) {
  if (s.size() != 1) throw ShapeError("bcast_scalar: operand has shape " + shape_string(s.shape()));
  return finish<T>(Tensor<T>::filled(shape, s[0]), {&s}, [sshape = s.shape()](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{reshape(sum_all(g), sshape)};
  });
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b, bool ta, bool tb) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = ta ? a.dim(1) : a.dim(0);
  const std::size_t k = ta ? a.dim(0) : a.dim(1);
  const std::size_t kb = tb ? b.dim(1) : b.dim(0);
  const std::size_t n = tb ? b.dim(0) : b.dim(1);
  if (k != kb) {
    throw ShapeError("matmul: inner extents differ, " + shape_string(a.shape()) + (ta ? "^T" : "") + " x " +
                     shape_string(b.shape()) + (tb ? "^T" : ""));
  }
  std::vector<T> out(m * n);
  using ConstMap = Eigen::Map<const RowMat<T>>;
  ConstMap A(a.data().data(), static_cast<Eigen::Index>(a.dim(0)), static_cast<Eigen::Index>(a.dim(1)));
  ConstMap B(b.data().data(), static_cast<Eigen::Index>(b.dim(0)), static_cast<Eigen::Index>(b.dim(1)));
  Eigen::Map<RowMat<T>> C(out.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  if (k == 0) {
    C.setZero();
  } else if (!ta && !tb) {
    C.noalias() = A * B;
  } else if (ta && !tb) {
    C.noalias() = A.transpose() * B;
  } else if (!ta && tb) {
    C.noalias() = A * B.transpose();
  } else {
    C.noalias() = A.transpose() * B.transpose();
  }
  return finish<T>(Tensor<T>(Shape{m, n}, std::move(out)), {&a, &b},
                   [a, b, ta, tb](const Tensor<T>& g, const std::vector<bool>& need) {
                     Tensor<T> ga, gb;
                     if (need[0]) ga = ta ? matmul(b, g, tb, true) : matmul(g, b, false, !tb);
                     if (need[1]) gb = tb ? matmul(g, a, true, ta) : matmul(a, g, !ta, false);
                     return Grads<T>{ga, gb};
                   });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& x) {
  require_rank(x, 2, "transpose");
  const std::size_t r = x.dim(0), c = x.dim(1);
  std::vector<std::size_t> idx(r * c);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t i = 0; i < r; ++i) idx[j * r + i] = i * c + j;
  }
  return gather(x, make_index_map(std::move(idx)), Shape{c, r});
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (numel(shape) != x.size()) {
    throw ShapeError("reshape: cannot view " + shape_string(x.shape()) + " as " + shape_string(shape));
  }
  return finish<T>(x.reshaped(std::move(shape)), {&x}, [shape = x.shape()](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{reshape(g, shape)};
  });
}

template <typename T>
Tensor<T> gather(const Tensor<T>& x, IndexMap index, Shape out_shape) {
  if (numel(out_shape) != index->size()) throw ShapeError("gather: index length does not match output shape");
  std::vector<T> out(index->size());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t j = (*index)[i];
    if (j >= in.size()) throw ShapeError("gather: index out of range");
    out[i] = in[j];
  }
  return finish<T>(Tensor<T>(std::move(out_shape), std::move(out)), {&x},
                   [index, shape = x.shape()](const Tensor<T>& g, const std::vector<bool>&) {
                     return Grads<T>{scatter_add(g, index, shape)};
                   });
}

template <typename T>
Tensor<T> scatter_add(const Tensor<T>& y, IndexMap index, Shape out_shape) {
  if (y.size() != index->size()) throw ShapeError("scatter_add: index length does not match input");
  std::vector<T> out(numel(out_shape), T(0));
  const auto in = y.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::size_t j = (*index)[i];
    if (j >= out.size()) throw ShapeError("scatter_add: index out of range");
    out[j] += in[i];
  }
  return finish<T>(Tensor<T>(std::move(out_shape), std::move(out)), {&y},
                   [index, shape = y.shape()](const Tensor<T>& g, const std::vector<bool>&) {
                     return Grads<T>{gather(g, index, shape)};
                   });
}

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, std::size_t offset, std::size_t width) {
  require_rank(x, 2, "slice_cols");
  const std::size_t n = x.dim(0), m = x.dim(1);
  if (offset + width > m) throw ShapeError("slice_cols: range exceeds " + std::to_string(m) + " columns");
  std::vector<std::size_t> idx(n * width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) idx[i * width + j] = i * m + offset + j;
  }
  return gather(x, make_index_map(std::move(idx)), Shape{n, width});
}

template <typename T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: nothing to concatenate");
  const std::size_t n = parts[0].dim(0);
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_rank(p, 2, "concat_cols");
    if (p.dim(0) != n) throw ShapeError("concat_cols: row counts differ");
    total += p.dim(1);
  }
  Tensor<T> out;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t w = p.dim(1);
    if (w > 0) {
      std::vector<std::size_t> idx(n * w);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < w; ++j) idx[i * w + j] = i * total + offset + j;
      }
      auto placed = scatter_add(p, make_index_map(std::move(idx)), Shape{n, total});
      out = out.empty() ? placed : add(out, placed);
    }
    offset += w;
  }
  return out.empty() ? Tensor<T>::zeros(Shape{n, total}) : out;
}

template <typename T>
Tensor<T> pad_cols(const Tensor<T>& x, std::size_t width) {
  require_rank(x, 2, "pad_cols");
  const std::size_t n = x.dim(0), m = x.dim(1);
  if (width < m) throw ShapeError("pad_cols: target narrower than input");
  std::vector<std::size_t> idx(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) idx[i * m + j] = i * width + j;
  }
  return scatter_add(x, make_index_map(std::move(idx)), Shape{n, width});
}

template <typename T>
Tensor<T> exp(const Tensor<T>& x) {
  auto out = map_unary(x, [](T v) { return std::exp(v); });
  return finish<T>(std::move(out), {&x}, [x](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{mul(g, exp(x))};
  });
}

template <typename T>
Tensor<T> log(const Tensor<T>& x) {
  auto out = map_unary(x, [](T v) { return std::log(v); });
  return finish<T>(std::move(out), {&x}, [x](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{mul(g, pow(x, T(-1)))};
  });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& x) {
  auto out = map_unary(x, [](T v) { return std::tanh(v); });
  return finish<T>(std::move(out), {&x}, [x](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{mul(g, add_const(neg(square(tanh(x))), T(1)))};
  });
}

template <typename T>
Tensor<T> pow(const Tensor<T>& x, T exponent) {
  auto out = map_unary(x, [exponent](T v) { return exponent == T(0) ? T(1) : std::pow(v, exponent); });
  return finish<T>(std::move(out), {&x}, [x, exponent](const Tensor<T>& g, const std::vector<bool>&) {
    if (exponent == T(0)) return Grads<T>{Tensor<T>::zeros(x.shape())};
    return Grads<T>{mul(g, scale(pow(x, exponent - T(1)), exponent))};
  });
}

template <typename T>
Tensor<T> normal_cdf(const Tensor<T>& x) {
  auto out = map_unary(x, [](T v) { return T(0.5) * std::erfc(-v / std::numbers::sqrt2_v<T>); });
  return finish<T>(std::move(out), {&x}, [x](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{mul(g, normal_pdf(x))};
  });
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  auto out = map_unary(x, [slope](T v) { return v > T(0) ? v : slope * v; });
  auto mask = map_unary(x, [slope](T v) { return v > T(0) ? T(1) : slope; });
  return finish<T>(std::move(out), {&x}, [mask](const Tensor<T>& g, const std::vector<bool>&) {
    return Grads<T>{mul(g, mask)};
  });
}

template <typename T>
Tensor<T> norm2(const Tensor<T>& x) {
  T acc(0);
  for (T v : x.data()) acc += v * v;
  const T n = std::sqrt(acc);
  return finish<T>(Tensor<T>::scalar(n), {&x}, [x, n](const Tensor<T>& g, const std::vector<bool>&) {
    if (n == T(0)) return Grads<T>{Tensor<T>::zeros(x.shape())};
    const auto coef = mul(reshape(g, Shape{}), pow(norm2(x), T(-1)));
    return Grads<T>{mul_scalar(x, coef)};
  });
}

template <typename T>
Tensor<T> normal_pdf(const Tensor<T>& x) {
  const T c = T(1) / std::sqrt(T(2) * std::numbers::pi_v<T>);
  return scale(exp(scale(square(x), T(-0.5))), c);
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  return mul(x, normal_cdf(x));
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  return add_bcast(matmul(x, w), b);
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps) {
  if (x.rank() == 0) throw ShapeError("layer_norm: scalar input");
  const std::size_t d = x.shape().back();
  if (gain.size() != d || bias.size() != d) throw ShapeError("layer_norm: gain/bias width differs from feature width");
  const T inv_d = T(1) / static_cast<T>(d);
  const auto mean = scale(sum_trailing(x), inv_d);
  const auto centered = sub(x, bcast_trailing(mean, d));
  const auto var = scale(sum_trailing(square(centered)), inv_d);
  const auto inv_std = pow(add_const(var, eps), T(-0.5));
  const auto normed = mul(centered, bcast_trailing(inv_std, d));
  return add_bcast(mul_bcast(normed, gain), bias);
}

template <typename T>
Tensor<T> softmax_segments(const Tensor<T>& x, const std::vector<Segment>& segments) {
  require_rank(x, 2, "softmax_segments");
  const std::size_t n = x.dim(0), m = x.dim(1);
  std::vector<std::size_t> seg_of(m, static_cast<std::size_t>(-1));
  std::size_t covered = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    if (seg.width == 0) throw ShapeError("softmax_segments: empty segment at offset " + std::to_string(seg.offset));
    if (seg.offset + seg.width > m) throw ShapeError("softmax_segments: segment exceeds row width");
    for (std::size_t j = seg.offset; j < seg.offset + seg.width; ++j) {
      if (seg_of[j] != static_cast<std::size_t>(-1)) throw ShapeError("softmax_segments: overlapping segments");
      seg_of[j] = s;
    }
    covered += seg.width;
  }
  if (covered != m) throw ShapeError("softmax_segments: segments do not cover the row");
  const std::size_t k = segments.size();

  // Per-segment maxima, held constant, for a stable exponent.
  std::vector<T> shift(n * m);
  const auto in = x.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& seg : segments) {
      T mx = in[i * m + seg.offset];
      for (std::size_t j = seg.offset; j < seg.offset + seg.width; ++j) mx = std::max(mx, in[i * m + j]);
      for (std::size_t j = seg.offset; j < seg.offset + seg.width; ++j) shift[i * m + j] = mx;
    }
  }
  std::vector<std::size_t> idx(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) idx[i * m + j] = i * k + seg_of[j];
  }
  auto map = make_index_map(std::move(idx));
  const auto e = exp(sub(x, Tensor<T>(x.shape(), std::move(shift))));
  const auto sums = scatter_add(e, map, Shape{n, k});
  return mul(e, pow(gather(sums, map, x.shape()), T(-1)));
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double keep, Rng& rng) {
  if (!(keep > 0.0 && keep <= 1.0)) throw std::invalid_argument("dropout: keep probability must be in (0, 1]");
  if (keep == 1.0) return x;
  std::vector<T> mask(x.size());
  const T inv = static_cast<T>(1.0 / keep);
  for (auto& v : mask) v = rng.uniform() < keep ? inv : T(0);
  return mul(x, Tensor<T>(x.shape(), std::move(mask)));
}

#define FCTGAN_INSTANTIATE_OPS(T)                                                                      \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                          \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                          \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                          \
  template Tensor<T> scale(const Tensor<T>&, T);                                                       \
  template Tensor<T> add_const(const Tensor<T>&, T);                                                   \
  template Tensor<T> mul_scalar(const Tensor<T>&, const Tensor<T>&);                                   \
  template Tensor<T> add_bcast(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> mul_bcast(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> sum_leading(const Tensor<T>&);                                                    \
  template Tensor<T> bcast_leading(const Tensor<T>&, std::size_t);                                     \
  template Tensor<T> sum_trailing(const Tensor<T>&);                                                   \
  template Tensor<T> bcast_trailing(const Tensor<T>&, std::size_t);                                    \
  template Tensor<T> sum_all(const Tensor<T>&);                                                        \
  template Tensor<T> mean_all(const Tensor<T>&);                                                       \
  template Tensor<T> bcast_scalar(const Tensor<T>&, const Shape&);                                     \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&, bool, bool);                           \
  template Tensor<T> transpose(const Tensor<T>&);                                                      \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                                 \
  template Tensor<T> gather(const Tensor<T>&, IndexMap, Shape);                                        \
  template Tensor<T> scatter_add(const Tensor<T>&, IndexMap, Shape);                                   \
  template Tensor<T> slice_cols(const Tensor<T>&, std::size_t, std::size_t);                           \
  template Tensor<T> concat_cols(const std::vector<Tensor<T>>&);                                       \
  template Tensor<T> pad_cols(const Tensor<T>&, std::size_t);                                          \
  template Tensor<T> exp(const Tensor<T>&);                                                            \
  template Tensor<T> log(const Tensor<T>&);                                                            \
  template Tensor<T> tanh(const Tensor<T>&);                                                           \
  template Tensor<T> pow(const Tensor<T>&, T);                                                         \
  template Tensor<T> normal_cdf(const Tensor<T>&);                                                     \
  template Tensor<T> leaky_relu(const Tensor<T>&, T);                                                  \
  template Tensor<T> norm2(const Tensor<T>&);                                                          \
  template Tensor<T> normal_pdf(const Tensor<T>&);                                                     \
  template Tensor<T> gelu(const Tensor<T>&);                                                           \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                     \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);              \
  template Tensor<T> softmax_segments(const Tensor<T>&, const std::vector<Segment>&);                  \
  template Tensor<T> dropout(const Tensor<T>&, double, Rng&);

FCTGAN_INSTANTIATE_OPS(float)
FCTGAN_INSTANTIATE_OPS(double)

#undef FCTGAN_INSTANTIATE_OPS

}  // namespace fctgan::ops
