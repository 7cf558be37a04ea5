#include "fctgan/fnb/fnb.hpp"

#include <cmath>

namespace fctgan {

namespace {

template <typename T>
Tensor<T> uniform_tensor(Shape shape, double bound, Rng& rng) {
  std::vector<T> v(numel(shape));
  for (auto& x : v) x = static_cast<T>(rng.uniform(-bound, bound));
  return Tensor<T>(std::move(shape), std::move(v));
}

void require_rank4(const Shape& s, const char* what) {
  if (s.size() != 4) throw ShapeError(std::string(what) + ": expected [B, H, W, D], got " + shape_string(s));
}

}  // namespace

template <typename T>
Linear<T> Linear<T>::init(std::size_t in, std::size_t out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  auto w = uniform_tensor<T>({in, out}, bound, rng);
  auto b = uniform_tensor<T>({out}, bound, rng);
  return Linear{std::move(w), std::move(b)};
}

template <typename T>
LayerNorm<T> LayerNorm<T>::init(std::size_t width) {
  return LayerNorm{Tensor<T>::filled({width}, T(1)), Tensor<T>::zeros({width})};
}

template <typename T>
PatchEmbedParams<T> PatchEmbedParams<T>::init(std::size_t kernel, std::size_t dim, Rng& rng) {
  return PatchEmbedParams{kernel, Linear<T>::init(kernel * kernel, dim, rng)};
}

template <typename T>
Tensor<T> patch_embed(const Tensor<T>& image, const PatchEmbedParams<T>& p) {
  const auto& s = image.shape();
  if (s.size() != 3 && !(s.size() == 4 && s[3] == 1)) {
    throw ShapeError("patch_embed: expected [B, H, W] or [B, H, W, 1], got " + shape_string(s));
  }
  const std::size_t B = s[0], H = s[1], W = s[2], k = p.kernel;
  if (k == 0 || H % k != 0 || W % k != 0) {
    throw ShapeError("patch_embed: kernel " + std::to_string(k) + " does not divide " + std::to_string(H) + "x" +
                     std::to_string(W));
  }
  const std::size_t ph = H / k, pw = W / k;
  std::vector<std::size_t> idx;
  idx.reserve(image.size());
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = 0; i < ph; ++i) {
      for (std::size_t j = 0; j < pw; ++j) {
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) idx.push_back(b * H * W + (i * k + dy) * W + (j * k + dx));
        }
      }
    }
  }
  const auto patches = ops::gather(image, ops::make_index_map(std::move(idx)), {B * ph * pw, k * k});
  const auto tokens = p.proj(patches);
  return ops::reshape(tokens, {B, ph, pw, tokens.dim(1)});
}

template <typename T>
Tensor<T> fourier_layer(const Tensor<T>& tokens, const ComplexSpectrum<T>& filter) {
  require_rank4(tokens.shape(), "fourier_layer");
  const std::size_t H = tokens.dim(1), W = tokens.dim(2), D = tokens.dim(3);
  if (filter.shape() != Shape{H, half_width(W), D}) {
    throw ShapeError("fourier_layer: filter " + shape_string(filter.shape()) + " does not match token grid " +
                     shape_string(tokens.shape()));
  }
  return irfft2(complex_filter_mul(rfft2(tokens), filter), W);
}

template <typename T>
FnbParams<T> FnbParams<T>::init(std::size_t height, std::size_t width, std::size_t dim, std::size_t expansion,
                                Rng& rng) {
  FnbParams p;
  p.height = height;
  p.width = width;
  p.dim = dim;
  p.norm1 = LayerNorm<T>::init(dim);
  p.norm2 = LayerNorm<T>::init(dim);
  const Shape fs{height, half_width(width), dim};
  std::vector<T> re(numel(fs)), im(numel(fs));
  for (auto& v : re) v = static_cast<T>(1.0 + 0.02 * rng.normal());
  for (auto& v : im) v = static_cast<T>(0.02 * rng.normal());
  p.filter = ComplexSpectrum<T>{Tensor<T>(fs, std::move(re)), Tensor<T>(fs, std::move(im)), width};
  p.fc1 = Linear<T>::init(dim, expansion * dim, rng);
  p.fc2 = Linear<T>::init(expansion * dim, dim, rng);
  return p;
}

template <typename T>
std::vector<Tensor<T>*> FnbParams<T>::parameters() {
  return {&norm1.gain, &norm1.bias, &filter.re, &filter.im, &norm2.gain, &norm2.bias,
          &fc1.w,      &fc1.b,      &fc2.w,     &fc2.b};
}

template <typename T>
Tensor<T> fnb_forward(const Tensor<T>& x, const FnbParams<T>& p, const FnbOptions& options, Rng& rng) {
  require_rank4(x.shape(), "fnb_forward");
  const Shape shape = x.shape();
  const std::size_t rows = shape[0] * shape[1] * shape[2], D = shape[3];
  auto ffn = [&](const Tensor<T>& h) {
    auto a = ops::gelu(p.fc1(ops::reshape(h, {rows, D})));
    if (options.training && options.dropout > 0) a = ops::dropout(a, 1.0 - options.dropout, rng);
    return ops::reshape(p.fc2(a), shape);
  };
  if (options.wiring == ResidualWiring::single) {
    return ops::add(x, ffn(p.norm2(fourier_layer(p.norm1(x), p.filter))));
  }
  const auto h = ops::add(x, fourier_layer(p.norm1(x), p.filter));
  return ops::add(h, ffn(p.norm2(h)));
}

template <typename T>
Tensor<T> pixelshuffle(const Tensor<T>& x) {
  require_rank4(x.shape(), "pixelshuffle");
  const std::size_t B = x.dim(0), H = x.dim(1), W = x.dim(2), C4 = x.dim(3);
  if (C4 % 4 != 0) throw ShapeError("pixelshuffle: channel count " + std::to_string(C4) + " is not divisible by 4");
  const std::size_t C = C4 / 4, H2 = 2 * H, W2 = 2 * W;
  std::vector<std::size_t> idx(x.size());
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t y = 0; y < H2; ++y) {
      for (std::size_t xx = 0; xx < W2; ++xx) {
        for (std::size_t c = 0; c < C; ++c) {
          const std::size_t h = y / 2, dy = y % 2, w = xx / 2, dx = xx % 2;
          idx[((b * H2 + y) * W2 + xx) * C + c] = ((b * H + h) * W + w) * C4 + c * 4 + 2 * dy + dx;
        }
      }
    }
  }
  return ops::gather(x, ops::make_index_map(std::move(idx)), {B, H2, W2, C});
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x) {
  require_rank4(x.shape(), "pixel_unshuffle");
  const std::size_t B = x.dim(0), H2 = x.dim(1), W2 = x.dim(2), C = x.dim(3);
  if (H2 % 2 != 0 || W2 % 2 != 0) throw ShapeError("pixel_unshuffle: odd spatial extent");
  const std::size_t H = H2 / 2, W = W2 / 2, C4 = 4 * C;
  std::vector<std::size_t> idx(x.size());
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        for (std::size_t c = 0; c < C; ++c) {
          for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dx = 0; dx < 2; ++dx) {
              idx[((b * H + h) * W + w) * C4 + c * 4 + 2 * dy + dx] =
                  ((b * H2 + 2 * h + dy) * W2 + 2 * w + dx) * C + c;
            }
          }
        }
      }
    }
  }
  return ops::gather(x, ops::make_index_map(std::move(idx)), {B, H, W, C4});
}

#define FCTGAN_INSTANTIATE_FNB(T)                                                                  \
  template struct Linear<T>;                                                                       \
  template struct LayerNorm<T>;                                                                    \
  template struct PatchEmbedParams<T>;                                                             \
  template struct FnbParams<T>;                                                                    \
  template Tensor<T> patch_embed(const Tensor<T>&, const PatchEmbedParams<T>&);                    \
  template Tensor<T> fourier_layer(const Tensor<T>&, const ComplexSpectrum<T>&);                   \
  template Tensor<T> fnb_forward(const Tensor<T>&, const FnbParams<T>&, const FnbOptions&, Rng&); \
  template Tensor<T> pixelshuffle(const Tensor<T>&);                                               \
  template Tensor<T> pixel_unshuffle(const Tensor<T>&);

FCTGAN_INSTANTIATE_FNB(float)
FCTGAN_INSTANTIATE_FNB(double)

#undef FCTGAN_INSTANTIATE_FNB

}  // namespace fctgan
