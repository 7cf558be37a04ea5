#pragma once

#include <vector>

#include "fctgan/numerics/fft.hpp"
#include "fctgan/numerics/ops.hpp"
#include "fctgan/numerics/rng.hpp"

namespace fctgan {

/// Uniform(-1/sqrt(in), 1/sqrt(in)) weights [in, out] and bias [out].
template <typename T>
struct Linear {
  Tensor<T> w;
  Tensor<T> b;

  static Linear init(std::size_t in, std::size_t out, Rng& rng);
  Tensor<T> operator()(const Tensor<T>& x) const { return ops::linear(x, w, b); }
  std::vector<Tensor<T>*> parameters() { return {&w, &b}; }
};

template <typename T>
struct LayerNorm {
  Tensor<T> gain;
  Tensor<T> bias;

  static LayerNorm init(std::size_t width);
  Tensor<T> operator()(const Tensor<T>& x) const { return ops::layer_norm(x, gain, bias); }
  std::vector<Tensor<T>*> parameters() { return {&gain, &bias}; }
};

template <typename T>
struct PatchEmbedParams {
  std::size_t kernel = 1;
  Linear<T> proj;  // k*k -> D

  static PatchEmbedParams init(std::size_t kernel, std::size_t dim, Rng& rng);
  std::vector<Tensor<T>*> parameters() { return proj.parameters(); }
};

/// Splits image [B, H, W] into non-overlapping k x k patches and projects
/// each to D channels: tokens [B, H/k, W/k, D]. Same as a stride-k convolution.
template <typename T>
Tensor<T> patch_embed(const Tensor<T>& image, const PatchEmbedParams<T>& p);

/// irfft2(rfft2(tokens) * K) over the token grid of each channel.
/// tokens [B, H, W, D]; K is [H, W/2+1, D].
template <typename T>
Tensor<T> fourier_layer(const Tensor<T>& tokens, const ComplexSpectrum<T>& filter);

enum class ResidualWiring {
  single,  // x + FFN(norm2(F(norm1(x))))
  dual,    // h = x + F(norm1(x)); h + FFN(norm2(h))
};

template <typename T>
struct FnbParams {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t dim = 0;
  LayerNorm<T> norm1;
  ComplexSpectrum<T> filter;
  LayerNorm<T> norm2;
  Linear<T> fc1;  // D -> rho D
  Linear<T> fc2;  // rho D -> D

  /// Filter re ~ 1 + N(0, 0.02), im ~ N(0, 0.02).
  static FnbParams init(std::size_t height, std::size_t width, std::size_t dim, std::size_t expansion, Rng& rng);
  std::vector<Tensor<T>*> parameters();
};

struct FnbOptions {
  ResidualWiring wiring = ResidualWiring::single;
  double dropout = 0.0;  // inside the FFN, after the activation
  bool training = false;
};

/// One Fourier Network Block on tokens [B, H, W, D]; shape preserving.
template <typename T>
Tensor<T> fnb_forward(const Tensor<T>& tokens, const FnbParams<T>& p, const FnbOptions& options, Rng& rng);

/// [B, H, W, 4C] -> [B, 2H, 2W, C]; channel 4c + 2dy + dx at (h, w) moves to
/// channel c at (2h + dy, 2w + dx).
template <typename T>
Tensor<T> pixelshuffle(const Tensor<T>& x);
template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x);

}  // namespace fctgan
