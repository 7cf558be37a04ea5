#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fctgan/numerics/tensor.hpp"

namespace fctgan::oracle {

/// Direct double-sum DFT of channel c of x [H, W, D] over the full plane.
inline std::vector<std::complex<double>> dft2(const Tensor<double>& x, std::size_t H, std::size_t W, std::size_t D,
                                              std::size_t c) {
  std::vector<std::complex<double>> out(H * W);
  for (std::size_t u = 0; u < H; ++u) {
    for (std::size_t v = 0; v < W; ++v) {
      std::complex<double> acc(0);
      for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) {
          const double angle = -2.0 * std::numbers::pi * (double(u * h) / double(H) + double(v * w) / double(W));
          acc += x[(h * W + w) * D + c] * std::polar(1.0, angle);
        }
      }
      out[u * W + v] = acc;
    }
  }
  return out;
}

/// Spatial kernel of a half-spectrum filter [H, W/2+1, D]:
/// k[h,w,d] = Re( sum_u sum_v c_v K[u,v,d] e^{2 pi i (uh/H + vw/W)} ) / (H W),
/// with c_v = 1 on the DC and Nyquist columns and 2 elsewhere.
inline std::vector<double> spatial_kernel(const Tensor<double>& re, const Tensor<double>& im, std::size_t H,
                                          std::size_t W, std::size_t D) {
  const std::size_t wh = W / 2 + 1;
  std::vector<double> k(H * W * D, 0.0);
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        double acc = 0;
        for (std::size_t u = 0; u < H; ++u) {
          for (std::size_t v = 0; v < wh; ++v) {
            const double cv = (v == 0 || (W % 2 == 0 && v == W / 2)) ? 1.0 : 2.0;
            const std::complex<double> K(re[(u * wh + v) * D + d], im[(u * wh + v) * D + d]);
            const double angle = 2.0 * std::numbers::pi * (double(u * h) / double(H) + double(v * w) / double(W));
            acc += cv * (K * std::polar(1.0, angle)).real();
          }
        }
        k[(h * W + w) * D + d] = acc / double(H * W);
      }
    }
  }
  return k;
}

/// y[b,h,w,d] = sum_{h',w'} x[b,h',w',d] k[(h-h') mod H, (w-w') mod W, d].
inline std::vector<double> circular_conv(const Tensor<double>& x, const std::vector<double>& k) {
  const std::size_t B = x.dim(0), H = x.dim(1), W = x.dim(2), D = x.dim(3);
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        for (std::size_t d = 0; d < D; ++d) {
          double acc = 0;
          for (std::size_t h2 = 0; h2 < H; ++h2) {
            for (std::size_t w2 = 0; w2 < W; ++w2) {
              acc += x[((b * H + h2) * W + w2) * D + d] * k[(((h + H - h2) % H) * W + (w + W - w2) % W) * D + d];
            }
          }
          y[((b * H + h) * W + w) * D + d] = acc;
        }
      }
    }
  }
  return y;
}

}  // namespace fctgan::oracle
