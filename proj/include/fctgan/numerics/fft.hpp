#pragma once

#include <complex>
#include <span>

#include "fctgan/numerics/tensor.hpp"

namespace fctgan {

/// In-place unnormalized DFT. The exponent sign is -1 forward and +1 when
/// `inverse` is set. Radix-2 Cooley-Tukey for power-of-two lengths, direct
/// summation otherwise.
template <typename T>
void fft_1d(std::span<std::complex<T>> data, bool inverse);

bool is_power_of_two(std::size_t n);

/// Half spectrum of a real tensor, stored as separate real and imaginary
/// parts of shape [B, H, W/2+1, D] (or [H, W/2+1, D] for unbatched input).
template <typename T>
struct ComplexSpectrum {
  Tensor<T> re;
  Tensor<T> im;
  std::size_t width = 0;  // real width W the spectrum came from

  const Shape& shape() const { return re.shape(); }
};

inline std::size_t half_width(std::size_t width) { return width / 2 + 1; }

/// 2-D real FFT over the (H, W) plane of each channel of x [B, H, W, D] or
/// [H, W, D]. Entry (u, v, d) is sum_{h,w} x[h,w,d] exp(-2 pi i (uh/H + vw/W)).
template <typename T>
ComplexSpectrum<T> rfft2(const Tensor<T>& x);

/// Inverse of rfft2, scaled by 1/(H W): the real part of the half-spectrum
/// sum with every column except DC and Nyquist counted twice.
template <typename T>
Tensor<T> irfft2(const ComplexSpectrum<T>& s, std::size_t out_width);

/// Per-entry complex product. `filter` either matches the spectrum shape or
/// matches its trailing [H, W/2+1, D] extent and is shared over the batch.
template <typename T>
ComplexSpectrum<T> complex_filter_mul(const ComplexSpectrum<T>& s, const ComplexSpectrum<T>& filter);

}  // namespace fctgan
