#include "fctgan/numerics/fft.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "fctgan/numerics/ops.hpp"

namespace fctgan {
namespace {

struct PlaneDims {
  std::size_t batch = 1, height = 0, width = 0, channels = 0;
};

PlaneDims plane_dims(const Shape& shape, const char* op) {
  if (shape.size() == 3) return {1, shape[0], shape[1], shape[2]};
  if (shape.size() == 4) return {shape[0], shape[1], shape[2], shape[3]};
  throw ShapeError(std::string(op) + ": expected [H, W, D] or [B, H, W, D], got " + shape_string(shape));
}

Shape with_width(const Shape& shape, std::size_t width) {
  Shape out = shape;
  out[out.size() - 2] = width;
  return out;
}

template <typename T>
std::vector<std::complex<T>> twiddles(std::size_t n, bool inverse) {
  std::vector<std::complex<T>> tw(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    tw[k] = std::complex<T>(static_cast<T>(std::cos(angle)), static_cast<T>(std::sin(angle)));
  }
  return tw;
}

template <typename T>
void radix2(std::span<std::complex<T>> a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto tw = twiddles<T>(n, inverse);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const auto u = a[start + k];
        const auto v = a[start + k + half] * tw[k * step];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

template <typename T>
void direct_dft(std::span<std::complex<T>> a, bool inverse) {
  const std::size_t n = a.size();
  const auto tw = twiddles<T>(n, inverse);
  std::vector<std::complex<T>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<T> acc(0);
    for (std::size_t j = 0; j < n; ++j) acc += a[j] * tw[(j * k) % n];
    out[k] = acc;
  }
  std::copy(out.begin(), out.end(), a.begin());
}

// cos/sin of 2*pi*j*k/n for all j, k < n.
template <typename T>
struct DftTable {
  std::size_t n = 0;
  std::vector<T> cos, sin;
  explicit DftTable(std::size_t size) : n(size), cos(size * size), sin(size * size) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
        cos[j * n + k] = static_cast<T>(std::cos(angle));
        sin[j * n + k] = static_cast<T>(std::sin(angle));
      }
    }
  }
};

// Raw kernels over whole [B, H, W, D] arrays. Direct transforms with the
// channel axis innermost; the planes used here are small.
template <typename T>
void rfft2_kernel(std::span<const T> x, const PlaneDims& d, std::span<T> re, std::span<T> im) {
  const std::size_t H = d.height, W = d.width, D = d.channels, wh = half_width(W);
  const DftTable<T> tw(W), th(H);
  std::vector<T> tr(H * wh * D), ti(H * wh * D);
  for (std::size_t b = 0; b < d.batch; ++b) {
    std::fill(tr.begin(), tr.end(), T(0));
    std::fill(ti.begin(), ti.end(), T(0));
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t v = 0; v < wh; ++v) {
        T* pr = &tr[(h * wh + v) * D];
        T* pi = &ti[(h * wh + v) * D];
        for (std::size_t w = 0; w < W; ++w) {
          const T c = tw.cos[v * W + w], s = tw.sin[v * W + w];
          const T* px = &x[((b * H + h) * W + w) * D];
          for (std::size_t ch = 0; ch < D; ++ch) {
            pr[ch] += px[ch] * c;
            pi[ch] -= px[ch] * s;
          }
        }
      }
    }
    for (std::size_t u = 0; u < H; ++u) {
      for (std::size_t v = 0; v < wh; ++v) {
        T* orr = &re[((b * H + u) * wh + v) * D];
        T* oi = &im[((b * H + u) * wh + v) * D];
        std::fill(orr, orr + D, T(0));
        std::fill(oi, oi + D, T(0));
        for (std::size_t h = 0; h < H; ++h) {
          const T c = th.cos[u * H + h], s = th.sin[u * H + h];
          const T* ar = &tr[(h * wh + v) * D];
          const T* ai = &ti[(h * wh + v) * D];
          // (ar + i ai)(c - i s)
          for (std::size_t ch = 0; ch < D; ++ch) {
            orr[ch] += ar[ch] * c + ai[ch] * s;
            oi[ch] += ai[ch] * c - ar[ch] * s;
          }
        }
      }
    }
  }
}

template <typename T>
void irfft2_kernel(std::span<const T> re, std::span<const T> im, const PlaneDims& d, std::span<T> out) {
  const std::size_t H = d.height, W = d.width, D = d.channels, wh = half_width(W);
  const T norm = T(1) / static_cast<T>(H * W);
  const DftTable<T> tw(W), th(H);
  // Hermitian multiplicity of each stored column.
  std::vector<T> mult(wh);
  for (std::size_t v = 0; v < wh; ++v) mult[v] = (v == 0 || W - v < wh) ? norm : T(2) * norm;
  std::vector<T> tr(H * wh * D), ti(H * wh * D);
  for (std::size_t b = 0; b < d.batch; ++b) {
    std::fill(tr.begin(), tr.end(), T(0));
    std::fill(ti.begin(), ti.end(), T(0));
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t u = 0; u < H; ++u) {
        const T c = th.cos[h * H + u], s = th.sin[h * H + u];
        for (std::size_t v = 0; v < wh; ++v) {
          const T* ar = &re[((b * H + u) * wh + v) * D];
          const T* ai = &im[((b * H + u) * wh + v) * D];
          T* pr = &tr[(h * wh + v) * D];
          T* pi = &ti[(h * wh + v) * D];
          // (ar + i ai)(c + i s)
          for (std::size_t ch = 0; ch < D; ++ch) {
            pr[ch] += ar[ch] * c - ai[ch] * s;
            pi[ch] += ai[ch] * c + ar[ch] * s;
          }
        }
      }
    }
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        T* po = &out[((b * H + h) * W + w) * D];
        std::fill(po, po + D, T(0));
        for (std::size_t v = 0; v < wh; ++v) {
          const T c = tw.cos[v * W + w] * mult[v], s = tw.sin[v * W + w] * mult[v];
          const T* ar = &tr[(h * wh + v) * D];
          const T* ai = &ti[(h * wh + v) * D];
          for (std::size_t ch = 0; ch < D; ++ch) po[ch] += ar[ch] * c - ai[ch] * s;
        }
      }
    }
  }
}

// Per-column weights over the trailing [W/2+1, D] block of a spectrum.
template <typename T>
Tensor<T> column_weights(std::size_t width, std::size_t channels, double numerator, bool hermitian_count) {
  const std::size_t wh = half_width(width);
  std::vector<T> w(wh * channels);
  for (std::size_t v = 0; v < wh; ++v) {
    const bool edge = v == 0 || (width % 2 == 0 && v == width / 2);
    const double c = edge ? 1.0 : 2.0;
    const double value = hermitian_count ? c / numerator : numerator / c;
    for (std::size_t ch = 0; ch < channels; ++ch) w[v * channels + ch] = static_cast<T>(value);
  }
  return Tensor<T>(Shape{wh, channels}, std::move(w));
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

template <typename T>
void fft_1d(std::span<std::complex<T>> data, bool inverse) {
  if (data.size() <= 1) return;
  if (is_power_of_two(data.size())) {
    radix2(data, inverse);
  } else {
    direct_dft(data, inverse);
  }
}

template <typename T>
ComplexSpectrum<T> rfft2(const Tensor<T>& x) {
  const auto d = plane_dims(x.shape(), "rfft2");
  if (d.height == 0 || d.width == 0) throw ShapeError("rfft2: empty plane");
  const std::size_t wh = half_width(d.width);
  const Shape out_shape = with_width(x.shape(), wh);
  std::vector<T> re(numel(out_shape)), im(numel(out_shape));
  rfft2_kernel<T>(x.data(), d, re, im);

  ComplexSpectrum<T> s{Tensor<T>(out_shape, std::move(re)), Tensor<T>(out_shape, std::move(im)), d.width};
  Tape<T>* tape = recording_tape<T>({&x});
  if (tape == nullptr) return s;

  // Adjoint of each half: HW * irfft2 of the gradient divided by the
  // Hermitian multiplicity of its column.
  const auto weights = column_weights<T>(d.width, d.channels, static_cast<double>(d.height * d.width), false);
  const std::size_t width = d.width;
  s.re = tape->record(s.re, {x}, [weights, width](const Tensor<T>& g, const std::vector<bool>&) {
    ComplexSpectrum<T> gs{ops::mul_bcast(g, weights), Tensor<T>::zeros(g.shape()), width};
    return std::vector<Tensor<T>>{irfft2(gs, width)};
  });
  s.im = tape->record(s.im, {x}, [weights, width](const Tensor<T>& g, const std::vector<bool>&) {
    ComplexSpectrum<T> gs{Tensor<T>::zeros(g.shape()), ops::mul_bcast(g, weights), width};
    return std::vector<Tensor<T>>{irfft2(gs, width)};
  });
  return s;
}

template <typename T>
Tensor<T> irfft2(const ComplexSpectrum<T>& s, std::size_t out_width) {
  if (s.re.shape() != s.im.shape()) throw ShapeError("irfft2: real and imaginary parts differ in shape");
  const auto sd = plane_dims(s.re.shape(), "irfft2");
  if (sd.width != half_width(out_width)) {
    throw ShapeError("irfft2: spectrum width " + std::to_string(sd.width) + " is inconsistent with output width " +
                     std::to_string(out_width));
  }
  PlaneDims d = sd;
  d.width = out_width;
  const Shape out_shape = with_width(s.re.shape(), out_width);
  std::vector<T> out(numel(out_shape));
  irfft2_kernel<T>(s.re.data(), s.im.data(), d, out);

  Tensor<T> result(out_shape, std::move(out));
  Tape<T>* tape = recording_tape<T>({&s.re, &s.im});
  if (tape == nullptr) return result;

  const auto weights = column_weights<T>(out_width, d.channels, static_cast<double>(d.height * d.width), true);
  return tape->record(std::move(result), {s.re, s.im}, [weights](const Tensor<T>& g, const std::vector<bool>& need) {
    const auto gs = rfft2(g);
    return std::vector<Tensor<T>>{need[0] ? ops::mul_bcast(gs.re, weights) : Tensor<T>(),
                                  need[1] ? ops::mul_bcast(gs.im, weights) : Tensor<T>()};
  });
}

template <typename T>
ComplexSpectrum<T> complex_filter_mul(const ComplexSpectrum<T>& s, const ComplexSpectrum<T>& filter) {
  if (filter.re.shape() != filter.im.shape()) throw ShapeError("complex_filter_mul: malformed filter");
  const Shape& ss = s.re.shape();
  const Shape& fs = filter.re.shape();
  const bool same = ss == fs;
  const bool trailing = fs.size() < ss.size() && std::equal(fs.rbegin(), fs.rend(), ss.rbegin());
  if (!same && !trailing) {
    throw ShapeError("complex_filter_mul: filter " + shape_string(fs) + " does not match spectrum " + shape_string(ss));
  }
  auto prod = [same](const Tensor<T>& a, const Tensor<T>& k) { return same ? ops::mul(a, k) : ops::mul_bcast(a, k); };
  ComplexSpectrum<T> out;
  out.re = ops::sub(prod(s.re, filter.re), prod(s.im, filter.im));
  out.im = ops::add(prod(s.re, filter.im), prod(s.im, filter.re));
  out.width = s.width;
  return out;
}

template void fft_1d<float>(std::span<std::complex<float>>, bool);
template void fft_1d<double>(std::span<std::complex<double>>, bool);
template ComplexSpectrum<float> rfft2(const Tensor<float>&);
template ComplexSpectrum<double> rfft2(const Tensor<double>&);
template Tensor<float> irfft2(const ComplexSpectrum<float>&, std::size_t);
template Tensor<double> irfft2(const ComplexSpectrum<double>&, std::size_t);
template ComplexSpectrum<float> complex_filter_mul(const ComplexSpectrum<float>&, const ComplexSpectrum<float>&);
template ComplexSpectrum<double> complex_filter_mul(const ComplexSpectrum<double>&, const ComplexSpectrum<double>&);

}  // namespace fctgan
