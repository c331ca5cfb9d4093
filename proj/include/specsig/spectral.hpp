#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "specsig/audio.hpp"
#include "specsig/error.hpp"

namespace specsig {

// One-sided magnitude spectrum; freqs[k] = k * sample_rate / n_samples.
struct Spectrum {
  std::vector<double> freqs;
  std::vector<double> mags;
  int sample_rate = 0;
  std::size_t n_samples = 0;
};

namespace fft_detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. n must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    // Precomputed roots per stage keep the twiddle error flat in log N.
    std::vector<std::complex<double>> roots(len / 2);
    for (std::size_t k = 0; k < len / 2; ++k)
      roots[k] = std::polar(1.0, ang * static_cast<double>(k));
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * roots[k];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

// Chirp for Bluestein: exp(-i*pi*n^2/N), with n^2 reduced mod 2N in integer
// arithmetic so the angle stays in [0, 2pi) at any N.
inline std::complex<double> chirp(std::int64_t n, std::int64_t big_n) {
  const std::int64_t idx = (n * n) % (2 * big_n);
  const double ang = -std::numbers::pi * static_cast<double>(idx) / static_cast<double>(big_n);
  return std::polar(1.0, ang);
}

// Bluestein's algorithm: exact N-point DFT for arbitrary N via three
// power-of-two transforms of a chirp-modulated convolution.
inline std::vector<std::complex<double>> fft_bluestein(
    const std::vector<std::complex<double>>& x, bool inverse) {
  const std::size_t n = x.size();
  const auto ni = static_cast<std::int64_t>(n);
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  std::vector<std::complex<double>> a(m), b(m);
  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> w = chirp(static_cast<std::int64_t>(i), ni);
    if (inverse) w = std::conj(w);
    a[i] = x[i] * w;
    const std::complex<double> cw = std::conj(w);
    b[i] = cw;
    if (i != 0) b[m - i] = cw;
  }

  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_pow2(a, true);

  std::vector<std::complex<double>> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> w = chirp(static_cast<std::int64_t>(k), ni);
    if (inverse) w = std::conj(w);
    y[k] = a[k] * w;
    if (inverse) y[k] /= static_cast<double>(n);
  }
  return y;
}

}  // namespace fft_detail

// Full complex DFT of arbitrary length (forward: sum x[n] e^{-2pi i kn/N}).
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x,
                                             bool inverse = false) {
  if (x.empty()) throw Error(Errc::empty_signal, "fft of empty sequence");
  if (fft_detail::is_pow2(x.size())) {
    fft_detail::fft_pow2(x, inverse);
    return x;
  }
  return fft_detail::fft_bluestein(x, inverse);
}

// Direct O(N^2) evaluation of the DFT sum. Test oracle; intended for N <= 4096.
// The k*n product is reduced mod N in integers so the twiddle angles never
// lose precision to large arguments.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> samples) {
  if (samples.empty()) throw Error(Errc::empty_signal, "naive_dft of empty sequence");
  const std::size_t n = samples.size();
  const auto ni = static_cast<std::int64_t>(n);

  std::vector<std::complex<double>> twiddle(n);
  for (std::size_t m = 0; m < n; ++m)
    twiddle[m] =
        std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));

  std::vector<std::complex<double>> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t m = (static_cast<std::int64_t>(k) * static_cast<std::int64_t>(i)) % ni;
      acc += samples[i] * twiddle[static_cast<std::size_t>(m)];
    }
    y[k] = acc;
  }
  return y;
}

// One-sided magnitude spectrum of a whole track: one transform, no framing,
// no window. Exact at the native track length (no zero padding).
inline Spectrum dft_real(const TrackAudio& track) {
  if (track.samples.empty()) throw Error(Errc::empty_signal, "dft_real: track has no samples");
  const std::size_t n = track.samples.size();

  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = std::complex<double>(track.samples[i], 0.0);
  const auto y = fft(std::move(buf));

  const std::size_t half = n / 2 + 1;
  Spectrum s;
  s.sample_rate = track.sample_rate;
  s.n_samples = n;
  s.freqs.resize(half);
  s.mags.resize(half);
  for (std::size_t k = 0; k < half; ++k) {
    s.freqs[k] = static_cast<double>(k) * static_cast<double>(track.sample_rate) /
                 static_cast<double>(n);
    s.mags[k] = std::abs(y[k]);
  }
  return s;
}

}  // namespace specsig
