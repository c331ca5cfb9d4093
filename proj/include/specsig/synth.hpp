#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "specsig/audio.hpp"
#include "specsig/distributions.hpp"
#include "specsig/error.hpp"
#include "specsig/spectral.hpp"

namespace specsig {

// splitmix64 (Steele, Lea, Bacon 2014). Chosen for its two-line definition:
// any other implementation of the same constants reproduces our tracks
// byte for byte.
struct Splitmix64 {
  std::uint64_t state;

  explicit Splitmix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform draw strictly inside (0, 1): (top 53 bits + 0.5) * 2^-53.
  double next_unit() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53; }
};

struct SynthSpec {
  DistSpec target;
  int n_partials = 1;
  double duration_s = 1.0;
  int sample_rate = 44100;
  std::uint64_t seed = 0;
  std::string track_id = "synth";
  std::string book_id;
};

// Sum of equal-amplitude sinusoids whose frequencies are quantile-transform
// draws from the target distribution. Each drawn frequency is quantized to
// the nearest transform bin k*fs/N so the track is exactly periodic: the
// magnitude spectrum is then a clean image of the draws, with no leakage
// blurring the oracle. Phases follow a deterministic quadratic schedule over
// the occupied bins to keep the crest factor low; draws landing on the same
// bin share a phase and therefore add coherently.
inline TrackAudio generate_track(const SynthSpec& spec) {
  spec.target.check();
  if (spec.n_partials < 1) throw Error(Errc::invalid_spec, "n_partials must be >= 1");
  if (!(spec.duration_s > 0.0)) throw Error(Errc::invalid_spec, "duration must be > 0");
  if (spec.sample_rate <= 0) throw Error(Errc::invalid_spec, "sample rate must be > 0");

  const auto n = static_cast<std::size_t>(
      std::llround(spec.duration_s * static_cast<double>(spec.sample_rate)));
  if (n < 4) throw Error(Errc::invalid_spec, "track too short");

  const double nyquist = 0.5 * spec.sample_rate;
  if (cdf(spec.target, nyquist) < 0.5)
    throw Error(Errc::nyquist_violation, "target places most of its mass above fs/2");

  // Draw partial frequencies and snap them to the bin grid. Draws that would
  // quantize to DC or land past the highest interior bin are redrawn, so the
  // partials sample the target truncated to the representable band instead of
  // piling an atom onto an edge bin.
  const double bin_hz = static_cast<double>(spec.sample_rate) / static_cast<double>(n);
  const auto k_max = static_cast<std::int64_t>((n - 1) / 2);
  Splitmix64 rng(spec.seed);
  std::map<std::int64_t, double> bin_counts;
  long attempts_left = 1000LL * spec.n_partials;
  for (int p = 0; p < spec.n_partials; ++p) {
    std::int64_t k = 0;
    do {
      if (attempts_left-- <= 0)
        throw Error(Errc::nyquist_violation,
                    "target mass lies outside the representable frequency band");
      const double f = quantile(spec.target, rng.next_unit());
      k = std::llround(f / bin_hz);
    } while (k < 1 || k > k_max);
    bin_counts[k] += 1.0;
  }

  // Assemble the sparse spectrum and synthesize by inverse transform.
  std::vector<std::complex<double>> bins(n, {0.0, 0.0});
  std::size_t j = 0;
  const auto n_distinct = static_cast<double>(bin_counts.size());
  for (const auto& [k, cnt] : bin_counts) {
    const double phase =
        std::numbers::pi * static_cast<double>(j) * static_cast<double>(j) / n_distinct;
    const std::complex<double> amp = std::polar(cnt, phase);
    bins[static_cast<std::size_t>(k)] = amp;
    bins[n - static_cast<std::size_t>(k)] = std::conj(amp);
    ++j;
  }
  const auto wave = fft(std::move(bins), /*inverse=*/true);

  double peak = 0.0;
  for (const auto& v : wave) peak = std::max(peak, std::abs(v.real()));
  const double gain = 0.9 / peak;

  TrackAudio track;
  track.sample_rate = spec.sample_rate;
  track.track_id = spec.track_id;
  track.book_id = spec.book_id;
  track.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) track.samples[i] = wave[i].real() * gain;
  return track;
}

// Canonical 16-bit PCM mono WAV writer; inverse of load_wav up to the
// 1/32768 quantization step.
inline void write_wav(const TrackAudio& track, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());

  const auto n = static_cast<std::uint32_t>(track.samples.size());
  const std::uint32_t data_size = n * 2;
  const auto rate = static_cast<std::uint32_t>(track.sample_rate);

  auto put_u16 = [&](std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
  };
  auto put_u32 = [&](std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(rate);
  put_u32(rate * 2);  // byte rate
  put_u16(2);         // block align
  put_u16(16);        // bits per sample
  out.write("data", 4);
  put_u32(data_size);

  for (double s : track.samples) {
    const auto q = static_cast<std::int16_t>(
        std::clamp<long long>(std::llround(s * 32768.0), -32768, 32767));
    put_u16(static_cast<std::uint16_t>(q));
  }
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

}  // namespace specsig
