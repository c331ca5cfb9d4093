#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "specsig/error.hpp"

namespace specsig {

// One mono PCM signal. Samples are 16-bit integers normalized by 32768,
// so the full converter range maps onto [-1, 1] with -32768 -> -1 exactly.
struct TrackAudio {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string track_id;
  std::string book_id;
};

inline std::vector<double> downmix_stereo(std::span<const double> left,
                                          std::span<const double> right) {
  if (left.size() != right.size())
    throw Error(Errc::length_mismatch, "stereo channels differ in length (" +
                                           std::to_string(left.size()) + " vs " +
                                           std::to_string(right.size()) + ")");
  std::vector<double> mono(left.size());
  for (std::size_t i = 0; i < left.size(); ++i) mono[i] = 0.5 * (left[i] + right[i]);
  return mono;
}

namespace wav_detail {

inline std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline bool tag_is(const unsigned char* p, const char* tag) {
  return p[0] == static_cast<unsigned char>(tag[0]) && p[1] == static_cast<unsigned char>(tag[1]) &&
         p[2] == static_cast<unsigned char>(tag[2]) && p[3] == static_cast<unsigned char>(tag[3]);
}

}  // namespace wav_detail

// Loads a canonical 16-bit PCM RIFF/WAVE file and downmixes stereo to mono.
// Non-audio chunks (LIST, INFO, ...) are skipped; real CD rips contain them.
inline TrackAudio load_wav(const std::filesystem::path& path) {
  using namespace wav_detail;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE"))
    throw Error(Errc::not_riff_wave, path.string());

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data_ptr = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t chunk_size = rd_u32(hdr + 4);
    const std::size_t body = pos + 8;

    if (tag_is(hdr, "fmt ")) {
      if (chunk_size < 16 || body + 16 > bytes.size())
        throw Error(Errc::truncated_data, path.string() + ": fmt chunk too short");
      const std::uint16_t format_code = rd_u16(bytes.data() + body);
      channels = rd_u16(bytes.data() + body + 2);
      sample_rate = rd_u32(bytes.data() + body + 4);
      const std::uint16_t bits = rd_u16(bytes.data() + body + 14);
      if (format_code != 1)
        throw Error(Errc::unsupported_format,
                    path.string() + ": format code " + std::to_string(format_code) + " (want PCM)");
      if (bits != 16)
        throw Error(Errc::unsupported_format,
                    path.string() + ": " + std::to_string(bits) + "-bit (want 16)");
      if (channels != 1 && channels != 2)
        throw Error(Errc::unsupported_format,
                    path.string() + ": " + std::to_string(channels) + " channels (want 1 or 2)");
      if (sample_rate == 0)
        throw Error(Errc::unsupported_format, path.string() + ": zero sample rate");
      have_fmt = true;
    } else if (tag_is(hdr, "data")) {
      if (!have_fmt) throw Error(Errc::unsupported_format, path.string() + ": data before fmt");
      if (body + chunk_size > bytes.size())
        throw Error(Errc::truncated_data, path.string() + ": data chunk exceeds file size");
      data_ptr = bytes.data() + body;
      data_size = chunk_size;
      break;
    }
    // skip unknown chunk, word aligned
    pos = body + chunk_size + (chunk_size & 1);
  }

  if (!have_fmt || data_ptr == nullptr)
    throw Error(Errc::not_riff_wave, path.string() + ": missing fmt or data chunk");

  const std::size_t frame_bytes = 2u * channels;
  const std::size_t n_frames = data_size / frame_bytes;
  if (n_frames == 0) throw Error(Errc::empty_signal, path.string() + ": no samples");

  TrackAudio track;
  track.sample_rate = static_cast<int>(sample_rate);
  track.track_id = path.stem().string();
  track.samples.resize(n_frames);

  constexpr double kScale = 1.0 / 32768.0;
  if (channels == 1) {
    for (std::size_t i = 0; i < n_frames; ++i) {
      const auto v = static_cast<std::int16_t>(rd_u16(data_ptr + 2 * i));
      track.samples[i] = static_cast<double>(v) * kScale;
    }
  } else {
    std::vector<double> left(n_frames), right(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
      left[i] = static_cast<double>(static_cast<std::int16_t>(rd_u16(data_ptr + 4 * i))) * kScale;
      right[i] =
          static_cast<double>(static_cast<std::int16_t>(rd_u16(data_ptr + 4 * i + 2))) * kScale;
    }
    track.samples = downmix_stereo(left, right);
  }
  return track;
}

}  // namespace specsig
