#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "specsig/empirical.hpp"
#include "specsig/error.hpp"

namespace specsig {

// Equal temperament anchored at A4 = 440 Hz; semitone-wide bins, half-open
// [lo, hi), covering scientific pitch notation C0..B8.
inline constexpr int kMidiC0 = 12;
inline constexpr int kMidiB8 = 119;
inline constexpr int kPitchBins = kMidiB8 - kMidiC0 + 1;  // 108

inline const char* note_name(int semitone) {
  static constexpr const char* kNames[12] = {"C", "C#", "D", "D#", "E",  "F",
                                             "F#", "G",  "G#", "A", "A#", "B"};
  return kNames[semitone];
}

struct PitchBin {
  int midi = 0;  // A4 <-> 69
  double center_hz = 0.0;
  double lo_hz = 0.0;
  double hi_hz = 0.0;

  int semitone() const { return midi % 12; }
  int octave() const { return midi / 12 - 1; }
  std::string label() const { return std::string(note_name(semitone())) + std::to_string(octave()); }
};

namespace pitch_detail {

// Shared edge array: edge[j] is both the upper edge of bin j-1 and the lower
// edge of bin j, computed from a single expression so boundary frequencies
// land deterministically.
struct Table {
  std::array<double, kPitchBins + 1> edges;
  std::array<PitchBin, kPitchBins> bins;

  Table() {
    for (int j = 0; j <= kPitchBins; ++j)
      edges[static_cast<std::size_t>(j)] =
          440.0 * std::exp2((static_cast<double>(kMidiC0 + j) - 69.5) / 12.0);
    for (int j = 0; j < kPitchBins; ++j) {
      PitchBin b;
      b.midi = kMidiC0 + j;
      b.center_hz = 440.0 * std::exp2((static_cast<double>(b.midi) - 69.0) / 12.0);
      b.lo_hz = edges[static_cast<std::size_t>(j)];
      b.hi_hz = edges[static_cast<std::size_t>(j) + 1];
      bins[static_cast<std::size_t>(j)] = b;
    }
  }

  static const Table& instance() {
    static const Table t;
    return t;
  }
};

}  // namespace pitch_detail

enum class PitchRange { in_range, below_c0, above_b8 };

struct PitchClass {
  PitchRange range = PitchRange::in_range;
  PitchBin bin;  // meaningful only when in_range
};

inline PitchClass hz_to_pitch(double f) {
  if (!(f > 0.0)) throw Error(Errc::non_positive_frequency, "frequency must be > 0");
  const auto& t = pitch_detail::Table::instance();
  PitchClass pc;
  if (f < t.edges.front()) {
    pc.range = PitchRange::below_c0;
    return pc;
  }
  if (f >= t.edges.back()) {
    pc.range = PitchRange::above_b8;
    return pc;
  }
  const auto it = std::upper_bound(t.edges.begin(), t.edges.end(), f);
  const auto idx = static_cast<std::size_t>(it - t.edges.begin()) - 1;
  pc.range = PitchRange::in_range;
  pc.bin = t.bins[idx];
  return pc;
}

// The nine C-note centers C0..C8; successive entries double exactly.
inline std::vector<double> octave_lines() {
  std::vector<double> lines(9);
  lines[0] = 440.0 * std::exp2((static_cast<double>(kMidiC0) - 69.0) / 12.0);  // C0
  for (std::size_t k = 1; k < lines.size(); ++k) lines[k] = 2.0 * lines[k - 1];
  return lines;
}

struct PitchHistogram {
  std::array<double, kPitchBins> rel_freq{};
  double below_c0 = 0.0;
  double above_b8 = 0.0;

  const PitchBin& bin(std::size_t i) const { return pitch_detail::Table::instance().bins[i]; }
  double in_range_mass() const {
    double s = 0.0;
    for (double v : rel_freq) s += v;
    return s;
  }
};

inline PitchHistogram histogram(const WeightedEmpirical& emp) {
  PitchHistogram h;
  const auto& xs = emp.values();
  const auto& ws = emp.weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) {
      h.below_c0 += ws[i];  // non-positive frequencies cannot be pitches
      continue;
    }
    const PitchClass pc = hz_to_pitch(xs[i]);
    switch (pc.range) {
      case PitchRange::below_c0: h.below_c0 += ws[i]; break;
      case PitchRange::above_b8: h.above_b8 += ws[i]; break;
      case PitchRange::in_range:
        h.rel_freq[static_cast<std::size_t>(pc.bin.midi - kMidiC0)] += ws[i];
        break;
    }
  }
  const double inv = 1.0 / emp.total_weight();
  for (double& v : h.rel_freq) v *= inv;
  h.below_c0 *= inv;
  h.above_b8 *= inv;
  return h;
}

}  // namespace specsig
