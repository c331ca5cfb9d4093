#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "specsig/pitch.hpp"
#include "specsig/synth.hpp"

using namespace specsig;
using doctest::Approx;

TEST_CASE("hz_to_pitch: reference notes") {
  {
    const auto pc = hz_to_pitch(440.0);
    REQUIRE(pc.range == PitchRange::in_range);
    CHECK(pc.bin.label() == "A4");
    CHECK(pc.bin.midi == 69);
    CHECK(pc.bin.center_hz == Approx(440.0).epsilon(1e-12));
  }
  {
    const auto pc = hz_to_pitch(261.6256);
    REQUIRE(pc.range == PitchRange::in_range);
    CHECK(pc.bin.label() == "C4");
  }
}

TEST_CASE("hz_to_pitch: half-open bins put the boundary in the upper bin") {
  const double boundary = 440.0 * std::exp2(1.0 / 24.0);  // upper edge of A4
  const auto pc = hz_to_pitch(boundary);
  REQUIRE(pc.range == PitchRange::in_range);
  CHECK(pc.bin.label() == "A#4");
  // one ulp below still belongs to A4
  const auto below = hz_to_pitch(std::nextafter(boundary, 0.0));
  CHECK(below.bin.label() == "A4");
}

TEST_CASE("octave_lines: nine C centers, exact doubling") {
  const auto lines = octave_lines();
  REQUIRE(lines.size() == 9);
  CHECK(lines.front() == Approx(16.3516).epsilon(1e-5));
  CHECK(lines.back() == Approx(4186.009).epsilon(1e-6));
  for (std::size_t k = 1; k < lines.size(); ++k) CHECK(lines[k] == 2.0 * lines[k - 1]);
}

TEST_CASE("octave shift: doubling the frequency raises the octave by one") {
  Splitmix64 rng(1234);
  int checked = 0;
  while (checked < 1000) {
    // keep both f and 2f inside C0..B8
    const double f = 17.0 * std::pow(2.0, 7.0 * rng.next_unit());
    const auto lo = hz_to_pitch(f);
    const auto hi = hz_to_pitch(2.0 * f);
    if (lo.range != PitchRange::in_range || hi.range != PitchRange::in_range) continue;
    CHECK(hi.bin.semitone() == lo.bin.semitone());
    CHECK(hi.bin.octave() == lo.bin.octave() + 1);
    ++checked;
  }
}

TEST_CASE("bins partition the range: no gaps, no overlaps") {
  const auto& first = hz_to_pitch(16.5).bin;  // C0
  CHECK(first.label() == "C0");
  // walk the edges: every bin's hi is the next bin's lo, bitwise
  double expected_lo = hz_to_pitch(16.4).bin.lo_hz;
  for (int midi = kMidiC0; midi <= kMidiB8; ++midi) {
    const double center = 440.0 * std::exp2((static_cast<double>(midi) - 69.0) / 12.0);
    const auto pc = hz_to_pitch(center);
    REQUIRE(pc.range == PitchRange::in_range);
    CHECK(pc.bin.midi == midi);
    CHECK(pc.bin.lo_hz == expected_lo);
    CHECK(pc.bin.lo_hz < pc.bin.center_hz);
    CHECK(pc.bin.center_hz < pc.bin.hi_hz);
    CHECK(pc.bin.hi_hz / pc.bin.lo_hz == Approx(std::exp2(1.0 / 12.0)).epsilon(1e-12));
    expected_lo = pc.bin.hi_hz;
  }
}

TEST_CASE("out-of-range tags and the non-positive error") {
  CHECK(hz_to_pitch(1.0).range == PitchRange::below_c0);
  CHECK(hz_to_pitch(30000.0).range == PitchRange::above_b8);
  try {
    hz_to_pitch(0.0);
    FAIL("expected");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_positive_frequency);
  }
  CHECK_THROWS_AS(hz_to_pitch(-10.0), Error);
}

TEST_CASE("histogram: single value at 440 Hz fills exactly the A4 bin") {
  const WeightedEmpirical emp({440.0}, {1.0});
  const auto h = histogram(emp);
  for (std::size_t i = 0; i < h.rel_freq.size(); ++i) {
    if (h.bin(i).label() == "A4")
      CHECK(h.rel_freq[i] == 1.0);
    else
      CHECK(h.rel_freq[i] == 0.0);
  }
  CHECK(h.below_c0 == 0.0);
  CHECK(h.above_b8 == 0.0);
}

TEST_CASE("histogram: two equal-weight values split the mass") {
  const double c4 = 440.0 * std::exp2((60.0 - 69.0) / 12.0);
  const double c5 = 440.0 * std::exp2((72.0 - 69.0) / 12.0);
  const auto h = histogram(WeightedEmpirical({c4, c5}, {3.0, 3.0}));
  double c4_mass = 0.0, c5_mass = 0.0;
  for (std::size_t i = 0; i < h.rel_freq.size(); ++i) {
    if (h.bin(i).label() == "C4") c4_mass = h.rel_freq[i];
    if (h.bin(i).label() == "C5") c5_mass = h.rel_freq[i];
  }
  CHECK(c4_mass == 0.5);
  CHECK(c5_mass == 0.5);
}

TEST_CASE("histogram: matches a brute-force binning loop and conserves mass") {
  Splitmix64 rng(77);
  std::vector<double> xs, ws;
  for (int i = 0; i < 500; ++i) {
    xs.push_back(std::pow(10.0, 0.3 + 4.2 * rng.next_unit()));  // 2 Hz .. 60 kHz-ish
    ws.push_back(0.01 + rng.next_unit());
  }
  const WeightedEmpirical emp(xs, ws);
  const auto h = histogram(emp);

  std::map<std::string, double> brute;
  double below = 0.0, above = 0.0, total = 0.0;
  for (std::size_t i = 0; i < emp.values().size(); ++i) {
    const double w = emp.weights()[i];
    total += w;
    const auto pc = hz_to_pitch(emp.values()[i]);
    if (pc.range == PitchRange::below_c0)
      below += w;
    else if (pc.range == PitchRange::above_b8)
      above += w;
    else
      brute[pc.bin.label()] += w;
  }

  double mass = h.below_c0 + h.above_b8;
  for (std::size_t i = 0; i < h.rel_freq.size(); ++i) {
    mass += h.rel_freq[i];
    const auto it = brute.find(h.bin(i).label());
    const double want = it == brute.end() ? 0.0 : it->second / total;
    CHECK(h.rel_freq[i] == Approx(want).epsilon(1e-12));
  }
  CHECK(h.below_c0 == Approx(below / total).epsilon(1e-12));
  CHECK(h.above_b8 == Approx(above / total).epsilon(1e-12));
  CHECK(mass == Approx(1.0).epsilon(1e-12));
}
