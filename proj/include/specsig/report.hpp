#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specsig/distributions.hpp"
#include "specsig/empirical.hpp"
#include "specsig/fit.hpp"
#include "specsig/pitch.hpp"
#include "specsig/util.hpp"

namespace specsig {

struct TrackProvenance {
  std::string track_id;
  std::string path;
  std::string content_hash;  // fnv1a64, hex
  std::size_t n_samples = 0;
  int sample_rate = 0;
};

// Everything the emitters need for one book. Moments of the signature are
// recomputed from the selected spec on demand, never cached alongside it.
struct BookReport {
  std::string book_id;
  RankedFits ranked;
  PitchHistogram hist;
  std::vector<TrackProvenance> tracks;
  double n_eff = 0.0;

  const FitResult& selected() const { return ranked.chosen(); }
  Moments selected_moments() const { return theoretical_moments(selected().spec); }
};

namespace report_detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  return out;
}

}  // namespace report_detail

// Moment panel, one row per book: Name,Median,Mean,Variance,Entropy,Skew,Kurtosis.
inline void emit_moment_table(std::span<const BookReport> reports,
                              const std::filesystem::path& path) {
  if (reports.empty()) throw Error(Errc::empty_input, "no reports to emit");
  auto out = report_detail::open_out(path);
  out << "Name,Median,Mean,Variance,Entropy,Skew,Kurtosis\n";
  for (const auto& r : reports) {
    const Moments m = r.selected_moments();
    out << r.book_id << ',' << fmt_double(m.median) << ',' << fmt_double(m.mean) << ','
        << fmt_double(m.variance) << ',' << fmt_double(m.entropy) << ','
        << fmt_double(m.skewness) << ',' << fmt_double(m.excess_kurtosis) << '\n';
  }
}

// Fit panel: two rows per book, the top-ranked fit and the selected
// signature (they coincide with the top two ranks unless several flagged
// leaders were skipped).
inline void emit_fit_table(std::span<const BookReport> reports,
                           const std::filesystem::path& path) {
  if (reports.empty()) throw Error(Errc::empty_input, "no reports to emit");
  auto out = report_detail::open_out(path);
  out << "Name,rank,family,shape1,shape2,loc,scale,ks_d,ks_p,error,selected,selection_reason\n";
  for (const auto& r : reports) {
    std::vector<std::size_t> rows = {0};
    if (r.ranked.selected != 0)
      rows.push_back(r.ranked.selected);
    else if (r.ranked.ranked.size() > 1)
      rows.push_back(1);
    for (std::size_t i : rows) {
      const FitResult& f = r.ranked.ranked[i];
      out << r.book_id << ',' << (i + 1) << ',' << to_string(f.spec.family) << ','
          << fmt_double(f.spec.shape1) << ',' << fmt_double(f.spec.shape2) << ','
          << fmt_double(f.spec.loc) << ',' << fmt_double(f.spec.scale) << ','
          << fmt_double(f.ks_d) << ',' << fmt_double(f.ks_p) << ',' << to_string(f.error) << ','
          << (i == r.ranked.selected ? "true" : "false") << ',' << to_string(r.ranked.reason)
          << '\n';
    }
  }
}

// Pitch-binned relative frequencies plus the two out-of-range tallies.
inline void emit_histogram_csv(const BookReport& report, const std::filesystem::path& path) {
  auto out = report_detail::open_out(path);
  out << "note,octave,center_hz,rel_freq\n";
  for (std::size_t i = 0; i < report.hist.rel_freq.size(); ++i) {
    const PitchBin& b = report.hist.bin(i);
    out << note_name(b.semitone()) << ',' << b.octave() << ',' << fmt_double(b.center_hz) << ','
        << fmt_double(report.hist.rel_freq[i]) << '\n';
  }
  out << "below_range,-1,0," << fmt_double(report.hist.below_c0) << '\n';
  out << "above_range,9,0," << fmt_double(report.hist.above_b8) << '\n';
}

// Relative-frequency chart: pitch bins on a log-frequency axis, nine octave
// reference lines at the C notes, and the selected distribution's expected
// bin mass overlaid for a visual goodness-of-fit audit.
inline void emit_histogram_svg(const BookReport& report, const std::filesystem::path& path) {
  const double width = 1100.0, height = 480.0;
  const double ml = 70.0, mr = 30.0, mt = 40.0, mb = 60.0;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;

  const auto& table = pitch_detail::Table::instance();
  const double lx0 = std::log2(table.edges.front());
  const double lx1 = std::log2(table.edges.back());
  auto x_of = [&](double hz) { return ml + (std::log2(hz) - lx0) / (lx1 - lx0) * plot_w; };

  // Expected per-bin mass under the selected signature.
  const DistSpec& spec = report.selected().spec;
  std::vector<double> expected(kPitchBins);
  for (int i = 0; i < kPitchBins; ++i) {
    const PitchBin& b = table.bins[static_cast<std::size_t>(i)];
    expected[static_cast<std::size_t>(i)] = cdf(spec, b.hi_hz) - cdf(spec, b.lo_hz);
  }

  double y_max = 1e-12;
  for (double v : report.hist.rel_freq) y_max = std::max(y_max, v);
  for (double v : expected) y_max = std::max(y_max, v);
  y_max *= 1.05;
  auto y_of = [&](double v) { return mt + plot_h * (1.0 - v / y_max); };

  auto out = report_detail::open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
      << report.book_id << ": relative frequencies of the spectrum ("
      << to_string(spec.family) << " signature)</text>\n";

  // Octave reference lines at C0..C8.
  const auto lines = octave_lines();
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const double x = x_of(lines[k]);
    out << "<line class=\"octave-line\" x1=\"" << fmt_double(x) << "\" y1=\"" << mt
        << "\" x2=\"" << fmt_double(x) << "\" y2=\"" << mt + plot_h
        << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << fmt_double(x + 2.0) << "\" y=\"" << mt + plot_h + 16.0
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">C" << k
        << "</text>\n";
  }

  // Bars (only occupied bins are drawn).
  for (int i = 0; i < kPitchBins; ++i) {
    const double v = report.hist.rel_freq[static_cast<std::size_t>(i)];
    if (v <= 0.0) continue;
    const PitchBin& b = table.bins[static_cast<std::size_t>(i)];
    const double x0 = x_of(b.lo_hz);
    const double x1 = x_of(b.hi_hz);
    const double y = y_of(v);
    out << "<rect class=\"bar\" data-note=\"" << b.label() << "\" data-relfreq=\""
        << fmt_double(v) << "\" x=\"" << fmt_double(x0) << "\" y=\"" << fmt_double(y)
        << "\" width=\"" << fmt_double(x1 - x0) << "\" height=\""
        << fmt_double(mt + plot_h - y) << "\" fill=\"#4878a8\"/>\n";
  }

  // Overlay: expected mass of the fitted signature, one point per bin center.
  out << "<polyline class=\"pdf-overlay\" fill=\"none\" stroke=\"#c44e52\" stroke-width=\"1.5\" "
         "points=\"";
  for (int i = 0; i < kPitchBins; ++i) {
    const PitchBin& b = table.bins[static_cast<std::size_t>(i)];
    if (i) out << ' ';
    out << fmt_double(x_of(b.center_hz)) << ',' << fmt_double(y_of(expected[static_cast<std::size_t>(i)]));
  }
  out << "\"/>\n";

  // Axes.
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = y_max * t / 4.0;
    out << "<text x=\"8\" y=\"" << fmt_double(y_of(v) + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_double(v) << "</text>\n";
  }
  out << "<text x=\"" << ml + plot_w / 2.0 - 60.0 << "\" y=\"" << height - 12.0
      << "\" font-family=\"sans-serif\" font-size=\"13\">pitch (scientific notation, log "
         "frequency)</text>\n";
  out << "</svg>\n";
}

struct PipelineSettings {
  std::string manifest_path;
  std::string output_dir;
  Weighting weighting = Weighting::magnitude;
  Pooling pooling = Pooling::normalized;
  std::vector<DistFamily> families;
  int workers = 1;
  bool dump_spectra = false;
  bool dump_empirical = false;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

// Machine-readable record of the run: settings, input fingerprints, and the
// selected signature per book.
inline void write_run_manifest(std::span<const BookReport> reports, const PipelineSettings& s,
                               const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["settings"]["manifest"] = s.manifest_path;
  j["settings"]["output_dir"] = s.output_dir;
  j["settings"]["weighting"] = to_string(s.weighting);
  j["settings"]["pooling"] = to_string(s.pooling);
  {
    std::vector<std::string> fams;
    for (auto f : s.families) fams.emplace_back(to_string(f));
    j["settings"]["families"] = fams;
  }
  j["settings"]["workers"] = s.workers;
  if (s.has_seed) j["settings"]["seed"] = s.seed;
  j["settings"]["transform"] = "full-track DFT, exact length (no zero padding, no window)";

  auto& books = j["books"];
  books = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json b;
    b["book_id"] = r.book_id;
    b["n_eff"] = r.n_eff;
    b["selected_family"] = to_string(r.selected().spec.family);
    b["selection_reason"] = to_string(r.ranked.reason);
    auto& tracks = b["tracks"];
    tracks = nlohmann::ordered_json::array();
    for (const auto& t : r.tracks) {
      nlohmann::ordered_json tj;
      tj["track_id"] = t.track_id;
      tj["path"] = t.path;
      tj["fnv1a64"] = t.content_hash;
      tj["n_samples"] = t.n_samples;
      tj["sample_rate"] = t.sample_rate;
      tracks.push_back(std::move(tj));
    }
    books.push_back(std::move(b));
  }

  auto out = report_detail::open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace specsig
