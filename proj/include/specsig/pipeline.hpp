#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specsig/audio.hpp"
#include "specsig/empirical.hpp"
#include "specsig/error.hpp"
#include "specsig/fit.hpp"
#include "specsig/manifest.hpp"
#include "specsig/pitch.hpp"
#include "specsig/report.hpp"
#include "specsig/spectral.hpp"
#include "specsig/synth.hpp"
#include "specsig/util.hpp"

namespace specsig {

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path output_dir;
  Weighting weighting = Weighting::magnitude;
  Pooling pooling = Pooling::normalized;
  std::vector<DistFamily> families{kAllFamilies.begin(), kAllFamilies.end()};
  int workers = 1;
  std::optional<std::uint64_t> seed;  // overrides manifest seeds for synth books
  bool dump_spectra = false;
  bool dump_empirical = false;

  PipelineSettings settings() const {
    PipelineSettings s;
    s.manifest_path = manifest_path.string();
    s.output_dir = output_dir.string();
    s.weighting = weighting;
    s.pooling = pooling;
    s.families = families;
    s.workers = workers;
    s.dump_spectra = dump_spectra;
    s.dump_empirical = dump_empirical;
    s.has_seed = seed.has_value();
    s.seed = seed.value_or(0);
    return s;
  }
};

struct AnalyzedBook {
  std::string book_id;
  std::vector<TrackProvenance> tracks;
  WeightedEmpirical emp;
};

namespace pipeline_detail {

inline void ensure_output_dir(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + config.output_dir.string());
}

}  // namespace pipeline_detail

// Ingest + spectral + empirical for every book in the manifest, in book-id
// order. Tracks are loaded and transformed concurrently; merging is
// order-independent, so the result does not depend on scheduling.
inline std::vector<AnalyzedBook> analyze_books(const RunConfig& config, const BookManifest& m) {
  if (m.books.empty()) throw Error(Errc::empty_input, "manifest lists no books");
  if (config.families.empty()) throw Error(Errc::empty_input, "no candidate families configured");

  std::vector<AnalyzedBook> out;
  for (const auto& [book_id, paths] : m.books) {
    std::vector<Spectrum> spectra(paths.size());
    std::vector<TrackProvenance> tracks(paths.size());
    const std::string& bid = book_id;

    parallel_for(paths.size(), config.workers, [&](std::size_t i) {
      try {
        TrackAudio audio = load_wav(paths[i]);
        audio.book_id = bid;
        spectra[i] = dft_real(audio);
        TrackProvenance tp;
        tp.track_id = audio.track_id;
        tp.path = paths[i];
        tp.content_hash = to_hex(fnv1a64_file(paths[i]));
        tp.n_samples = audio.samples.size();
        tp.sample_rate = audio.sample_rate;
        tracks[i] = std::move(tp);
      } catch (const Error& e) {
        throw Error(e.code(), "book '" + bid + "' track '" + paths[i] + "': " + e.what());
      }
    });

    if (config.dump_spectra) {
      pipeline_detail::ensure_output_dir(config);
      for (std::size_t i = 0; i < spectra.size(); ++i) {
        const auto path = config.output_dir /
                          (bid + "_" + tracks[i].track_id + "_spectrum.csv");
        std::ofstream sout(path, std::ios::binary);
        if (!sout) throw Error(Errc::io_error, "cannot write " + path.string());
        sout << "freq_hz,magnitude\n";
        for (std::size_t k = 0; k < spectra[i].freqs.size(); ++k)
          sout << fmt_double(spectra[i].freqs[k]) << ',' << fmt_double(spectra[i].mags[k]) << '\n';
      }
    }

    WeightedEmpirical emp = from_spectra(spectra, config.weighting, config.pooling);
    if (config.dump_empirical) {
      pipeline_detail::ensure_output_dir(config);
      emp.dump_csv(config.output_dir / (bid + "_empirical.csv"));
    }
    out.push_back(AnalyzedBook{bid, std::move(tracks), std::move(emp)});
  }
  return out;
}

// Seven fits, ranking, selection, pitch histogram per analyzed book.
inline std::vector<BookReport> fit_books(const RunConfig& config,
                                         std::span<const AnalyzedBook> analyzed) {
  std::vector<BookReport> reports;
  for (const auto& book : analyzed) {
    auto results = fit_all(book.emp, config.families, config.workers);
    BookReport r;
    r.book_id = book.book_id;
    r.ranked = rank_and_select(std::move(results), book.emp);
    r.hist = histogram(book.emp);
    r.tracks = book.tracks;
    r.n_eff = effective_n(book.emp);
    reports.push_back(std::move(r));
  }
  return reports;
}

inline void emit_reports(const RunConfig& config, std::span<const BookReport> reports) {
  pipeline_detail::ensure_output_dir(config);
  emit_moment_table(reports, config.output_dir / "moment_table.csv");
  emit_fit_table(reports, config.output_dir / "fit_table.csv");
  for (const auto& r : reports) {
    emit_histogram_csv(r, config.output_dir / (r.book_id + "_histogram.csv"));
    emit_histogram_svg(r, config.output_dir / (r.book_id + "_histogram.svg"));
  }
  write_run_manifest(reports, config.settings(), config.output_dir / "run_manifest.json");
}

// Generates any synth-section books into <output_dir>/synth_tracks and adds
// them to the books map, so a manifest can mix real and synthetic books. A
// config seed overrides the per-request seeds.
inline void materialize_synth_books(const RunConfig& config, BookManifest& m);

// The all-in-one entry point used by `run` and by tests.
inline std::vector<BookReport> run_pipeline(const RunConfig& config) {
  BookManifest m = load_manifest(config.manifest_path);
  materialize_synth_books(config, m);
  const auto analyzed = analyze_books(config, m);
  const auto reports = fit_books(config, analyzed);
  emit_reports(config, reports);
  return reports;
}

// Generates the WAV tracks for one synth-book request. Per-track seeds are
// drawn from a splitmix64 stream keyed by the request seed.
inline std::vector<std::string> generate_book(const SynthBookRequest& req,
                                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + out_dir.string());

  Splitmix64 seeder(req.seed);
  std::vector<std::string> paths;
  for (int i = 0; i < req.n_tracks; ++i) {
    SynthSpec spec;
    spec.target = req.target;
    spec.n_partials = req.n_partials;
    spec.duration_s = req.duration_s;
    spec.sample_rate = req.sample_rate;
    spec.seed = seeder.next();
    spec.track_id = req.book_id + "_track" + std::to_string(i + 1);
    spec.book_id = req.book_id;
    const TrackAudio track = generate_track(spec);
    const auto path = out_dir / (spec.track_id + ".wav");
    write_wav(track, path);
    paths.push_back(path.string());
  }
  return paths;
}

// Writes a books-only manifest referencing generated tracks, so a synth run
// can feed straight into `run --manifest`.
inline void write_books_manifest(const std::map<std::string, std::vector<std::string>>& books,
                                 const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  auto& jb = j["books"];
  for (const auto& [id, paths] : books) jb[id] = paths;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline void materialize_synth_books(const RunConfig& config, BookManifest& m) {
  for (auto req : m.synth_books) {
    if (m.books.count(req.book_id))
      throw Error(Errc::duplicate_track, "synth book id '" + req.book_id + "' already exists");
    if (config.seed) req.seed = *config.seed;
    m.books[req.book_id] = generate_book(req, config.output_dir / "synth_tracks");
  }
}

}  // namespace specsig
