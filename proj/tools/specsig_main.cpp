// specsig: statistical signatures of audio collections.
//
// Subcommands:
//   analyze  ingest tracks, compute spectra, dump the weighted empirical data
//   fit      analyze + fit the candidate families and select a signature
//   report   full pipeline, tables + charts (same outputs as run)
//   synth    generate synthetic WAV books from a target distribution
//   run      all-in-one: analyze + fit + report
//
// Exit codes: 0 ok, 2 config/manifest error, 3 ingestion error,
// 4 no usable fit, 1 anything else.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specsig/pipeline.hpp"

namespace {

using namespace specsig;

struct CliOptions {
  std::string manifest;
  std::string out_dir = "specsig_out";
  std::string weighting = "magnitude";
  std::string pooling = "normalized";
  std::vector<std::string> families;
  int workers = 1;
  bool dump_spectra = false;
  bool dump_empirical = false;
  std::optional<std::uint64_t> seed;
};

void add_pipeline_options(CLI::App* cmd, CliOptions& opt, bool manifest_required = true) {
  auto* m = cmd->add_option("--manifest", opt.manifest, "book manifest (JSON)");
  if (manifest_required) m->required();
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--weighting", opt.weighting, "magnitude|power")
      ->check(CLI::IsMember({"magnitude", "power"}));
  cmd->add_option("--pooling", opt.pooling, "normalized|raw")
      ->check(CLI::IsMember({"normalized", "raw"}));
  cmd->add_option("--families", opt.families, "candidate families (default: all seven)")
      ->delimiter(',');
  cmd->add_option("--workers", opt.workers, "parallel workers")->check(CLI::PositiveNumber);
  cmd->add_flag("--dump-spectra", opt.dump_spectra, "write per-track spectrum CSVs");
  cmd->add_flag("--dump-empirical", opt.dump_empirical, "write per-book empirical CSVs");
  cmd->add_option("--seed", [&opt](const std::vector<std::string>& v) {
    opt.seed = std::stoull(v.front());
    return true;
  }, "seed override for synth books");
}

RunConfig build_config(const CliOptions& opt) {
  RunConfig cfg;
  cfg.manifest_path = opt.manifest;
  cfg.output_dir = opt.out_dir;
  cfg.weighting = opt.weighting == "power" ? Weighting::power : Weighting::magnitude;
  cfg.pooling = opt.pooling == "raw" ? Pooling::raw : Pooling::normalized;
  cfg.workers = opt.workers;
  cfg.dump_spectra = opt.dump_spectra;
  cfg.dump_empirical = opt.dump_empirical;
  cfg.seed = opt.seed;
  if (!opt.families.empty()) {
    cfg.families.clear();
    for (const auto& name : opt.families) {
      const auto fam = parse_family(name);
      if (!fam) throw Error(Errc::parse_error, "unknown family '" + name + "'");
      cfg.families.push_back(*fam);
    }
  }
  return cfg;
}

int run_stages(const RunConfig& cfg, bool do_fit, bool do_report) {
  BookManifest manifest;
  try {
    manifest = load_manifest(cfg.manifest_path);
    if (cfg.families.empty()) throw Error(Errc::empty_input, "no candidate families");
  } catch (const Error& e) {
    std::cerr << "specsig: manifest error: " << e.what() << '\n';
    return 2;
  }

  try {
    materialize_synth_books(cfg, manifest);
  } catch (const Error& e) {
    std::cerr << "specsig: synth generation error: " << e.what() << '\n';
    return e.code() == Errc::duplicate_track ? 2 : 1;
  }

  std::vector<AnalyzedBook> analyzed;
  try {
    RunConfig acfg = cfg;
    if (!do_fit) acfg.dump_empirical = true;  // analyze's primary artifact
    analyzed = analyze_books(acfg, manifest);
  } catch (const Error& e) {
    std::cerr << "specsig: ingestion error: " << e.what() << '\n';
    return 3;
  }
  if (!do_fit) return 0;

  std::vector<BookReport> reports;
  try {
    reports = fit_books(cfg, analyzed);
  } catch (const Error& e) {
    if (e.code() == Errc::no_usable_fit) {
      std::cerr << "specsig: " << e.what() << '\n';
      return 4;
    }
    std::cerr << "specsig: fit error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (do_report) {
      emit_reports(cfg, reports);
    } else {
      pipeline_detail::ensure_output_dir(cfg);
      emit_fit_table(reports, cfg.output_dir / "fit_table.csv");
      write_run_manifest(reports, cfg.settings(), cfg.output_dir / "run_manifest.json");
    }
  } catch (const Error& e) {
    std::cerr << "specsig: output error: " << e.what() << '\n';
    return 1;
  }

  for (const auto& r : reports)
    std::cout << r.book_id << ": " << to_string(r.selected().spec.family) << " ("
              << to_string(r.ranked.reason) << ", d=" << fmt_double(r.selected().ks_d) << ")\n";
  return 0;
}

int run_synth(const CliOptions& opt, const SynthBookRequest& flags_req, bool have_flag_book,
              const std::string& manifest_out) {
  std::vector<SynthBookRequest> requests;
  try {
    if (!opt.manifest.empty()) {
      const auto m = load_manifest(opt.manifest);
      requests = m.synth_books;
      if (requests.empty())
        throw Error(Errc::parse_error, "manifest has no synth section");
    }
    if (have_flag_book) requests.push_back(flags_req);
    if (requests.empty())
      throw Error(Errc::parse_error, "nothing to generate: pass --family or --manifest");
  } catch (const Error& e) {
    std::cerr << "specsig: synth config error: " << e.what() << '\n';
    return 2;
  }

  try {
    std::map<std::string, std::vector<std::string>> books;
    for (auto req : requests) {
      if (opt.seed) req.seed = *opt.seed;
      books[req.book_id] = generate_book(req, opt.out_dir);
      std::cout << req.book_id << ": " << books[req.book_id].size() << " tracks -> "
                << opt.out_dir << '\n';
    }
    if (!manifest_out.empty()) write_books_manifest(books, manifest_out);
  } catch (const Error& e) {
    std::cerr << "specsig: synth error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statistical signatures of audio collections"};
  app.require_subcommand(1);

  CliOptions opt;

  auto* cmd_run = app.add_subcommand("run", "analyze + fit + report");
  add_pipeline_options(cmd_run, opt);
  auto* cmd_analyze = app.add_subcommand("analyze", "ingest and dump empirical distributions");
  add_pipeline_options(cmd_analyze, opt);
  auto* cmd_fit = app.add_subcommand("fit", "analyze + fit, emit the fit table");
  add_pipeline_options(cmd_fit, opt);
  auto* cmd_report = app.add_subcommand("report", "full pipeline with tables and charts");
  add_pipeline_options(cmd_report, opt);

  auto* cmd_synth = app.add_subcommand("synth", "generate synthetic books");
  std::string synth_family, synth_book_id = "synthbook", manifest_out;
  double synth_shape1 = 0.0, synth_shape2 = 0.0, synth_loc = 0.0, synth_scale = 1.0;
  double synth_duration = 30.0;
  int synth_tracks = 1, synth_partials = 5000, synth_rate = 44100;
  std::uint64_t synth_seed = 0;
  cmd_synth->add_option("--manifest", opt.manifest, "manifest with a synth section");
  cmd_synth->add_option("--out", opt.out_dir, "output directory for WAV files");
  cmd_synth->add_option("--family", synth_family, "target family");
  cmd_synth->add_option("--shape1", synth_shape1, "first shape parameter");
  cmd_synth->add_option("--shape2", synth_shape2, "second shape parameter");
  cmd_synth->add_option("--loc", synth_loc, "location (Hz)");
  cmd_synth->add_option("--scale", synth_scale, "scale (Hz)");
  cmd_synth->add_option("--book-id", synth_book_id, "book id for generated tracks");
  cmd_synth->add_option("--tracks", synth_tracks, "tracks per book");
  cmd_synth->add_option("--partials", synth_partials, "sinusoid partials per track");
  cmd_synth->add_option("--duration", synth_duration, "track duration, seconds");
  cmd_synth->add_option("--rate", synth_rate, "sample rate, Hz");
  cmd_synth->add_option("--seed", synth_seed, "generation seed");
  cmd_synth->add_option("--manifest-out", manifest_out, "write a books manifest for `run`");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_synth->parsed()) {
      SynthBookRequest req;
      bool have = false;
      if (!synth_family.empty()) {
        const auto fam = parse_family(synth_family);
        if (!fam) {
          std::cerr << "specsig: unknown family '" << synth_family << "'\n";
          return 2;
        }
        req.book_id = synth_book_id;
        req.n_tracks = synth_tracks;
        req.target = DistSpec{*fam, synth_shape1, synth_shape2, synth_loc, synth_scale};
        req.n_partials = synth_partials;
        req.duration_s = synth_duration;
        req.sample_rate = synth_rate;
        req.seed = synth_seed;
        have = true;
      }
      return run_synth(opt, req, have, manifest_out);
    }

    const RunConfig cfg = build_config(opt);
    if (cmd_analyze->parsed()) return run_stages(cfg, /*do_fit=*/false, /*do_report=*/false);
    if (cmd_fit->parsed()) return run_stages(cfg, /*do_fit=*/true, /*do_report=*/false);
    return run_stages(cfg, /*do_fit=*/true, /*do_report=*/true);  // run, report
  } catch (const Error& e) {
    std::cerr << "specsig: " << e.what() << '\n';
    return e.code() == Errc::parse_error || e.code() == Errc::empty_input ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "specsig: " << e.what() << '\n';
    return 1;
  }
}
