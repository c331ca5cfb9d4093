// Acceptance suite: every criterion prints one [PASS]/[FAIL] line; the
// process exits nonzero if any criterion fails. Criterion 9 exercises the
// installed CLI binary (path via --cli, default "specsig" on PATH).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "specsig/pipeline.hpp"

using namespace specsig;
namespace fs = std::filesystem;

namespace {

struct Check {
  int failures = 0;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      notes.push_back(what);
    }
  }
  void close(bool ok, const std::string& what, double got, double want) {
    if (!ok) {
      ++failures;
      std::ostringstream ss;
      ss << what << " (got " << got << ", want " << want << ")";
      notes.push_back(ss.str());
    }
  }
  void rel(double got, double want, double tol, const std::string& what) {
    close(std::abs(got - want) <= tol * std::abs(want), what, got, want);
  }
  void abs(double got, double want, double tol, const std::string& what) {
    close(std::abs(got - want) <= tol, what, got, want);
  }
};

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "specsig_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> csv_cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

// ---------------------------------------------------------------------------

// Table-1 exponential rows (books 2, 4, 5) from the published parameters.
void criterion1(Check& c) {
  struct Row {
    double loc, scale, median, mean, variance, entropy;
  };
  const Row rows[] = {
      {0.0007007909083517199, 114.52846083233646, 79.3857805107125, 114.52916162, 13116.76834062,
       5.74082336},
      {0.00024278816105826503, 111.43319977150223, 77.23985103055097, 111.43344256,
       12417.35801132, 5.71342531},
      {0.00036681097553665327, 78.55973558262349, 54.453826035605815, 78.56010239, 6171.63205481,
       5.3638593},
  };
  for (const Row& r : rows) {
    const DistSpec spec{DistFamily::exponential, 0, 0, r.loc, r.scale};
    const Moments m = theoretical_moments(spec);
    c.rel(m.median, r.median, 1e-6, "median");
    c.rel(m.mean, r.mean, 1e-6, "mean");
    c.rel(m.variance, r.variance, 1e-6, "variance");
    c.rel(m.entropy, r.entropy, 1e-6, "entropy");
    c.require(m.skewness == 2.0, "skew exactly 2");
    c.require(m.excess_kurtosis == 6.0, "kurtosis exactly 6");
  }
}

// Table-1 exponentiated-Weibull row (book 3) via quadrature, with the series
// oracle confirming the targets first. Book 1's three-number row is
// exploratory: both readings are reported, nothing asserted.
void criterion2(Check& c) {
  const double a = 2.388182477333179, cc = 0.40846064327782183;
  const double loc = 0.0006176602639155107, scale = 8.883106480102926;

  // independent series-oracle confirmation of the published panel
  const double m1 = oracles::ew_raw_moment_series(a, cc, 1);
  const double m2 = oracles::ew_raw_moment_series(a, cc, 2);
  const double oracle_mean = loc + scale * m1;
  const double oracle_var = scale * scale * (m2 - m1 * m1);
  const double oracle_entropy = oracles::ew_entropy_series(a, cc) + std::log(scale);
  c.rel(oracle_mean, 58.59146593, 1e-3, "oracle mean vs published");
  c.rel(oracle_var, 15103.08763592, 1e-3, "oracle variance vs published");
  c.rel(oracle_entropy, 4.79475561, 1e-3, "oracle entropy vs published");

  const DistSpec spec{DistFamily::exp_weibull, a, cc, loc, scale};
  const Moments m = theoretical_moments(spec);
  c.rel(m.mean, oracle_mean, 1e-7, "quadrature mean vs oracle");
  c.rel(m.variance, oracle_var, 1e-6, "quadrature variance vs oracle");
  c.rel(m.median, 19.498382903069388, 1e-6, "median");
  c.rel(m.mean, 58.59146593, 1e-3, "mean");
  c.rel(m.variance, 15103.08763592, 1e-3, "variance");
  c.rel(m.entropy, 4.79475561, 1e-3, "entropy");
  c.rel(m.skewness, 7.59892293, 1e-3, "skew");
  c.rel(m.excess_kurtosis, 126.62372354, 1e-3, "kurtosis");

  // Book 1 exploratory: published panel is
  // median 11.92264231798744, mean 15.91309592, var 165.14702629
  const double b1a = 1.8078554913188745, b1c = 0.40464609484912933, third = 10.52751466016218;
  for (auto reading : {ThreeParamReading::loc_zero, ThreeParamReading::scale_one}) {
    const auto s = expweibull_from_three(b1a, b1c, third, reading);
    const Moments bm = theoretical_moments(s);
    std::ostringstream ss;
    ss << "  [info] book1 reading=" << (reading == ThreeParamReading::loc_zero ? "loc=0" : "scale=1")
       << ": median=" << bm.median << " mean=" << bm.mean << " variance=" << bm.variance
       << " (published: 11.92264 / 15.91310 / 165.14703)";
    std::puts(ss.str().c_str());
  }
}

// DFT oracle equivalence and Parseval over 100 random signals.
void criterion3(Check& c) {
  Splitmix64 rng(1001);
  double worst_gap = 0.0, worst_parseval = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.next() % 2048;
    std::vector<double> x(n);
    for (auto& v : x) v = 2.0 * rng.next_unit() - 1.0;

    const auto ref = naive_dft(x);
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
    const auto got = fft(std::move(buf));

    double gap = 0.0, time_e = 0.0, freq_e = 0.0;
    for (std::size_t k = 0; k < n; ++k) gap = std::max(gap, std::abs(got[k] - ref[k]));
    for (double v : x) time_e += v * v;
    for (const auto& v : got) freq_e += std::norm(v);
    freq_e /= static_cast<double>(n);
    worst_gap = std::max(worst_gap, gap);
    if (time_e > 0.0)
      worst_parseval = std::max(worst_parseval, std::abs(time_e - freq_e) / time_e);
  }
  c.abs(worst_gap, 0.0, 1e-9, "max |fft - naive| over 100 signals");
  c.abs(worst_parseval, 0.0, 1e-9, "worst Parseval relative error");
}

// KS machinery: brute-force statistic, long-series p-value, monotonicity.
void criterion4(Check& c) {
  Splitmix64 rng(4004);
  const DistSpec spec{DistFamily::log_normal, 0.7, 0, 0.0, 50.0};
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<double> xs(200), ws(200);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = quantile(spec, rng.next_unit()) * (0.8 + 0.4 * rng.next_unit());
      ws[i] = 0.1 + rng.next_unit();
    }
    const WeightedEmpirical emp(xs, ws);
    const double got = ks_statistic(emp, spec);
    const double want = oracles::brute_force_ks(emp.values(), emp.weights(),
                                                [&](double x) { return cdf(spec, x); });
    c.abs(got, want, 1e-14, "ks_statistic vs brute force");
  }

  for (double lambda : {0.5, 1.0, 1.5}) {
    const double n_eff = 10000.0;
    const double d = lambda / (std::sqrt(n_eff) + 0.12 + 0.11 / std::sqrt(n_eff));
    c.abs(ks_pvalue(d, n_eff), oracles::ks_q_long(lambda), 1e-12, "p-value vs 10k-term series");
  }

  double prev = 2.0;
  for (int i = 0; i <= 100; ++i) {
    const double d = 0.4 * static_cast<double>(i) / 100.0;
    const double p = ks_pvalue(d, 800.0);
    // tolerance covers the series' own 1e-12 relative truncation
    c.require(p <= prev + 5e-12, "p non-increasing in d");
    prev = p;
  }
}

// MLE recovery: exponential scale at 2%, exponentiated Weibull at 10%
// over 10 seeds with at least 9 passing.
void criterion5(Check& c) {
  {
    Splitmix64 rng(55);
    std::vector<double> xs(100000);
    const DistSpec truth{DistFamily::exponential, 0, 0, 0.0, 100.0};
    for (auto& x : xs) x = quantile(truth, rng.next_unit());
    const auto fit = fit_mle(WeightedEmpirical::from_samples(xs), DistFamily::exponential);
    c.require(fit.clean(), "exponential fit clean");
    c.rel(fit.spec.scale, 100.0, 0.02, "exponential scale within 2%");
  }
  {
    const DistSpec truth{DistFamily::exp_weibull, 2.388182477333179, 0.40846064327782183, 0.0,
                         8.883106480102926};
    int ok = 0;
    for (int seed = 1; seed <= 10; ++seed) {
      Splitmix64 rng(seed * 7000);
      std::vector<double> xs(100000);
      for (auto& x : xs) x = quantile(truth, rng.next_unit());
      const auto fit = fit_mle(WeightedEmpirical::from_samples(xs), DistFamily::exp_weibull);
      const bool good = fit.clean() &&
                        std::abs(fit.spec.shape1 - truth.shape1) / truth.shape1 < 0.10 &&
                        std::abs(fit.spec.shape2 - truth.shape2) / truth.shape2 < 0.10 &&
                        std::abs(fit.spec.scale - truth.scale) / truth.scale < 0.10;
      if (good) ++ok;
    }
    c.close(ok >= 9, "expweibull recovery seeds", ok, 9);
  }
}

// The three selection-procedure examples.
void criterion6(Check& c) {
  const WeightedEmpirical emp({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  auto mk = [](DistFamily fam, double d, double p, double scale) {
    FitResult r;
    r.spec.family = fam;
    r.spec.scale = scale;
    if (fam == DistFamily::pareto) r.spec.shape1 = 1.0;
    if (fam == DistFamily::exp_weibull) {
      r.spec.shape1 = 1.0;
      r.spec.shape2 = 1.0;
    }
    r.ks_d = d;
    r.ks_p = p;
    r.converged = true;
    return r;
  };

  {  // book-2 pair: strictly smaller d wins
    const auto rf = rank_and_select(
        {mk(DistFamily::exponential, 8.531262287569952e-05, 0.785822040345603, 1.0),
         mk(DistFamily::pareto, 8.531262287581054e-05, 0.7858220403442739, 1.0)},
        emp);
    c.require(rf.chosen().spec.family == DistFamily::exponential, "book2 pair selects exponential");
    c.require(rf.reason == SelectionReason::best_fit, "book2 reason BestFit");
  }
  {  // book-1 pair: flagged leader, identical (d, p)
    auto pareto = mk(DistFamily::pareto, 8.810404621462098e-05, 0.7663125997309213, 1.0);
    pareto.converged = false;
    pareto.error = FitErrorTag::non_convergence;
    const auto ew = mk(DistFamily::exp_weibull, 8.810404621462098e-05, 0.7663125997309213, 1.0);
    const auto rf = rank_and_select({pareto, ew}, emp);
    c.require(rf.chosen().spec.family == DistFamily::exp_weibull, "book1 pair selects expweibull");
    c.require(rf.reason == SelectionReason::second_best_after_error,
              "book1 reason SecondBestAfterError");
  }
  {  // tie to 12 digits, both clean: integrated CDF deviation decides
    Splitmix64 rng(600);
    std::vector<double> xs(50);
    const DistSpec good{DistFamily::exponential, 0, 0, 0.0, 2.0};
    for (auto& x : xs) x = quantile(good, rng.next_unit());
    const WeightedEmpirical data = WeightedEmpirical::from_samples(xs);
    const auto rf = rank_and_select({mk(DistFamily::exponential, 0.05, 0.5, 40.0),
                                     mk(DistFamily::exponential, 0.05, 0.5, 2.0)},
                                    data);
    c.require(rf.reason == SelectionReason::cdf_tie_break, "tie reason CdfTieBreak");
    c.require(rf.chosen().spec.scale == 2.0, "tie-break selects the closer CDF");
  }
}

// End-to-end synthetic book: 3 tracks, 30 s at 44100 Hz, exponential target.
// Tracks are taken in memory: the 16-bit WAV transport has its own byte-exact
// coverage, and its flat quantization floor (~6e-4 of spectral mass at
// ~11 kHz) would otherwise confound the statistics this criterion validates.
void criterion7(Check& c, int workers) {
  const auto dir = scratch_dir() / "criterion7";
  fs::create_directories(dir);

  RunConfig cfg;
  cfg.output_dir = dir / "out";
  cfg.workers = workers;

  Splitmix64 seeder(20240501);
  std::vector<Spectrum> spectra(3);
  std::vector<std::uint64_t> seeds = {seeder.next(), seeder.next(), seeder.next()};
  std::vector<TrackProvenance> tracks(3);
  parallel_for(3, workers, [&](std::size_t t) {
    SynthSpec ss;
    ss.target = DistSpec{DistFamily::exponential, 0, 0, 0.0, 100.0};
    ss.n_partials = 5000;
    ss.duration_s = 30.0;
    ss.sample_rate = 44100;
    ss.seed = seeds[t];
    ss.track_id = "track" + std::to_string(t + 1);
    ss.book_id = "book_e2e";
    const TrackAudio track = generate_track(ss);
    spectra[t] = dft_real(track);
    tracks[t] = TrackProvenance{ss.track_id, "(in-memory)", to_hex(ss.seed),
                                track.samples.size(), track.sample_rate};
  });

  std::vector<AnalyzedBook> analyzed;
  analyzed.push_back(
      AnalyzedBook{"book_e2e", std::move(tracks), from_spectra(spectra)});
  const auto reports = fit_books(cfg, analyzed);
  emit_reports(cfg, reports);
  c.require(reports.size() == 1, "one book analyzed");
  const auto& rep = reports.front();

  c.require(rep.selected().spec.family == DistFamily::exponential, "selected family exponential");
  c.rel(rep.selected().spec.scale, 100.0, 0.05, "fitted scale within 5%");

  // moment-table row recomputable from the selected spec within 1e-9
  {
    std::ifstream in(cfg.output_dir / "moment_table.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    const auto cells = csv_cells(row);
    c.require(cells.size() == 7, "moment row has 7 columns");
    const Moments m = rep.selected_moments();
    const double vals[] = {m.median, m.mean, m.variance, m.entropy, m.skewness, m.excess_kurtosis};
    for (int i = 0; i < 6; ++i) {
      const double got = std::strtod(cells[static_cast<std::size_t>(i) + 1].c_str(), nullptr);
      c.rel(got, vals[i], 1e-9, "moment column self-consistency");
    }
  }

  double mass = rep.hist.below_c0 + rep.hist.above_b8;
  for (double v : rep.hist.rel_freq) mass += v;
  c.abs(mass, 1.0, 1e-12, "histogram mass sums to 1");

  const auto svg = slurp(cfg.output_dir / (rep.book_id + "_histogram.svg"));
  c.close(count_substr(svg, "class=\"octave-line\"") == 9, "SVG octave lines",
          static_cast<double>(count_substr(svg, "class=\"octave-line\"")), 9.0);
}

// Pitch mapping against the equal-temperament oracle.
void criterion8(Check& c) {
  c.require(hz_to_pitch(440.0).bin.label() == "A4", "440 -> A4");
  c.require(hz_to_pitch(261.6256).bin.label() == "C4", "261.6256 -> C4");
  const auto lines = octave_lines();
  c.abs(lines.front(), 16.3516, 1e-4, "C0 center");
  c.abs(lines.back(), 4186.009, 1e-3, "C8 center");
  c.require(hz_to_pitch(440.0 * std::exp2(1.0 / 24.0)).bin.label() == "A#4",
            "half-open boundary -> A#4");

  Splitmix64 rng(808);
  int checked = 0;
  while (checked < 1000) {
    const double f = 17.0 * std::pow(2.0, 7.0 * rng.next_unit());
    const auto lo = hz_to_pitch(f);
    const auto hi = hz_to_pitch(2.0 * f);
    if (lo.range != PitchRange::in_range || hi.range != PitchRange::in_range) continue;
    if (hi.bin.semitone() != lo.bin.semitone() || hi.bin.octave() != lo.bin.octave() + 1) {
      c.require(false, "octave-shift property");
      return;
    }
    ++checked;
  }
}

// Determinism: the CLI run twice must emit byte-identical CSVs, and weighted
// statistics must equal their replicated-sample counterparts exactly.
void criterion9(Check& c, const std::string& cli) {
  const auto dir = scratch_dir() / "criterion9";
  fs::create_directories(dir);

  SynthBookRequest req;
  req.book_id = "det";
  req.n_tracks = 2;
  req.target = DistSpec{DistFamily::exponential, 0, 0, 0.0, 100.0};
  req.n_partials = 2000;
  req.duration_s = 3.0;
  req.sample_rate = 22050;
  req.seed = 99;
  std::map<std::string, std::vector<std::string>> books;
  books[req.book_id] = generate_book(req, dir / "tracks");
  write_books_manifest(books, dir / "books.json");

  auto run_cli = [&](const std::string& out) {
    const std::string cmd = cli + " run --manifest " + (dir / "books.json").string() + " --out " +
                            (dir / out).string() + " --workers 2 > " +
                            (dir / (out + ".log")).string() + " 2>&1";
    return std::system(cmd.c_str());
  };
  const int rc1 = run_cli("out1");
  const int rc2 = run_cli("out2");
  c.close(rc1 == 0 && rc2 == 0, "cli run exit status", rc1 * 100 + rc2, 0);
  if (rc1 == 0 && rc2 == 0) {
    for (const char* name : {"moment_table.csv", "fit_table.csv", "det_histogram.csv"}) {
      c.require(slurp(dir / "out1" / name) == slurp(dir / "out2" / name),
                std::string("byte-identical ") + name);
    }
    // the through-file run also re-identifies the generating family
    const auto fit_table = slurp(dir / "out1" / "fit_table.csv");
    bool selected_exponential = false;
    std::stringstream ss(fit_table);
    std::string line;
    while (std::getline(ss, line))
      if (line.find(",true,") != std::string::npos &&
          line.find(",exponential,") != std::string::npos)
        selected_exponential = true;
    c.require(selected_exponential, "CLI run selects the exponential signature");
  }

  // Replication equivalence, exact: values and weights chosen so every
  // intermediate is a dyadic rational below 2^53 (x integer in [0,63],
  // total weight a power of two), making both computations exact.
  Splitmix64 rng(909);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> xs;
    std::vector<int> counts;
    const int m = 2 + static_cast<int>(rng.next() % 6);
    int total = 0;
    for (int i = 0; i < m; ++i) {
      double x;
      do {
        x = static_cast<double>(rng.next() % 64);
      } while (std::find(xs.begin(), xs.end(), x) != xs.end());
      xs.push_back(x);
      const int w = 1 + static_cast<int>(rng.next() % 5);
      counts.push_back(w);
      total += w;
    }
    int pow2 = 32;  // pad the total weight to a power of two: exact division
    while (pow2 < total) pow2 <<= 1;
    counts.back() += pow2 - total;

    std::vector<double> ws(counts.begin(), counts.end());
    const WeightedEmpirical emp(xs, ws);
    const auto flat = oracles::replicate(xs, counts);
    const auto flat_emp = WeightedEmpirical::from_samples(flat);

    const auto a = emp.weighted_moments();
    const auto b = flat_emp.weighted_moments();
    c.require(a.mean == b.mean, "replication mean exact");
    c.require(a.variance == b.variance, "replication variance exact");
    c.require(a.skewness == b.skewness || (std::isnan(a.skewness) && std::isnan(b.skewness)),
              "replication skewness exact");
    c.require(a.excess_kurtosis == b.excess_kurtosis ||
                  (std::isnan(a.excess_kurtosis) && std::isnan(b.excess_kurtosis)),
              "replication kurtosis exact");
    for (double q : {0.0, 0.1, 0.5, 0.9, 1.0})
      c.require(emp.weighted_quantile(q) == flat_emp.weighted_quantile(q),
                "replication quantile exact");
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = "specsig";
  int workers = 4;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc) cli = argv[i + 1];
    if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) workers = std::atoi(argv[i + 1]);
  }

  struct Criterion {
    int id;
    const char* title;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "published exponential book rows reproduced from their parameters", criterion1},
      {2, "published exponentiated-Weibull row via quadrature (+series oracle)", criterion2},
      {3, "DFT matches the naive oracle; Parseval holds", criterion3},
      {4, "KS statistic, p-value series, monotonicity", criterion4},
      {5, "MLE recovery at n = 1e5", criterion5},
      {6, "selection procedure examples", criterion6},
      {7, "end-to-end synthetic book",
       [&](Check& c) { criterion7(c, workers); }},
      {8, "scientific pitch mapping", criterion8},
      {9, "determinism and replication equivalence",
       [&](Check& c) { criterion9(c, cli); }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    if (c.failures == 0) {
      std::printf("[PASS] criterion %d: %s\n", cr.id, cr.title);
    } else {
      ++failed;
      std::printf("[FAIL] criterion %d: %s\n", cr.id, cr.title);
      for (const auto& note : c.notes) std::printf("       - %s\n", note.c_str());
    }
    std::fflush(stdout);
  }
  if (failed) std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
