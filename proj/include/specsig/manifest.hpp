#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "specsig/distributions.hpp"
#include "specsig/error.hpp"

namespace specsig {

// A synthetic-book request as it appears in the manifest's "synth" section.
struct SynthBookRequest {
  std::string book_id;
  int n_tracks = 1;
  DistSpec target;
  int n_partials = 5000;
  double duration_s = 30.0;
  int sample_rate = 44100;
  std::uint64_t seed = 0;
};

struct BookManifest {
  // book id -> ordered track paths, resolved against the manifest directory
  std::map<std::string, std::vector<std::string>> books;
  std::vector<SynthBookRequest> synth_books;
  std::filesystem::path base_dir;
};

namespace manifest_detail {

inline DistSpec parse_dist(const nlohmann::json& j) {
  if (!j.contains("family")) throw Error(Errc::parse_error, "distribution without family");
  const auto fam = parse_family(j.at("family").get<std::string>());
  if (!fam)
    throw Error(Errc::parse_error, "unknown family '" + j.at("family").get<std::string>() + "'");
  DistSpec s;
  s.family = *fam;
  s.shape1 = j.value("shape1", 0.0);
  s.shape2 = j.value("shape2", 0.0);
  s.loc = j.value("loc", 0.0);
  s.scale = j.value("scale", 1.0);
  if (!s.valid()) throw Error(Errc::parse_error, "invalid distribution parameters in manifest");
  return s;
}

}  // namespace manifest_detail

// Manifest schema (JSON):
//   { "books": { "<book_id>": ["track.wav", ...], ... },
//     "synth": { "books": [ { "book_id": ..., "tracks": N, "family": ...,
//                             "shape1": ..., "shape2": ..., "loc": ..., "scale": ...,
//                             "partials": N, "duration_s": S, "sample_rate": FS,
//                             "seed": N }, ... ] } }
inline BookManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());

  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::parse_error, path.string() + ": top level must be an object");

  BookManifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  try {
    if (j.contains("books")) {
      const auto& books = j.at("books");
      if (!books.is_object()) throw Error(Errc::parse_error, "'books' must be an object");
      for (const auto& [book_id, tracks] : books.items()) {
        if (!tracks.is_array()) throw Error(Errc::parse_error, "book '" + book_id + "' must list an array");
        if (tracks.empty()) throw Error(Errc::empty_book, "book '" + book_id + "' has no tracks");
        std::vector<std::string> resolved;
        std::set<std::string> seen;
        for (const auto& t : tracks) {
          const auto raw = t.get<std::string>();
          if (!seen.insert(raw).second)
            throw Error(Errc::duplicate_track, "book '" + book_id + "' repeats '" + raw + "'");
          std::filesystem::path p(raw);
          if (p.is_relative()) p = m.base_dir / p;
          resolved.push_back(p.string());
        }
        m.books.emplace(book_id, std::move(resolved));
      }
    }

    if (j.contains("synth")) {
      const auto& synth = j.at("synth");
      for (const auto& sb : synth.value("books", nlohmann::json::array())) {
        SynthBookRequest r;
        r.book_id = sb.at("book_id").get<std::string>();
        r.n_tracks = sb.value("tracks", 1);
        r.target = manifest_detail::parse_dist(sb);
        r.n_partials = sb.value("partials", 5000);
        r.duration_s = sb.value("duration_s", 30.0);
        r.sample_rate = sb.value("sample_rate", 44100);
        r.seed = sb.value("seed", std::uint64_t{0});
        if (r.n_tracks < 1) throw Error(Errc::parse_error, "synth book needs tracks >= 1");
        m.synth_books.push_back(std::move(r));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }

  return m;
}

}  // namespace specsig
