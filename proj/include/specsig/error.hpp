#pragma once

#include <stdexcept>
#include <string>

namespace specsig {

enum class Errc {
  missing_file,
  not_riff_wave,
  unsupported_format,
  truncated_data,
  length_mismatch,
  parse_error,
  empty_book,
  duplicate_track,
  empty_signal,
  empty_input,
  all_zero_magnitudes,
  degenerate_distribution,
  invalid_spec,
  q_out_of_range,
  non_convergent_quadrature,
  degenerate_input,
  no_usable_fit,
  non_positive_frequency,
  nyquist_violation,
  io_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::missing_file: return "MissingFile";
    case Errc::not_riff_wave: return "NotRiffWave";
    case Errc::unsupported_format: return "UnsupportedFormat";
    case Errc::truncated_data: return "TruncatedData";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::parse_error: return "ParseError";
    case Errc::empty_book: return "EmptyBook";
    case Errc::duplicate_track: return "DuplicateTrack";
    case Errc::empty_signal: return "EmptySignal";
    case Errc::empty_input: return "EmptyInput";
    case Errc::all_zero_magnitudes: return "AllZeroMagnitudes";
    case Errc::degenerate_distribution: return "DegenerateDistribution";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::q_out_of_range: return "QOutOfRange";
    case Errc::non_convergent_quadrature: return "NonConvergentQuadrature";
    case Errc::degenerate_input: return "DegenerateInput";
    case Errc::no_usable_fit: return "NoUsableFit";
    case Errc::non_positive_frequency: return "NonPositiveFrequency";
    case Errc::nyquist_violation: return "NyquistViolation";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace specsig
