#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "specsig/error.hpp"
#include "specsig/spectral.hpp"
#include "specsig/util.hpp"

namespace specsig {

enum class Weighting { magnitude, power };
enum class Pooling { normalized, raw };

inline const char* to_string(Weighting w) {
  return w == Weighting::magnitude ? "magnitude" : "power";
}
inline const char* to_string(Pooling p) { return p == Pooling::normalized ? "normalized" : "raw"; }

// A magnitude-weighted sample of frequency values: values strictly ascending,
// weights aligned, plus the cumulative sums that back ECDF and quantile
// queries. Zero-weight entries are dropped at construction; they carry no
// probability mass and would otherwise obscure min{x : w > 0}.
class WeightedEmpirical {
 public:
  WeightedEmpirical(std::vector<double> values, std::vector<double> weights) {
    if (values.size() != weights.size())
      throw Error(Errc::length_mismatch, "values/weights size mismatch");
    if (values.empty()) throw Error(Errc::empty_input, "empty weighted sample");
    build(std::move(values), std::move(weights));
  }

  static WeightedEmpirical from_samples(std::span<const double> xs) {
    return WeightedEmpirical(std::vector<double>(xs.begin(), xs.end()),
                             std::vector<double>(xs.size(), 1.0));
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_weight() const { return total_; }
  double min_value() const { return values_.front(); }
  double max_value() const { return values_.back(); }
  std::size_t size() const { return values_.size(); }

  // F(x) = sum of weights at values <= x, over total. Right-continuous.
  double ecdf_at(double x) const {
    auto it = std::upper_bound(values_.begin(), values_.end(), x);
    if (it == values_.begin()) return 0.0;
    return cumw_[static_cast<std::size_t>(it - values_.begin()) - 1] / total_;
  }

  // F just left of the i-th sample point (by index), as a probability.
  double ecdf_before(std::size_t i) const { return i == 0 ? 0.0 : cumw_[i - 1] / total_; }
  double ecdf_at_index(std::size_t i) const { return cumw_[i] / total_; }

  // Smallest value v with ECDF(v) >= q (lower weighted quantile).
  double weighted_quantile(double q) const {
    q = std::clamp(q, 0.0, 1.0);
    const double target = q * total_;
    auto it = std::lower_bound(cumw_.begin(), cumw_.end(), target);
    if (it == cumw_.end()) return values_.back();
    return values_[static_cast<std::size_t>(it - cumw_.begin())];
  }

  struct MomentsResult {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    bool degenerate = false;  // single distinct value: skew/kurtosis undefined
  };

  // Weighted central moments with weights treated as probabilities (no bias
  // correction).
  MomentsResult weighted_moments() const {
    MomentsResult r;
    double sx = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) sx += weights_[i] * values_[i];
    r.mean = sx / total_;
    if (values_.size() == 1) {
      r.degenerate = true;
      r.variance = 0.0;
      r.skewness = std::numeric_limits<double>::quiet_NaN();
      r.excess_kurtosis = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double d = values_[i] - r.mean;
      const double d2 = d * d;
      m2 += weights_[i] * d2;
      m3 += weights_[i] * d2 * d;
      m4 += weights_[i] * d2 * d2;
    }
    m2 /= total_;
    m3 /= total_;
    m4 /= total_;
    r.variance = m2;
    r.skewness = m3 / (m2 * std::sqrt(m2));
    r.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return r;
  }

  // Copy with weights scaled so the total mass is 1.
  WeightedEmpirical renormalized() const {
    WeightedEmpirical r = *this;
    const double inv = 1.0 / total_;
    double acc = 0.0;
    for (std::size_t i = 0; i < r.weights_.size(); ++i) {
      r.weights_[i] *= inv;
      acc += r.weights_[i];
      r.cumw_[i] = acc;
    }
    r.total_ = acc;
    return r;
  }

  void dump_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    out << "freq_hz,weight\n";
    for (std::size_t i = 0; i < values_.size(); ++i)
      out << fmt_double(values_[i]) << ',' << fmt_double(weights_[i]) << '\n';
  }

 private:
  void build(std::vector<double> values, std::vector<double> weights) {
    for (double w : weights)
      if (!(w >= 0.0)) throw Error(Errc::invalid_spec, "negative or NaN weight");

    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Lexicographic (value, weight) order makes the merge independent of the
    // order tracks arrived in, which keeps summation deterministic.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[a] != values[b]) return values[a] < values[b];
      return weights[a] < weights[b];
    });

    values_.reserve(values.size());
    weights_.reserve(values.size());
    for (std::size_t idx : order) {
      const double v = values[idx];
      const double w = weights[idx];
      if (w == 0.0) continue;
      if (!values_.empty() && values_.back() == v) {
        weights_.back() += w;
      } else {
        values_.push_back(v);
        weights_.push_back(w);
      }
    }
    if (values_.empty()) throw Error(Errc::all_zero_magnitudes, "all weights are zero");

    cumw_.resize(weights_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      acc += weights_[i];
      cumw_[i] = acc;
    }
    total_ = acc;
  }

  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> cumw_;
  double total_ = 0.0;
};

// Pools per-track spectra into one weighted empirical distribution over Hz.
// The DC bin is dropped; under Pooling::normalized each track's magnitudes
// are first normalized to unit mass so every track contributes equally.
inline WeightedEmpirical from_spectra(std::span<const Spectrum> spectra,
                                      Weighting weighting = Weighting::magnitude,
                                      Pooling pooling = Pooling::normalized) {
  if (spectra.empty()) throw Error(Errc::empty_input, "from_spectra: no spectra");

  std::vector<double> values;
  std::vector<double> weights;
  for (const Spectrum& s : spectra) {
    if (s.mags.size() < 2)
      throw Error(Errc::empty_input, "from_spectra: spectrum with fewer than 2 bins");
    double track_sum = 0.0;
    for (std::size_t k = 1; k < s.mags.size(); ++k) {
      const double m = s.mags[k];
      track_sum += weighting == Weighting::magnitude ? m : m * m;
    }
    if (track_sum <= 0.0)
      throw Error(Errc::all_zero_magnitudes, "track with all-zero non-DC magnitudes");
    const double norm = pooling == Pooling::normalized ? 1.0 / track_sum : 1.0;
    for (std::size_t k = 1; k < s.mags.size(); ++k) {
      const double m = s.mags[k];
      const double w = (weighting == Weighting::magnitude ? m : m * m) * norm;
      if (w == 0.0) continue;
      values.push_back(s.freqs[k]);
      weights.push_back(w);
    }
  }

  WeightedEmpirical emp(std::move(values), std::move(weights));
  // Renormalize total mass to 1 exactly once the merge has settled.
  return emp.renormalized();
}

}  // namespace specsig
