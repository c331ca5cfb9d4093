#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "specsig/error.hpp"
#include "specsig/quadrature.hpp"

namespace specsig {

enum class DistFamily { normal, log_normal, exponential, pareto, gilbrat, power_law, exp_weibull };

inline constexpr std::array<DistFamily, 7> kAllFamilies = {
    DistFamily::normal,   DistFamily::log_normal, DistFamily::exponential, DistFamily::pareto,
    DistFamily::gilbrat,  DistFamily::power_law,  DistFamily::exp_weibull};

inline const char* to_string(DistFamily f) {
  switch (f) {
    case DistFamily::normal: return "normal";
    case DistFamily::log_normal: return "lognormal";
    case DistFamily::exponential: return "exponential";
    case DistFamily::pareto: return "pareto";
    case DistFamily::gilbrat: return "gilbrat";
    case DistFamily::power_law: return "powerlaw";
    case DistFamily::exp_weibull: return "expweibull";
  }
  return "?";
}

inline std::optional<DistFamily> parse_family(std::string name) {
  for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  std::string flat;
  for (char ch : name)
    if (ch != '-' && ch != '_' && ch != ' ') flat.push_back(ch);
  if (flat == "normal") return DistFamily::normal;
  if (flat == "lognormal") return DistFamily::log_normal;
  if (flat == "exponential" || flat == "expon") return DistFamily::exponential;
  if (flat == "pareto") return DistFamily::pareto;
  if (flat == "gilbrat" || flat == "gibrat") return DistFamily::gilbrat;
  if (flat == "powerlaw") return DistFamily::power_law;
  if (flat == "expweibull" || flat == "exponentiatedweibull" || flat == "exponweib")
    return DistFamily::exp_weibull;
  return std::nullopt;
}

// A distribution family plus its parameters. Standard forms are evaluated at
// z = (x - loc) / scale and densities divided by scale; shape slots:
//   lognormal: shape1 = sigma      pareto: shape1 = b
//   powerlaw:  shape1 = a          expweibull: shape1 = alpha, shape2 = c
struct DistSpec {
  DistFamily family = DistFamily::exponential;
  double shape1 = 0.0;
  double shape2 = 0.0;
  double loc = 0.0;
  double scale = 1.0;

  bool valid() const {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(loc)) return false;
    switch (family) {
      case DistFamily::normal:
      case DistFamily::exponential:
      case DistFamily::gilbrat: return true;
      case DistFamily::log_normal: return shape1 > 0.0 && std::isfinite(shape1);
      case DistFamily::pareto: return shape1 > 0.0 && std::isfinite(shape1);
      case DistFamily::power_law: return shape1 > 0.0 && std::isfinite(shape1);
      case DistFamily::exp_weibull:
        return shape1 > 0.0 && shape2 > 0.0 && std::isfinite(shape1) && std::isfinite(shape2);
    }
    return false;
  }

  void check() const {
    if (!valid()) throw Error(Errc::invalid_spec, std::string("bad ") + to_string(family) + " spec");
  }
};

struct Moments {
  double median = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double entropy = 0.0;  // differential entropy, nats
};

namespace dist_detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSqrt2Pi = 2.5066282746310005024;
inline constexpr double kLn2 = std::numbers::ln2;

inline double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }
inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double horner8(const double (&c)[8], double r) {
  double v = c[0];
  for (int i = 1; i < 8; ++i) v = v * r + c[i];
  return v;
}

// Wichura's AS 241 (PPND16): inverse of the standard normal CDF.
// Coefficient arrays run highest power first.
inline double std_normal_quantile(double p) {
  static constexpr double kA[8] = {2.5090809287301226727e+3, 3.3430575583588128105e+4,
                                   6.7265770927008700853e+4, 4.5921953931549871457e+4,
                                   1.3731693765509461125e+4, 1.9715909503065514427e+3,
                                   1.3314166789178437745e+2, 3.3871328727963666080e0};
  static constexpr double kB[8] = {5.2264952788528545610e+3, 2.8729085735721942674e+4,
                                   3.9307895800092710610e+4, 2.1213794301586595867e+4,
                                   5.3941960214247511077e+3, 6.8718700749205790830e+2,
                                   4.2313330701600911252e+1, 1.0};
  static constexpr double kC[8] = {7.74545014278341407640e-4, 2.27238449892691845833e-2,
                                   2.41780725177450611770e-1, 1.27045825245236838258e0,
                                   3.64784832476320460504e0,  5.76949722146069140550e0,
                                   4.63033784615654529590e0,  1.42343711074968357734e0};
  static constexpr double kD[8] = {1.05075007164441684324e-9, 5.47593808499534494600e-4,
                                   1.51986665636164571966e-2, 1.48103976427480074590e-1,
                                   6.89767334985100004550e-1, 1.67638483018380384940e0,
                                   2.05319162663775882187e0,  1.0};
  static constexpr double kE[8] = {2.01033439929228813265e-7, 2.71155556874348757815e-5,
                                   1.24266094738807843860e-3, 2.65321895265761230930e-2,
                                   2.96560571828504891230e-1, 1.78482653991729133580e0,
                                   5.46378491116411436990e0,  6.65790464350110377720e0};
  static constexpr double kF[8] = {2.04426310338993978564e-15, 1.42151175831644588870e-7,
                                   1.84631831751005468180e-5,  7.86869131145613259100e-4,
                                   1.48753612908506148525e-2,  5.99832206555887937690e-1,
                                   1.0,                        0.0};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner8(kA, r) / horner8(kB, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  if (r <= 0.0) return q < 0.0 ? -kInf : kInf;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = horner8(kC, r) / horner8(kD, r);
  } else {
    r -= 5.0;
    // kF is degree 6 with an implied trailing zero; divide the shifted form.
    double den = kF[0];
    for (int i = 1; i < 7; ++i) den = den * r + kF[i];
    v = horner8(kE, r) / den;
  }
  return q < 0.0 ? -v : v;
}

// sigma for the lognormal-shaped families (gilbrat is lognormal at sigma = 1).
inline double lognormal_sigma(const DistSpec& s) {
  return s.family == DistFamily::gilbrat ? 1.0 : s.shape1;
}

}  // namespace dist_detail

// log of the density. -inf outside the support.
inline double log_pdf(const DistSpec& s, double x) {
  using namespace dist_detail;
  s.check();
  const double z = (x - s.loc) / s.scale;
  const double ls = std::log(s.scale);
  switch (s.family) {
    case DistFamily::normal:
      return -0.5 * z * z - std::log(kSqrt2Pi) - ls;
    case DistFamily::log_normal:
    case DistFamily::gilbrat: {
      if (z <= 0.0) return -kInf;
      const double sig = lognormal_sigma(s);
      const double lz = std::log(z);
      return -lz - std::log(sig * kSqrt2Pi) - 0.5 * (lz / sig) * (lz / sig) - ls;
    }
    case DistFamily::exponential:
      return z < 0.0 ? -kInf : -z - ls;
    case DistFamily::pareto: {
      if (z < 1.0) return -kInf;
      const double b = s.shape1;
      return std::log(b) - (b + 1.0) * std::log(z) - ls;
    }
    case DistFamily::power_law: {
      if (z < 0.0 || z > 1.0) return -kInf;
      const double a = s.shape1;
      // a < 1 has an integrable pole at z = 0; the log form keeps it finite
      // for every z > 0.
      if (z == 0.0) return a < 1.0 ? kInf : (a == 1.0 ? -ls : -kInf);
      return std::log(a) + (a - 1.0) * std::log(z) - ls;
    }
    case DistFamily::exp_weibull: {
      if (z < 0.0) return -kInf;
      const double a = s.shape1;
      const double c = s.shape2;
      if (z == 0.0) {
        const double lim = c * a;  // pdf ~ z^{ca-1} near 0
        return lim < 1.0 ? kInf : (lim == 1.0 ? std::log(a * c) - ls : -kInf);
      }
      const double lz = std::log(z);
      const double t = std::exp(c * lz);
      const double one_minus_emt = -std::expm1(-t);  // 1 - e^{-t}, accurate near 0
      return std::log(a * c) + (a - 1.0) * std::log(one_minus_emt) - t + (c - 1.0) * lz - ls;
    }
  }
  return -kInf;
}

inline double pdf(const DistSpec& s, double x) {
  const double lp = log_pdf(s, x);
  if (lp == -dist_detail::kInf) return 0.0;
  if (lp == dist_detail::kInf) return dist_detail::kInf;
  return std::exp(lp);
}

inline double cdf(const DistSpec& s, double x) {
  using namespace dist_detail;
  s.check();
  const double z = (x - s.loc) / s.scale;
  switch (s.family) {
    case DistFamily::normal:
      return std_normal_cdf(z);
    case DistFamily::log_normal:
    case DistFamily::gilbrat:
      return z <= 0.0 ? 0.0 : std_normal_cdf(std::log(z) / lognormal_sigma(s));
    case DistFamily::exponential:
      return z <= 0.0 ? 0.0 : -std::expm1(-z);
    case DistFamily::pareto:
      return z <= 1.0 ? 0.0 : -std::expm1(-s.shape1 * std::log(z));
    case DistFamily::power_law:
      if (z <= 0.0) return 0.0;
      if (z >= 1.0) return 1.0;
      return std::exp(s.shape1 * std::log(z));
    case DistFamily::exp_weibull: {
      if (z <= 0.0) return 0.0;
      const double t = std::exp(s.shape2 * std::log(z));
      const double lf = std::log1p(-std::exp(-t));  // log(1 - e^{-t})
      return std::exp(s.shape1 * lf);
    }
  }
  return 0.0;
}

// Inverse CDF; q must lie strictly inside (0, 1).
inline double quantile(const DistSpec& s, double q) {
  using namespace dist_detail;
  s.check();
  if (!(q > 0.0 && q < 1.0)) throw Error(Errc::q_out_of_range, "quantile q must be in (0,1)");
  double z = 0.0;
  switch (s.family) {
    case DistFamily::normal:
      z = std_normal_quantile(q);
      break;
    case DistFamily::log_normal:
    case DistFamily::gilbrat:
      z = std::exp(lognormal_sigma(s) * std_normal_quantile(q));
      break;
    case DistFamily::exponential:
      z = -std::log1p(-q);
      break;
    case DistFamily::pareto:
      z = std::exp(-std::log1p(-q) / s.shape1);
      break;
    case DistFamily::power_law:
      z = std::exp(std::log(q) / s.shape1);
      break;
    case DistFamily::exp_weibull: {
      // u = 1 - q^{1/alpha} computed via expm1 so q -> 1 stays accurate.
      const double u = -std::expm1(std::log(q) / s.shape1);
      const double t = -std::log(u);
      z = std::exp(std::log(t) / s.shape2);
      break;
    }
  }
  return s.loc + s.scale * z;
}

namespace dist_detail {

// Standard-form support endpoints (z-space).
inline std::pair<double, double> std_support(const DistSpec& s) {
  switch (s.family) {
    case DistFamily::normal: return {-kInf, kInf};
    case DistFamily::log_normal:
    case DistFamily::gilbrat: return {0.0, kInf};
    case DistFamily::exponential: return {0.0, kInf};
    case DistFamily::pareto: return {1.0, kInf};
    case DistFamily::power_law: return {0.0, 1.0};
    case DistFamily::exp_weibull: return {0.0, kInf};
  }
  return {-kInf, kInf};
}

inline DistSpec standardized(const DistSpec& s) {
  DistSpec st = s;
  st.loc = 0.0;
  st.scale = 1.0;
  return st;
}

// Adaptive quadrature of g(z) over the standard support, split at the
// standard median so endpoint singularities sit at interval edges.
template <class G>
double integrate_std(const DistSpec& std_spec, const G& g, double abs_tol) {
  const auto [lo, hi] = std_support(std_spec);
  const double med = quantile(std_spec, 0.5);
  QuadResult left, right;
  if (std::isinf(lo))
    left = integrate_lower_tail(g, med, abs_tol);
  else
    left = integrate_adaptive(g, lo, med, abs_tol);
  if (std::isinf(hi))
    right = integrate_upper_tail(g, med, abs_tol);
  else
    right = integrate_adaptive(g, med, hi, abs_tol);
  if (!left.converged || !right.converged)
    throw Error(Errc::non_convergent_quadrature,
                std::string("moment quadrature failed for ") + to_string(std_spec.family));
  return left.value + right.value;
}

}  // namespace dist_detail

// Moments computed by adaptive quadrature on the standard form, then shifted
// by loc and scale. Implementation path for families without closed-form
// moments; cross-check path for the rest.
inline Moments moments_by_quadrature(const DistSpec& s, double abs_tol = 1e-10) {
  using namespace dist_detail;
  s.check();
  const DistSpec st = standardized(s);

  double raw[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
  for (int r = 1; r <= 4; ++r) {
    auto g = [&](double z) {
      const double p = pdf(st, z);
      if (p == 0.0) return 0.0;
      return std::pow(z, r) * p;
    };
    raw[r] = integrate_std(st, g, abs_tol);
  }

  auto ent_g = [&](double z) {
    const double lp = log_pdf(st, z);
    if (lp == -kInf) return 0.0;
    const double p = std::exp(lp);
    return -p * lp;
  };
  const double entropy_std = integrate_std(st, ent_g, abs_tol);

  const double m1 = raw[1];
  const double c2 = raw[2] - m1 * m1;
  const double c3 = raw[3] - 3.0 * m1 * raw[2] + 2.0 * m1 * m1 * m1;
  const double c4 = raw[4] - 4.0 * m1 * raw[3] + 6.0 * m1 * m1 * raw[2] - 3.0 * m1 * m1 * m1 * m1;

  Moments m;
  m.median = quantile(s, 0.5);
  m.mean = s.loc + s.scale * m1;
  m.variance = s.scale * s.scale * c2;
  m.skewness = c3 / (c2 * std::sqrt(c2));
  m.excess_kurtosis = c4 / (c2 * c2) - 3.0;
  m.entropy = entropy_std + std::log(s.scale);
  return m;
}

// Closed forms where they exist; exponentiated Weibull goes through the
// quadrature path. Infinite moments (heavy-tail Pareto) are reported as +inf
// sentinels, never as errors.
inline Moments theoretical_moments(const DistSpec& s) {
  using namespace dist_detail;
  s.check();
  Moments m;
  const double ls = std::log(s.scale);
  switch (s.family) {
    case DistFamily::normal:
      m.median = s.loc;
      m.mean = s.loc;
      m.variance = s.scale * s.scale;
      m.skewness = 0.0;
      m.excess_kurtosis = 0.0;
      m.entropy = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e) + ls;
      return m;
    case DistFamily::log_normal:
    case DistFamily::gilbrat: {
      const double sig = lognormal_sigma(s);
      const double es = std::exp(sig * sig);
      m.median = s.loc + s.scale;
      m.mean = s.loc + s.scale * std::exp(0.5 * sig * sig);
      m.variance = s.scale * s.scale * (es - 1.0) * es;
      m.skewness = (es + 2.0) * std::sqrt(es - 1.0);
      m.excess_kurtosis = es * es * es * es + 2.0 * es * es * es + 3.0 * es * es - 6.0;
      m.entropy = 0.5 + 0.5 * std::log(2.0 * std::numbers::pi * sig * sig) + ls;
      return m;
    }
    case DistFamily::exponential:
      m.median = s.loc + s.scale * kLn2;
      m.mean = s.loc + s.scale;
      m.variance = s.scale * s.scale;
      m.skewness = 2.0;
      m.excess_kurtosis = 6.0;
      m.entropy = 1.0 + ls;
      return m;
    case DistFamily::pareto: {
      const double b = s.shape1;
      m.median = s.loc + s.scale * std::exp(kLn2 / b);
      m.mean = b > 1.0 ? s.loc + s.scale * b / (b - 1.0) : kInf;
      m.variance = b > 2.0 ? s.scale * s.scale * b / ((b - 1.0) * (b - 1.0) * (b - 2.0)) : kInf;
      m.skewness = b > 3.0 ? 2.0 * (1.0 + b) / (b - 3.0) * std::sqrt((b - 2.0) / b) : kInf;
      m.excess_kurtosis =
          b > 4.0 ? 6.0 * (b * b * b + b * b - 6.0 * b - 2.0) / (b * (b - 3.0) * (b - 4.0)) : kInf;
      m.entropy = 1.0 + 1.0 / b - std::log(b) + ls;
      return m;
    }
    case DistFamily::power_law: {
      const double a = s.shape1;
      const double m1 = a / (a + 1.0);
      const double m2 = a / (a + 2.0);
      const double m3 = a / (a + 3.0);
      const double m4 = a / (a + 4.0);
      const double c2 = m2 - m1 * m1;
      const double c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
      const double c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
      m.median = s.loc + s.scale * std::exp(-kLn2 / a);
      m.mean = s.loc + s.scale * m1;
      m.variance = s.scale * s.scale * c2;
      m.skewness = c3 / (c2 * std::sqrt(c2));
      m.excess_kurtosis = c4 / (c2 * c2) - 3.0;
      m.entropy = 1.0 - 1.0 / a - std::log(a) + ls;
      return m;
    }
    case DistFamily::exp_weibull:
      return moments_by_quadrature(s);
  }
  return m;
}

// The published parameter table prints one three-number exponentiated-Weibull
// row; the omitted slot is ambiguous. Both readings are constructible.
enum class ThreeParamReading { loc_zero, scale_one };

inline DistSpec expweibull_from_three(double alpha, double c, double third,
                                      ThreeParamReading reading) {
  DistSpec s;
  s.family = DistFamily::exp_weibull;
  s.shape1 = alpha;
  s.shape2 = c;
  if (reading == ThreeParamReading::loc_zero) {
    s.loc = 0.0;
    s.scale = third;
  } else {
    s.loc = third;
    s.scale = 1.0;
  }
  return s;
}

}  // namespace specsig
