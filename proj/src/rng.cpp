#include "ppdcpp/rng.hpp"

#include <cmath>

#include "ppdcpp/dists.hpp"
#include "ppdcpp/errors.hpp"

namespace ppdcpp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a + kGolden * (b + 0x632BE59BD9B4E019ULL));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), state_(combine(mix64(seed), stream_id)) {}

RngStream RngStream::substream(std::uint64_t child) const {
  return RngStream(seed_, combine(stream_id_, child + 1));
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::next_double() {
  // 53 random bits centered in (0,1); endpoints are unreachable.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() { return stats::norm_quantile(next_double()); }

double RngStream::next_normal(double mean, double sd) {
  return mean + sd * next_normal();
}

double RngStream::next_gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw ValidationError("gamma sampler requires shape > 0 and scale > 0");
  }
  if (shape < 1.0) {
    // Boost trick: G(a) = G(a+1) * U^{1/a}.
    const double g = next_gamma(shape + 1.0, 1.0);
    const double u = next_double();
    return scale * g * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = next_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

double RngStream::next_inverse_gamma(double shape, double rate) {
  return rate / next_gamma(shape, 1.0);
}

double RngStream::next_chisq(double df) { return next_gamma(0.5 * df, 2.0); }

double RngStream::next_student_t(double df) {
  return next_normal() / std::sqrt(next_chisq(df) / df);
}

long RngStream::next_poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ValidationError("poisson sampler requires finite mean >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Chop-down inversion.
    const double l = std::exp(-mean);
    double p = 1.0;
    long k = 0;
    do {
      ++k;
      p *= next_double();
    } while (p > l);
    return k - 1;
  }
  // Hoermann's PTRS transformed rejection for large means.
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = next_double() - 0.5;
    const double v = next_double();
    const double us = 0.5 - std::fabs(u);
    const long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        static_cast<double>(k) * log_mean - mean - std::lgamma(static_cast<double>(k) + 1.0)) {
      return k;
    }
  }
}

}  // namespace ppdcpp
