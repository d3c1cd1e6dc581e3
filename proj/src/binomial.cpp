#include "ppdcpp/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppdcpp/dists.hpp"
#include "ppdcpp/errors.hpp"

namespace ppdcpp::stats {

BinomialCi binom_ci(long n, long w, double level, CiMethod method) {
  if (n < 1) throw ValidationError("binom_ci requires n >= 1");
  if (w < 0 || w > n) throw ValidationError("binom_ci requires 0 <= w <= n");
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("binom_ci requires level in (0,1)");
  }
  BinomialCi ci;
  ci.method = method;
  ci.n = n;
  ci.w = w;
  const double alpha = 1.0 - level;
  const double dn = static_cast<double>(n);
  const double dw = static_cast<double>(w);
  if (method == CiMethod::wald) {
    const double phat = dw / dn;
    const double z = norm_quantile(1.0 - 0.5 * alpha);
    const double half = z * std::sqrt(phat * (1.0 - phat) / dn);
    ci.lower = std::clamp(phat - half, 0.0, 1.0);
    ci.upper = std::clamp(phat + half, 0.0, 1.0);
  } else {
    ci.lower = (w == 0) ? 0.0 : betai_inv(dw, dn - dw + 1.0, 0.5 * alpha);
    ci.upper = (w == n) ? 1.0 : betai_inv(dw + 1.0, dn - dw, 1.0 - 0.5 * alpha);
  }
  return ci;
}

double binom_abs_dev_expectation(long n, double p) {
  if (n < 1) throw ValidationError("binom_abs_dev_expectation requires n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("binom_abs_dev_expectation requires p in [0,1]");
  }
  const double dn = static_cast<double>(n);
  double acc = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double lp = binom_logpmf(k, n, p);
    if (lp == -std::numeric_limits<double>::infinity()) continue;
    acc += std::exp(lp) * std::fabs(static_cast<double>(k) / dn - 0.5);
  }
  return acc;
}

}  // namespace ppdcpp::stats
