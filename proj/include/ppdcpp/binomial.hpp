#pragma once

namespace ppdcpp::stats {

enum class CiMethod { wald, clopper_pearson };

struct BinomialCi {
  double lower = 0.0;
  double upper = 1.0;
  CiMethod method = CiMethod::clopper_pearson;
  long n = 0;
  long w = 0;
};

// Two-sided confidence interval for a binomial proportion at the given
// coverage level. Wald intervals are clipped to [0,1] and collapse to zero
// width at w in {0, n}; Clopper-Pearson uses exact beta-quantile bounds.
BinomialCi binom_ci(long n, long w, double level, CiMethod method);

// Exact E|W/n - 1/2| for W ~ Binomial(n, p), by pmf summation.
double binom_abs_dev_expectation(long n, double p);

}  // namespace ppdcpp::stats
