#pragma once

namespace ppdcpp::stats {

// Mean/covariance structure for a bivariate normal (U, V) whose two
// components share a common mean and a common variance. This is the exact
// shape produced by the replicate-vs-observation decomposition used by the
// congruence estimators: U and V are a sum and a difference of the same two
// independent normals.
struct SymmetricBvnSpec {
  double mean_delta = 0.0;  // common mean of U and V
  double var = 1.0;         // common variance, > 0
  double cov = 0.0;         // covariance, |cov| <= var

  void validate() const;  // throws ValidationError on bad values
};

// Pr(U >= 0, V >= 0) + Pr(U <= 0, V <= 0). Absolute accuracy ~1e-15 via a
// Gauss-Legendre scheme of the Drezner/Genz family; correlations within
// 1e-12 of +-1 use the degenerate analytic limit.
double orthant_double(const SymmetricBvnSpec& spec);

// Same quantity by direct 2-D adaptive integration of the bivariate normal
// density over both orthants. Test oracle only: slower, and independent of
// the Gauss-Legendre path (no univariate CDF involved). Requires |cov| < var.
double orthant_quadrature_oracle(const SymmetricBvnSpec& spec, double abs_tol);

// P(X > h, Y > k) for standard bivariate normal with correlation rho.
double bvn_upper(double h, double k, double rho);

}  // namespace ppdcpp::stats
