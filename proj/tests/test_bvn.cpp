#include <doctest.h>

#include <cmath>

#include "ppdcpp/bvn.hpp"
#include "ppdcpp/dists.hpp"
#include "ppdcpp/errors.hpp"
#include "ppdcpp/rng.hpp"

using namespace ppdcpp;
using namespace ppdcpp::stats;

namespace {
constexpr double kPi = 3.1415926535897932385;
}

TEST_CASE("orthant probability, pinned cases") {
  CHECK(orthant_double({0.0, 1.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-12));
  // Perfect correlation: the two orthant events partition the line.
  CHECK(orthant_double({0.0, 1.0, 1.0}) == 1.0);
  CHECK(orthant_double({2.3, 1.0, 1.0}) == 1.0);
  // Independent components: product of univariate CDFs.
  const double d = 1.0 / std::sqrt(2.0);
  const double expect = norm_cdf(d) * norm_cdf(d) + norm_cdf(-d) * norm_cdf(-d);
  CHECK(orthant_double({1.0, 2.0, 0.0}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(orthant_double({1.0, 2.0, 0.0}) == doctest::Approx(0.6355).epsilon(2e-4));
  const double e3 = norm_cdf(3.0) * norm_cdf(3.0) + norm_cdf(-3.0) * norm_cdf(-3.0);
  CHECK(orthant_double({3.0, 1.0, 0.0}) == doctest::Approx(e3).epsilon(1e-12));
  // Zero-mean equicorrelated orthants follow the arcsine rule.
  CHECK(orthant_double({0.0, 1.0, 0.5}) ==
        doctest::Approx(0.5 + std::asin(0.5) / kPi).epsilon(1e-11));
  // Perfect anticorrelation at zero mean: the events have zero probability.
  CHECK(orthant_double({0.0, 1.0, -1.0}) == 0.0);
  CHECK(orthant_double({1.0, 1.0, -1.0}) ==
        doctest::Approx(2.0 * norm_cdf(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("quadrature oracle, pinned cases") {
  CHECK(orthant_quadrature_oracle({0.0, 1.0, 0.0}, 1e-10) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(orthant_quadrature_oracle({0.0, 1.0, 0.5}, 1e-8) ==
        doctest::Approx(0.5 + std::asin(0.5) / kPi).epsilon(1e-7));
  const double e3 = norm_cdf(3.0) * norm_cdf(3.0) + norm_cdf(-3.0) * norm_cdf(-3.0);
  CHECK(orthant_quadrature_oracle({3.0, 1.0, 0.0}, 1e-10) ==
        doctest::Approx(e3).epsilon(1e-8));
  CHECK(orthant_quadrature_oracle({3.0, 1.0, 0.0}, 1e-10) == doctest::Approx(0.99731).epsilon(1e-4));
}

TEST_CASE("orthant probability properties on a randomized grid") {
  RngStream r(20260809, 0);
  for (int i = 0; i < 300; ++i) {
    const double delta = -5.0 + 10.0 * r.next_double();
    const double var = 0.1 + 4.0 * r.next_double();
    const double rho = -0.99 + 1.98 * r.next_double();
    const SymmetricBvnSpec spec{delta, var, rho * var};
    const double p = orthant_double(spec);
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
    // Central symmetry of the two-orthant sum.
    const double p_neg = orthant_double({-delta, var, rho * var});
    REQUIRE(p == doctest::Approx(p_neg).epsilon(1e-12));
  }
  // Zero covariance reduces to the product form.
  for (int i = 0; i < 100; ++i) {
    const double delta = -4.0 + 8.0 * r.next_double();
    const double var = 0.2 + 3.0 * r.next_double();
    const double d = delta / std::sqrt(var);
    const double expect = norm_cdf(d) * norm_cdf(d) + norm_cdf(-d) * norm_cdf(-d);
    REQUIRE(orthant_double({delta, var, 0.0}) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("orthant probability agrees with the quadrature oracle") {
  RngStream r(31337, 1);
  double max_err = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double delta = -5.0 + 10.0 * r.next_double();
    const double rho = -0.99 + 1.98 * r.next_double();
    const double var = 0.25 + 3.0 * r.next_double();
    const SymmetricBvnSpec spec{delta, var, rho * var};
    max_err = std::max(max_err,
                       std::fabs(orthant_double(spec) - orthant_quadrature_oracle(spec, 1e-9)));
  }
  CHECK(max_err < 1e-7);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(orthant_double({0.0, -1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(orthant_double({0.0, 1.0, 1.5}), ValidationError);
  CHECK_THROWS_AS(orthant_double({std::nan(""), 1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(orthant_quadrature_oracle({0.0, 1.0, 1.0}, 1e-8), ValidationError);
  // Near-degenerate correlations route to the analytic limit.
  CHECK(orthant_double({0.7, 1.0, 1.0 - 1e-13}) == 1.0);
}
