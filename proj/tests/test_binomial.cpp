#include <doctest.h>

#include <cmath>

#include "ppdcpp/binomial.hpp"
#include "ppdcpp/errors.hpp"
#include "ppdcpp/rng.hpp"

using namespace ppdcpp;
using namespace ppdcpp::stats;

TEST_CASE("clopper-pearson, pinned cases") {
  const BinomialCi all = binom_ci(10, 10, 0.95, CiMethod::clopper_pearson);
  CHECK(all.lower == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-10));
  CHECK(all.upper == 1.0);
  const BinomialCi none = binom_ci(10, 0, 0.95, CiMethod::clopper_pearson);
  CHECK(none.lower == 0.0);
  CHECK(none.upper == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-10));
  const BinomialCi mid = binom_ci(10, 5, 0.95, CiMethod::clopper_pearson);
  CHECK(mid.lower == doctest::Approx(0.18708602844739855).epsilon(1e-8));
  CHECK(mid.upper == doctest::Approx(0.81291397155260145).epsilon(1e-8));
}

TEST_CASE("wald, pinned case and degeneracies") {
  const BinomialCi w = binom_ci(100, 50, 0.95, CiMethod::wald);
  CHECK(w.lower == doctest::Approx(0.402).epsilon(1e-3));
  CHECK(w.upper == doctest::Approx(0.598).epsilon(1e-3));
  // Zero-width at the boundary counts; documented, not an error.
  const BinomialCi at_n = binom_ci(25, 25, 0.95, CiMethod::wald);
  CHECK(at_n.lower == 1.0);
  CHECK(at_n.upper == 1.0);
  const BinomialCi clip = binom_ci(5, 1, 0.999, CiMethod::wald);
  CHECK(clip.lower == 0.0);  // clipped into [0,1]
}

TEST_CASE("clopper-pearson always contains the point estimate") {
  for (long n : {3L, 10L, 47L, 200L}) {
    for (long w = 0; w <= n; w += std::max(1L, n / 7)) {
      const BinomialCi ci = binom_ci(n, w, 0.95, CiMethod::clopper_pearson);
      const double phat = static_cast<double>(w) / static_cast<double>(n);
      REQUIRE(ci.lower <= phat + 1e-12);
      REQUIRE(ci.upper >= phat - 1e-12);
      REQUIRE(ci.lower <= ci.upper);
    }
  }
}

TEST_CASE("binomial ci input validation") {
  CHECK_THROWS_AS(binom_ci(10, 11, 0.95, CiMethod::wald), ValidationError);
  CHECK_THROWS_AS(binom_ci(10, -1, 0.95, CiMethod::wald), ValidationError);
  CHECK_THROWS_AS(binom_ci(0, 0, 0.95, CiMethod::wald), ValidationError);
  CHECK_THROWS_AS(binom_ci(10, 5, 1.0, CiMethod::wald), ValidationError);
}

TEST_CASE("mean absolute deviation of a binomial proportion") {
  CHECK(binom_abs_dev_expectation(1, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(binom_abs_dev_expectation(10, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(binom_abs_dev_expectation(50, 0.5) ==
        doctest::Approx(0.056137586329608).epsilon(1e-10));

  // Simulation cross-check of the summation path.
  RngStream r(77, 0);
  const int sims = 200000;
  double acc = 0.0;
  for (int s = 0; s < sims; ++s) {
    int w = 0;
    for (int i = 0; i < 50; ++i) w += r.next_double() < 0.5 ? 1 : 0;
    acc += std::fabs(w / 50.0 - 0.5);
  }
  CHECK(acc / sims == doctest::Approx(0.056137586).epsilon(0.02));
}
