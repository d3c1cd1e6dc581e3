#include <doctest.h>

#include <cmath>
#include <vector>

#include "ppdcpp/bvn.hpp"
#include "ppdcpp/congruence.hpp"
#include "ppdcpp/dists.hpp"
#include "ppdcpp/errors.hpp"
#include "ppdcpp/rng.hpp"

using namespace ppdcpp;

namespace {

// Dataset with an exact sample mean (and nonzero variance).
Dataset exact_mean(double mean, std::size_t n, double half_spread, DataRole role) {
  Dataset d;
  d.role = role;
  d.y.resize(n, mean);
  d.y[0] = mean - half_spread;
  d.y[1] = mean + half_spread;
  return d;
}

Dataset normal_sample(std::size_t n, double mu, double sigma, RngStream s, DataRole role) {
  Dataset d;
  d.role = role;
  d.y.resize(n);
  for (auto& v : d.y) v = s.next_normal(mu, sigma);
  return d;
}

Dataset regression_sample(std::size_t n, const std::vector<double>& beta, double sigma,
                          RngStream s, DataRole role) {
  Dataset d;
  d.role = role;
  d.y.resize(n);
  Matrix x(n, beta.size());
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    double mean = beta[0];
    for (std::size_t j = 1; j < beta.size(); ++j) {
      x(i, j) = (j == 1) ? (s.next_double() < 0.5 ? 1.0 : 0.0)
                         : 40.0 + std::floor(s.next_double() * 31.0);
      mean += beta[j] * x(i, j);
    }
    d.y[i] = mean + s.next_normal(0.0, sigma);
  }
  d.x = std::move(x);
  return d;
}

}  // namespace

TEST_CASE("closed-form congruence for normal endpoints, known variance") {
  const EndpointModel model = EndpointModel::normal_known(0.25, 0.25);

  SUBCASE("equal plug-in means approach 1/2 for large m") {
    const Dataset hist = exact_mean(20.0, 1000000, 0.5, DataRole::historical);
    const Dataset curr = exact_mean(20.0, 50, 0.5, DataRole::current);
    const double p = pcm_closed_normal(hist, curr, model).value();
    CHECK(p == doctest::Approx(0.5).epsilon(1e-5));
  }
  SUBCASE("an 8-sigma shift saturates the measure") {
    const Dataset hist = exact_mean(20.0, 100000, 0.5, DataRole::historical);
    const Dataset curr = exact_mean(24.0, 50, 0.5, DataRole::current);  // 8 * 0.5
    const CongruenceEstimate est = pcm_closed_normal(hist, curr, model);
    CHECK(est.value() > 0.999);
    CHECK(est.distance() == doctest::Approx(std::fabs(est.value() - 0.5)));
  }
  SUBCASE("variance-ratio incongruence drives the correlation to +1") {
    const EndpointModel wide = EndpointModel::normal_known(0.25, 0.25e6);
    const Dataset hist = exact_mean(20.0, 400, 0.5, DataRole::historical);
    const Dataset curr = exact_mean(20.0, 50, 0.5, DataRole::current);
    const double p = pcm_closed_normal(hist, curr, wide).value();
    CHECK(p > 0.99);
    // Cross-check against the quadrature oracle on the same plug-in spec.
    const double infl = 401.0 / 400.0;
    const stats::SymmetricBvnSpec spec{0.0, 0.25e6 + infl * 0.25, 0.25e6 - infl * 0.25};
    CHECK(p == doctest::Approx(stats::orthant_quadrature_oracle(spec, 1e-7)).epsilon(1e-5));
  }
}

TEST_CASE("observation-statistic closed form") {
  SUBCASE("equal plug-in means give exactly one half") {
    const EndpointModel model = EndpointModel::normal_known(0.25, 0.25);
    const Dataset hist = exact_mean(20.0, 60, 0.5, DataRole::historical);
    const Dataset curr = exact_mean(20.0, 40, 0.7, DataRole::current);
    CHECK(pcm_closed_obs(hist, curr, model).value() == 0.5);
  }
  SUBCASE("a +4 historical shift lands at the univariate cdf value") {
    const EndpointModel model = EndpointModel::normal_known(0.25, 0.25);
    const Dataset hist = exact_mean(24.0, 100000, 0.5, DataRole::historical);
    const Dataset curr = exact_mean(20.0, 50, 0.5, DataRole::current);
    const double infl = 100001.0 / 100000.0;
    const double expect = stats::norm_cdf(4.0 / std::sqrt(0.25 + infl * 0.25));
    CHECK(pcm_closed_obs(hist, curr, model).value() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(pcm_closed_obs(hist, curr, model).value() ==
          doctest::Approx(stats::norm_cdf(4.0 / std::sqrt(0.5))).epsilon(1e-4));
  }
  SUBCASE("blind to variance-ratio incongruence") {
    // Unknown-variance path with equal means but very different spreads.
    const EndpointModel model = EndpointModel::normal_unknown();
    const Dataset hist = exact_mean(20.0, 50, 0.1, DataRole::historical);
    const Dataset curr = exact_mean(20.0, 50, 30.0, DataRole::current);
    CHECK(pcm_closed_obs(hist, curr, model).value() == 0.5);
    // The likelihood statistic does flag it.
    CHECK(pcm_closed_normal(hist, curr, model).value() > 0.9);
  }
}

TEST_CASE("unknown-variance closed form on two copies of the same data") {
  const EndpointModel model = EndpointModel::normal_unknown();
  RngStream r(5150, 0);
  const Dataset hist = normal_sample(40, 20.0, 0.5, r.substream(0), DataRole::historical);
  Dataset curr = hist;
  curr.role = DataRole::current;
  CHECK(pcm_closed_normal(hist, curr, model).value() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("degenerate and invalid inputs") {
  const EndpointModel model = EndpointModel::normal_unknown();
  Dataset hist;
  hist.y = {3.0, 3.0, 3.0};
  Dataset curr;
  curr.y = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(pcm_closed_normal(hist, curr, model), NumericError);
  Dataset tiny;
  tiny.y = {1.0};
  CHECK_THROWS_AS(pcm_closed_normal(tiny, curr, model), ValidationError);
}

TEST_CASE("pointwise regression congruence") {
  RngStream r(808, 0);
  const std::vector<double> beta{50.0, 8.0, 0.5};

  SUBCASE("identical large arms sit at one half") {
    const Dataset hist = regression_sample(2000, beta, 0.5, r.substream(1), DataRole::historical);
    Dataset curr = hist;
    curr.role = DataRole::current;
    const CongruenceEstimate est =
        pcm_closed_regression(hist, curr, RegressionTarget::score_current_given_hist);
    REQUIRE(est.pointwise);
    REQUIRE(est.p_cm.size() == curr.size());
    for (double p : est.p_cm) REQUIRE(p == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(est.value() == doctest::Approx(0.5).epsilon(2e-3));
  }
  SUBCASE("huge leverage pushes the likelihood statistic toward zero") {
    const Dataset hist = regression_sample(100, beta, 0.5, r.substream(2), DataRole::historical);
    Dataset curr = regression_sample(50, beta, 0.5, r.substream(3), DataRole::current);
    (*curr.x)(0, 2) = 1e4;  // far outside the historical covariate range
    curr.y[0] = beta[0] + beta[2] * 1e4;
    const CongruenceEstimate est =
        pcm_closed_regression(hist, curr, RegressionTarget::score_current_given_hist);
    CHECK(est.p_cm[0] < 0.05);
  }
  SUBCASE("historical-scored direction has no aggregate") {
    const Dataset hist = regression_sample(60, beta, 0.5, r.substream(4), DataRole::historical);
    const Dataset curr = regression_sample(50, beta, 0.5, r.substream(5), DataRole::current);
    const CongruenceEstimate est =
        pcm_closed_regression(hist, curr, RegressionTarget::score_hist_given_current);
    CHECK(est.p_cm.size() == hist.size());
    CHECK_FALSE(est.aggregate_p.has_value());
    CHECK_THROWS_AS(est.value(), ValidationError);
  }
  SUBCASE("invariant under common affine rescaling of responses") {
    for (int trial = 0; trial < 20; ++trial) {
      RngStream t = r.substream(100 + static_cast<std::uint64_t>(trial));
      Dataset hist = regression_sample(80, beta, 0.5, t.substream(0), DataRole::historical);
      Dataset curr = regression_sample(50, {49.0, 6.0, 0.4}, 0.7, t.substream(1), DataRole::current);
      const CongruenceEstimate base =
          pcm_closed_regression(hist, curr, RegressionTarget::score_current_given_hist);
      const double c = 0.1 + 9.9 * t.next_double();
      const double d0 = -100.0 + 200.0 * t.next_double();
      Dataset hist2 = hist;
      Dataset curr2 = curr;
      for (auto& y : hist2.y) y = c * y + d0;
      for (auto& y : curr2.y) y = c * y + d0;
      const CongruenceEstimate scaled =
          pcm_closed_regression(hist2, curr2, RegressionTarget::score_current_given_hist);
      for (std::size_t i = 0; i < base.p_cm.size(); ++i) {
        REQUIRE(scaled.p_cm[i] == doctest::Approx(base.p_cm[i]).epsilon(1e-7));
      }
    }
  }
  SUBCASE("dimension mismatches are rejected") {
    const Dataset hist = regression_sample(60, beta, 0.5, r.substream(6), DataRole::historical);
    Dataset univ;
    univ.y = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(
        pcm_closed_regression(hist, univ, RegressionTarget::score_current_given_hist),
        ValidationError);
  }
}

TEST_CASE("congruence is monotone in the plug-in mean gap") {
  const EndpointModel model = EndpointModel::normal_known(0.25, 0.25);
  const Dataset hist = exact_mean(20.0, 100000, 0.5, DataRole::historical);
  double prev = -1.0;
  for (double shift = 0.0; shift <= 3.01; shift += 0.25) {
    const Dataset curr = exact_mean(20.0 + shift, 50, 0.5, DataRole::current);
    const double p = pcm_closed_normal(hist, curr, model).value();
    REQUIRE(p >= prev - 1e-12);
    if (shift > 0.3 && prev > 0.0 && prev < 0.9999) REQUIRE(p > prev);
    prev = p;
  }
}

TEST_CASE("monte carlo estimator") {
  const EndpointModel known = EndpointModel::normal_known(0.25, 0.25);
  RngStream data_rng(314, 0);
  const Dataset hist = normal_sample(50, 20.0, 0.5, data_rng.substream(0), DataRole::historical);
  const Dataset curr = normal_sample(50, 20.0, 0.5, data_rng.substream(1), DataRole::current);

  SUBCASE("deterministic and schedule independent") {
    const CongruenceEstimate a = pcm_monte_carlo(hist, curr, known, Statistic::lik, 2000,
                                                 RngStream(9, 9));
    const CongruenceEstimate b = pcm_monte_carlo(hist, curr, known, Statistic::lik, 2000,
                                                 RngStream(9, 9));
    const CongruenceEstimate c = pcm_monte_carlo_serial(hist, curr, known, Statistic::lik, 2000,
                                                        RngStream(9, 9));
    CHECK(a.value() == b.value());
    CHECK(a.value() == c.value());
  }

  SUBCASE("matches the conditional quadrature oracle, known variance") {
    // Given the data, the estimator's limit is the average over current
    // observations of q(y) = E_mu[ indicator probability | mu ], with mu
    // drawn from the historical-only posterior. Evaluate q by quadrature.
    const double ybar_h = sample_mean(hist.y);
    const double sig = 0.5;
    const double post_sd = sig / std::sqrt(50.0);
    const auto q_lik = [&](double y) {
      double acc = 0.0;
      const int grid = 4001;
      const double lo = ybar_h - 8.0 * post_sd, hi = ybar_h + 8.0 * post_sd;
      const double h = (hi - lo) / (grid - 1);
      for (int i = 0; i < grid; ++i) {
        const double mu = lo + i * h;
        const double wgt = (i == 0 || i == grid - 1) ? 0.5 : 1.0;
        const double inner = 2.0 * stats::norm_cdf(std::fabs(y - mu) / sig) - 1.0;
        acc += wgt * inner * stats::norm_pdf((mu - ybar_h) / post_sd) / post_sd * h;
      }
      return acc;
    };
    double cond = 0.0;
    for (double y : curr.y) cond += q_lik(y);
    cond /= static_cast<double>(curr.size());
    const int draws = 20000;
    const CongruenceEstimate est =
        pcm_monte_carlo(hist, curr, known, Statistic::lik, draws, RngStream(4133, 0));
    // Per-draw averages over the 50 rows have variance at most 1/4.
    CHECK(std::fabs(est.value() - cond) < 5.0 * std::sqrt(0.25 / draws));
  }

  SUBCASE("agrees with the closed form at the estimator noise scale") {
    const CongruenceEstimate sim =
        pcm_monte_carlo(hist, curr, known, Statistic::lik, 5000, RngStream(555, 0));
    const CongruenceEstimate thm = pcm_closed_normal(hist, curr, known);
    const double pbar = 0.5 * (sim.value() + thm.value());
    const double se = std::sqrt(std::max(pbar * (1.0 - pbar), 1e-4) *
                                (1.0 / 50.0 + 1.0 / (50.0 * 5000.0)));
    CHECK(std::fabs(sim.value() - thm.value()) <= 4.0 * se);
  }

  SUBCASE("saturates under a strong shift") {
    RngStream big(99, 0);
    const Dataset hist_big =
        normal_sample(20000, 24.0, 0.5, big.substream(0), DataRole::historical);
    const CongruenceEstimate est =
        pcm_monte_carlo(hist_big, curr, known, Statistic::lik, 2000, RngStream(1, 2));
    CHECK(est.value() > 0.99);
  }

  SUBCASE("obs statistic uses raw comparisons") {
    const CongruenceEstimate est =
        pcm_monte_carlo(hist, curr, known, Statistic::obs, 5000, RngStream(7, 7));
    const double expect = pcm_closed_obs(hist, curr, known).value();
    CHECK(std::fabs(est.value() - expect) < 0.1);
  }

  SUBCASE("indicator granularity at minimal sizes") {
    Dataset h2;
    h2.y = {19.5, 20.5};
    Dataset c2;
    c2.y = {20.0, 20.2};
    const CongruenceEstimate est =
        pcm_monte_carlo(h2, c2, known, Statistic::lik, 1, RngStream(3, 3));
    const double v = est.value();
    CHECK((v == 0.0 || v == 0.5 || v == 1.0));
    CHECK(est.mc_draws == 1);
    CHECK_FALSE(est.notes.empty());  // small-draws warning
  }

  SUBCASE("unknown variance tracks the closed form at large n") {
    RngStream big(2718, 0);
    const Dataset h = normal_sample(4000, 20.0, 0.5, big.substream(0), DataRole::historical);
    const Dataset c = normal_sample(4000, 20.1, 0.5, big.substream(1), DataRole::current);
    const EndpointModel unk = EndpointModel::normal_unknown();
    const double sim =
        pcm_monte_carlo(h, c, unk, Statistic::lik, 3000, RngStream(42, 0)).value();
    const double thm = pcm_closed_normal(h, c, unk).value();
    CHECK(std::fabs(sim - thm) < 0.03);
  }
}

TEST_CASE("whole-vector predictive p-value") {
  const EndpointModel known = EndpointModel::normal_known(0.25, 0.25);
  RngStream r(161, 0);
  const Dataset hist = normal_sample(50, 20.0, 0.5, r.substream(0), DataRole::historical);

  SUBCASE("current vector at the predictive center scores one half") {
    Dataset curr;
    curr.role = DataRole::current;
    curr.y.assign(50, sample_mean(hist.y));
    curr.y[0] += 0.3;
    curr.y[1] -= 0.3;  // keep the mean exact, add spread
    const double p = pcm_naive_vector(hist, curr, known, VectorStatistic::mean, 0.5, 4000,
                                      RngStream(12, 0));
    CHECK(p == doctest::Approx(0.5).epsilon(0.08));
  }
  SUBCASE("an unbeatably low current statistic gives probability one") {
    Dataset curr;
    curr.role = DataRole::current;
    curr.y.assign(50, -1e10);
    const double p =
        pcm_naive_vector(hist, curr, known, VectorStatistic::max, 0.5, 500, RngStream(1, 1));
    CHECK(p == 1.0);
  }
  SUBCASE("estimates are multiples of 1/draws") {
    const Dataset curr = normal_sample(50, 20.0, 0.5, r.substream(1), DataRole::current);
    const double p = pcm_naive_vector(hist, curr, known, VectorStatistic::quantile, 0.9, 8,
                                      RngStream(2, 2));
    CHECK(std::fabs(p * 8.0 - std::round(p * 8.0)) < 1e-12);
  }
}
