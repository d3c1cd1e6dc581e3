#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppdcpp/dataset.hpp"
#include "ppdcpp/rng.hpp"

namespace ppdcpp {

enum class Statistic { lik, obs };
enum class Estimator { thm, sim };

std::string to_string(Statistic s);
std::string to_string(Estimator e);
Statistic statistic_from_string(const std::string& s);
Estimator estimator_from_string(const std::string& s);

// Which dataset's rows get scored pointwise, conditioning on the other.
enum class RegressionTarget { score_current_given_hist, score_hist_given_current };

// Congruence between a historical and a current arm, as the probability
// that a predictive replicate (given the historical data) scores at least
// as high as a current observation. 1/2 means congruent; 0 or 1 means the
// replicates systematically out- or under-score the current data.
struct CongruenceEstimate {
  std::vector<double> p_cm;        // one entry, or one per scored row
  std::vector<double> distance_s;  // |p_cm - 1/2| elementwise
  Statistic statistic = Statistic::lik;
  Estimator estimator = Estimator::thm;
  bool pointwise = false;
  std::optional<int> mc_draws;
  std::vector<std::string> notes;  // warning-level diagnostics

  // Scalar congruence value: the single entry, or the mean over pointwise
  // entries when the current rows were scored. Unset for the
  // historical-scored direction, which is never aggregated.
  std::optional<double> aggregate_p;

  double value() const;       // aggregate_p or throws
  double distance() const;    // |value() - 1/2|
};

// Closed forms for normal endpoints without covariates, using the marginal
// predictive likelihood as the test statistic. Known variances use the
// finite-sample (m+1)/m inflation; unknown variances use the asymptotic
// form with sample means/variances plugged in.
CongruenceEstimate pcm_closed_normal(const Dataset& hist, const Dataset& curr,
                                     const EndpointModel& model);

// Same setting with the raw observation as the test statistic: a single
// one-sided normal probability. Blind to variance-ratio incongruence.
CongruenceEstimate pcm_closed_obs(const Dataset& hist, const Dataset& curr,
                                  const EndpointModel& model);

// Pointwise closed form for linear regression. Each scored row i gets its
// own probability built from the OLS fits of both arms and the leverage of
// x_i against the conditioning design.
CongruenceEstimate pcm_closed_regression(const Dataset& hist, const Dataset& curr,
                                         RegressionTarget target,
                                         Statistic statistic = Statistic::lik);

// Monte Carlo estimator: posterior draws given the historical data, one
// predictive replicate per (current row, draw), indicator averaged over the
// n x R grid. Ties count as successes. Parallelized over draws; the result
// is schedule independent (integer count reduction, one derived substream
// per draw).
CongruenceEstimate pcm_monte_carlo(const Dataset& hist, const Dataset& curr,
                                   const EndpointModel& model, Statistic statistic,
                                   int draws, RngStream rng);

// Single-threaded reference implementation; bit-identical to the parallel
// kernel, kept for tests and benchmarks.
CongruenceEstimate pcm_monte_carlo_serial(const Dataset& hist, const Dataset& curr,
                                          const EndpointModel& model, Statistic statistic,
                                          int draws, RngStream rng);

// Whole-vector predictive p-value, the variant whose null distribution is
// uniform rather than concentrated at 1/2. Kept for the uniformity
// demonstration; not used for calibration.
enum class VectorStatistic { max, mean, quantile };

double pcm_naive_vector(const Dataset& hist, const Dataset& curr, const EndpointModel& model,
                        VectorStatistic stat, double quantile_q, int draws, RngStream rng);

}  // namespace ppdcpp
