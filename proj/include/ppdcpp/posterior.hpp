#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppdcpp/calibration.hpp"
#include "ppdcpp/congruence.hpp"
#include "ppdcpp/dataset.hpp"
#include "ppdcpp/rng.hpp"

namespace ppdcpp {

// Discount weights for the historical likelihood: one scalar for the whole
// arm, or one weight per historical observation. Weights scale each
// observation's log-likelihood contribution; the initial prior is never
// raised to a power.
class PowerAssignment {
 public:
  static PowerAssignment global(double alpha);
  static PowerAssignment pointwise(std::vector<double> alphas);

  bool is_global() const { return global_.has_value(); }
  double global_value() const;
  const std::vector<double>& values() const { return alphas_; }

  double weight(std::size_t i) const { return global_ ? *global_ : alphas_[i]; }
  double total(std::size_t m) const;

  void validate(std::size_t m) const;

 private:
  std::optional<double> global_;
  std::vector<double> alphas_;
};

struct PosteriorDraws {
  std::vector<std::string> names;
  std::vector<double> values;  // row-major, retained draws x parameters
  int burn_in = 0;
  std::optional<double> acceptance_rate;  // Metropolis fits only
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  std::size_t n_params() const { return names.size(); }
  std::size_t n_draws() const { return names.empty() ? 0 : values.size() / names.size(); }
  double at(std::size_t draw, std::size_t param) const {
    return values[draw * names.size() + param];
  }
  std::vector<double> column(std::size_t param) const;
};

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double interval_length = 0.0;
};

struct PosteriorSummary {
  std::vector<ParameterSummary> params;
  const ParameterSummary& operator[](std::size_t i) const { return params[i]; }
  const ParameterSummary& by_name(const std::string& name) const;
};

// Normal endpoint, known variances, flat initial prior: the posterior for
// the mean is exactly normal and is summarized analytically (no sampling).
PosteriorSummary fit_normal_known_var(const Dataset& hist, const Dataset& curr,
                                      double sigma2_hist, double sigma2_curr,
                                      const PowerAssignment& power);

// Normal endpoint, unknown variance, initial prior 1/sigma^2. Conjugate
// normal-inverse-gamma structure with the historical sufficient statistics
// weighted by the power; sampled by direct draws.
std::pair<PosteriorDraws, PosteriorSummary> fit_normal_unknown_var(
    const Dataset& hist, const Dataset& curr, const PowerAssignment& power, int iters,
    int burn_in, RngStream rng);

// Linear regression, initial prior (sigma^2)^{-(p+2)/2}. Historical rows
// enter the weighted cross-products with their individual powers.
std::pair<PosteriorDraws, PosteriorSummary> fit_linear_regression(
    const Dataset& hist, const Dataset& curr, const PowerAssignment& power, int iters,
    int burn_in, RngStream rng);

// Poisson log-link regression with a flat coefficient prior, fitted by
// random-walk Metropolis on the discounted joint likelihood.
std::pair<PosteriorDraws, PosteriorSummary> fit_poisson_regression_mh(
    const Dataset& hist, const Dataset& curr, const PowerAssignment& power, int iters,
    int burn_in, double proposal_scale, RngStream rng);

// One power per historical observation: score each historical row against
// the current fit (pointwise congruence with leverage), then map the
// distances through the calibration curve.
PowerAssignment assign_pointwise_powers(const Dataset& hist, const Dataset& curr,
                                        const CalibrationCurve& curve,
                                        Statistic statistic = Statistic::lik,
                                        std::optional<double> cap = std::nullopt);

// Mean, SD, and equal-tailed 95% interval per parameter. Quantiles use
// linear interpolation between order statistics (type 7).
PosteriorSummary summarize(const PosteriorDraws& draws);

}  // namespace ppdcpp
