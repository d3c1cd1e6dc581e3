#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppdcpp/calibration.hpp"
#include "ppdcpp/congruence.hpp"
#include "ppdcpp/dataset.hpp"
#include "ppdcpp/rng.hpp"

namespace ppdcpp::sim {

enum class MethodVariant { thm_lik, thm_obs, sim_lik, sim_obs, pw_lik, pw_obs, no_borrow, pool };
enum class SweepAxis { none, mean_diff, sigma_hist, bernoulli_p, current_n };

std::string to_string(MethodVariant v);
MethodVariant method_from_string(const std::string& s);
std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

// One simulation study: a data generating process, a borrowing method, a
// calibration configuration, and optionally a sweep over one generator
// knob. Replicates are deterministic functions of (seed, sweep index,
// replicate index), so runs parallelize without changing results.
struct ScenarioSpec {
  std::string name = "scenario";
  EndpointKind endpoint = EndpointKind::normal_known_var;

  // Univariate generator.
  double mu_h = 20.0, mu_c = 20.0;
  double sigma_h = 0.5, sigma_c = 0.5;

  // Regression generator: y = b0 + b1*x1 + b2*x2 + noise with
  // x1 ~ Bernoulli(p) and x2 ~ uniform on the integers [du_lo, du_hi].
  std::vector<double> beta_h, beta_c;
  double bern_p_hist = 0.5, bern_p_curr = 0.5;
  int du_lo = 40, du_hi = 70;

  int m = 50, n = 50;
  MethodVariant method = MethodVariant::thm_lik;
  int replicates = 500;
  CalibrationConfig calibration;  // n_current is overwritten from n at run time

  SweepAxis sweep_axis = SweepAxis::none;
  std::vector<double> sweep_grid;

  int mc_draws = 5000;
  int iters = 6500;
  int burn_in = 1500;
  bool cap_power = false;  // cap alpha at n/m
  std::uint64_t seed = 0;

  void validate() const;
};

struct ParamMetrics {
  std::string name;
  double avg_bias = 0.0;  // mean absolute deviation of the posterior mean
  double avg_sd = 0.0;
  double coverage = 0.0;
  double avg_interval_length = 0.0;
};

struct SweepPointMetrics {
  double sweep_value = 0.0;
  int replicates_used = 0;
  int n_failed = 0;
  std::vector<std::string> failure_reasons;

  double avg_power = 0.0;
  double prob_complete_borrow = 0.0;  // fraction of replicates with alpha > alpha_c
  double prob_discard = 0.0;          // fraction with alpha < alpha_ic

  // Pointwise variants: replicate-level summaries of the alpha_i vector,
  // averaged across replicates, plus the across-replicate median of the
  // per-replicate mean.
  bool pointwise = false;
  double avg_alpha_min = 0.0;
  double avg_alpha_median = 0.0;
  double avg_alpha_max = 0.0;
  double avg_alpha_mean = 0.0;
  double median_alpha_mean = 0.0;

  std::vector<ParamMetrics> params;
};

struct MetricsReport {
  std::vector<SweepPointMetrics> points;
};

MetricsReport run_scenario(const ScenarioSpec& spec);         // OpenMP over replicates
MetricsReport run_scenario_serial(const ScenarioSpec& spec);  // reference implementation

// Congruent pairs from N(20, 0.5^2): the whole-vector predictive p-value is
// uniform under the null while the marginal one concentrates at 1/2.
struct UniformityResult {
  std::vector<double> naive;     // whole-vector p values, one per pair
  std::vector<double> marginal;  // closed-form marginal p values
  double ks_naive = 0.0;         // KS distance of `naive` to Uniform(0,1)
};

UniformityResult run_uniformity_demo(int n, int m, int pairs, int mc_draws, RngStream rng);

// Kolmogorov-Smirnov distance to Uniform(0,1).
double ks_distance_uniform(std::vector<double> sample);

// Asymptotic two-sided KS critical value at the given significance level.
double ks_critical_value(std::size_t n, double level);

}  // namespace ppdcpp::sim
