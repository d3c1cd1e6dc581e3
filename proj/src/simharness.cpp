#include "ppdcpp/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ppdcpp/dists.hpp"
#include "ppdcpp/errors.hpp"
#include "ppdcpp/posterior.hpp"

namespace ppdcpp::sim {

std::string to_string(MethodVariant v) {
  switch (v) {
    case MethodVariant::thm_lik: return "thm_lik";
    case MethodVariant::thm_obs: return "thm_obs";
    case MethodVariant::sim_lik: return "sim_lik";
    case MethodVariant::sim_obs: return "sim_obs";
    case MethodVariant::pw_lik: return "pw_lik";
    case MethodVariant::pw_obs: return "pw_obs";
    case MethodVariant::no_borrow: return "no_borrow";
    case MethodVariant::pool: return "pool";
  }
  return "?";
}

MethodVariant method_from_string(const std::string& s) {
  static const std::map<std::string, MethodVariant> table = {
      {"thm_lik", MethodVariant::thm_lik},   {"thm_obs", MethodVariant::thm_obs},
      {"sim_lik", MethodVariant::sim_lik},   {"sim_obs", MethodVariant::sim_obs},
      {"pw_lik", MethodVariant::pw_lik},     {"pw_obs", MethodVariant::pw_obs},
      {"no_borrow", MethodVariant::no_borrow}, {"pool", MethodVariant::pool}};
  const auto it = table.find(s);
  if (it == table.end()) throw ValidationError("unknown method variant: " + s);
  return it->second;
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::none: return "none";
    case SweepAxis::mean_diff: return "mean_diff";
    case SweepAxis::sigma_hist: return "sigma_hist";
    case SweepAxis::bernoulli_p: return "bernoulli_p";
    case SweepAxis::current_n: return "current_n";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "none") return SweepAxis::none;
  if (s == "mean_diff") return SweepAxis::mean_diff;
  if (s == "sigma_hist") return SweepAxis::sigma_hist;
  if (s == "bernoulli_p") return SweepAxis::bernoulli_p;
  if (s == "current_n") return SweepAxis::current_n;
  throw ValidationError("unknown sweep axis: " + s);
}

namespace {

bool is_pointwise(MethodVariant v) {
  return v == MethodVariant::pw_lik || v == MethodVariant::pw_obs;
}

bool is_regression(EndpointKind k) { return k == EndpointKind::linear_regression; }

}  // namespace

void ScenarioSpec::validate() const {
  if (replicates < 1) throw ValidationError("scenario requires replicates >= 1");
  if (m < 2 || n < 2) throw ValidationError("scenario requires m >= 2 and n >= 2");
  if (endpoint == EndpointKind::poisson_regression) {
    throw ValidationError("the scenario generator covers normal endpoints only");
  }
  if (is_regression(endpoint)) {
    if (beta_h.size() != 3 || beta_c.size() != 3) {
      throw ValidationError("regression scenarios use three coefficients (intercept, binary, discrete)");
    }
    if (!(bern_p_hist > 0.0 && bern_p_hist < 1.0 && bern_p_curr > 0.0 && bern_p_curr < 1.0)) {
      throw ValidationError("bernoulli proportions must lie in (0,1)");
    }
    if (du_lo > du_hi) throw ValidationError("discrete uniform bounds are inverted");
  } else if (is_pointwise(method)) {
    throw ValidationError("pointwise variants require the regression endpoint");
  }
  if (!(sigma_h > 0.0 && sigma_c > 0.0)) throw ValidationError("generator sigmas must be positive");
  if (sweep_axis != SweepAxis::none) {
    if (sweep_grid.empty()) throw ValidationError("sweep requested but the grid is empty");
    if (!std::is_sorted(sweep_grid.begin(), sweep_grid.end())) {
      throw ValidationError("sweep grid must be sorted");
    }
    for (double v : sweep_grid) {
      if (!std::isfinite(v)) throw ValidationError("sweep grid contains a non-finite value");
    }
    if (sweep_axis == SweepAxis::bernoulli_p && !is_regression(endpoint)) {
      throw ValidationError("bernoulli_p sweeps require the regression endpoint");
    }
    if (sweep_axis == SweepAxis::current_n) {
      for (double v : sweep_grid) {
        if (v < 2.0 || v != std::floor(v)) throw ValidationError("current_n grid must hold integers >= 2");
      }
    }
    if (sweep_axis == SweepAxis::sigma_hist) {
      for (double v : sweep_grid) {
        if (!(v > 0.0)) throw ValidationError("sigma_hist grid must be positive");
      }
    }
  }
  if (mc_draws < 1) throw ValidationError("mc_draws must be >= 1");
  if (burn_in < 0 || iters <= burn_in) throw ValidationError("scenario requires iters > burn_in >= 0");
}

namespace {

// Generator knobs after applying one sweep value.
struct PointConfig {
  double mu_h, mu_c, sigma_h, sigma_c;
  std::vector<double> beta_h, beta_c;
  double bern_p_hist, bern_p_curr;
  int m, n;
};

PointConfig at_sweep_value(const ScenarioSpec& spec, SweepAxis axis, double value) {
  PointConfig c{spec.mu_h, spec.mu_c, spec.sigma_h, spec.sigma_c, spec.beta_h,
                spec.beta_c, spec.bern_p_hist, spec.bern_p_curr, spec.m, spec.n};
  switch (axis) {
    case SweepAxis::none: break;
    case SweepAxis::mean_diff: c.mu_h = c.mu_c + value; break;
    case SweepAxis::sigma_hist: c.sigma_h = value; break;
    case SweepAxis::bernoulli_p: c.bern_p_hist = value; break;
    case SweepAxis::current_n: c.n = static_cast<int>(value); break;
  }
  return c;
}

Dataset gen_univariate(int count, double mu, double sigma, DataRole role, RngStream s) {
  Dataset d;
  d.role = role;
  d.y.resize(static_cast<std::size_t>(count));
  for (auto& v : d.y) v = s.next_normal(mu, sigma);
  return d;
}

Dataset gen_regression(int count, const std::vector<double>& beta, double sigma, double bern_p,
                       int du_lo, int du_hi, DataRole role, RngStream s) {
  Dataset d;
  d.role = role;
  const std::size_t nn = static_cast<std::size_t>(count);
  d.y.resize(nn);
  Matrix x(nn, 3);
  const int span = du_hi - du_lo + 1;
  for (std::size_t i = 0; i < nn; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = s.next_double() < bern_p ? 1.0 : 0.0;
    x(i, 2) = static_cast<double>(du_lo + std::min<long>(span - 1, static_cast<long>(s.next_double() * span)));
    d.y[i] = beta[0] + beta[1] * x(i, 1) + beta[2] * x(i, 2) + s.next_normal(0.0, sigma);
  }
  d.x = std::move(x);
  return d;
}

struct RepResult {
  bool ok = false;
  std::string reason;
  double alpha = 0.0;  // scalar power; the mean of alpha_i for pointwise runs
  double alpha_min = 0.0, alpha_median = 0.0, alpha_max = 0.0;
  std::vector<double> bias, sd, cover, length;
};

// Parameters whose estimation quality is tracked, with their true values.
struct TruthSet {
  std::vector<std::string> names;
  std::vector<double> values;
};

TruthSet truth_for(const ScenarioSpec& spec, const PointConfig& c) {
  TruthSet t;
  if (is_regression(spec.endpoint)) {
    t.names = {"beta0", "beta1", "beta2"};
    t.values = c.beta_c;
  } else {
    t.names = {"mu"};
    t.values = {c.mu_c};
  }
  return t;
}

RepResult run_replicate(const ScenarioSpec& spec, const PointConfig& c,
                        const CalibrationCurve& curve, const TruthSet& truth,
                        RngStream base) {
  RepResult res;
  const RngStream s_hist = base.substream(0);
  const RngStream s_curr = base.substream(1);
  const RngStream s_fit = base.substream(2);
  const RngStream s_mc = base.substream(3);

  Dataset hist, curr;
  if (is_regression(spec.endpoint)) {
    hist = gen_regression(c.m, c.beta_h, c.sigma_h, c.bern_p_hist, spec.du_lo, spec.du_hi,
                          DataRole::historical, s_hist);
    curr = gen_regression(c.n, c.beta_c, c.sigma_c, c.bern_p_curr, spec.du_lo, spec.du_hi,
                          DataRole::current, s_curr);
  } else {
    hist = gen_univariate(c.m, c.mu_h, c.sigma_h, DataRole::historical, s_hist);
    curr = gen_univariate(c.n, c.mu_c, c.sigma_c, DataRole::current, s_curr);
  }

  EndpointModel model;
  switch (spec.endpoint) {
    case EndpointKind::normal_known_var:
      model = EndpointModel::normal_known(c.sigma_h * c.sigma_h, c.sigma_c * c.sigma_c);
      break;
    case EndpointKind::normal_unknown_var:
      model = EndpointModel::normal_unknown();
      break;
    default:
      model = EndpointModel::regression();
      break;
  }

  const std::optional<double> cap =
      spec.cap_power ? std::optional<double>(std::min(1.0, static_cast<double>(c.n) / c.m))
                     : std::nullopt;

  PowerAssignment power = PowerAssignment::global(0.0);
  switch (spec.method) {
    case MethodVariant::no_borrow:
      break;
    case MethodVariant::pool:
      power = PowerAssignment::global(1.0);
      break;
    case MethodVariant::pw_lik:
    case MethodVariant::pw_obs: {
      const Statistic stat =
          spec.method == MethodVariant::pw_lik ? Statistic::lik : Statistic::obs;
      power = assign_pointwise_powers(hist, curr, curve, stat, cap);
      break;
    }
    default: {
      const Statistic stat =
          (spec.method == MethodVariant::thm_lik || spec.method == MethodVariant::sim_lik)
              ? Statistic::lik
              : Statistic::obs;
      CongruenceEstimate est;
      if (spec.method == MethodVariant::thm_lik || spec.method == MethodVariant::thm_obs) {
        if (is_regression(spec.endpoint)) {
          est = pcm_closed_regression(hist, curr, RegressionTarget::score_current_given_hist,
                                      stat);
        } else {
          est = stat == Statistic::lik ? pcm_closed_normal(hist, curr, model)
                                       : pcm_closed_obs(hist, curr, model);
        }
      } else {
        est = pcm_monte_carlo(hist, curr, model, stat, spec.mc_draws, s_mc);
      }
      power = PowerAssignment::global(power_from_s(curve, est.distance(), cap));
      break;
    }
  }

  if (power.is_global()) {
    res.alpha = power.global_value();
  } else {
    std::vector<double> a = power.values();
    res.alpha = sample_mean(a);
    res.alpha_min = *std::min_element(a.begin(), a.end());
    res.alpha_max = *std::max_element(a.begin(), a.end());
    res.alpha_median = stats::quantile_type7(a, 0.5);
  }

  PosteriorSummary summary;
  switch (spec.endpoint) {
    case EndpointKind::normal_known_var:
      summary = fit_normal_known_var(hist, curr, c.sigma_h * c.sigma_h, c.sigma_c * c.sigma_c,
                                     power);
      break;
    case EndpointKind::normal_unknown_var:
      summary =
          fit_normal_unknown_var(hist, curr, power, spec.iters, spec.burn_in, s_fit).second;
      break;
    default:
      summary =
          fit_linear_regression(hist, curr, power, spec.iters, spec.burn_in, s_fit).second;
      break;
  }

  res.bias.resize(truth.names.size());
  res.sd.resize(truth.names.size());
  res.cover.resize(truth.names.size());
  res.length.resize(truth.names.size());
  for (std::size_t j = 0; j < truth.names.size(); ++j) {
    const ParameterSummary& p = summary.by_name(truth.names[j]);
    res.bias[j] = std::fabs(p.mean - truth.values[j]);
    res.sd[j] = p.sd;
    res.cover[j] = (truth.values[j] >= p.ci_lower && truth.values[j] <= p.ci_upper) ? 1.0 : 0.0;
    res.length[j] = p.interval_length;
  }
  res.ok = true;
  return res;
}

SweepPointMetrics aggregate(const ScenarioSpec& spec, double sweep_value,
                            const TruthSet& truth, const std::vector<RepResult>& reps) {
  SweepPointMetrics m;
  m.sweep_value = sweep_value;
  m.pointwise = is_pointwise(spec.method);
  m.params.resize(truth.names.size());
  for (std::size_t j = 0; j < truth.names.size(); ++j) m.params[j].name = truth.names[j];

  std::vector<double> alpha_means;
  for (const RepResult& r : reps) {
    if (!r.ok) {
      ++m.n_failed;
      if (m.failure_reasons.size() < 8) m.failure_reasons.push_back(r.reason);
      continue;
    }
    ++m.replicates_used;
    m.avg_power += r.alpha;
    m.prob_complete_borrow += r.alpha > spec.calibration.alpha_c ? 1.0 : 0.0;
    m.prob_discard += r.alpha < spec.calibration.alpha_ic ? 1.0 : 0.0;
    if (m.pointwise) {
      m.avg_alpha_min += r.alpha_min;
      m.avg_alpha_median += r.alpha_median;
      m.avg_alpha_max += r.alpha_max;
      m.avg_alpha_mean += r.alpha;
      alpha_means.push_back(r.alpha);
    }
    for (std::size_t j = 0; j < truth.names.size(); ++j) {
      m.params[j].avg_bias += r.bias[j];
      m.params[j].avg_sd += r.sd[j];
      m.params[j].coverage += r.cover[j];
      m.params[j].avg_interval_length += r.length[j];
    }
  }
  if (m.n_failed > 0 &&
      static_cast<double>(m.n_failed) > 0.01 * static_cast<double>(reps.size())) {
    std::ostringstream msg;
    msg << "scenario '" << spec.name << "': " << m.n_failed << "/" << reps.size()
        << " replicates failed";
    for (const auto& r : m.failure_reasons) msg << "; " << r;
    throw NumericError(msg.str());
  }
  const double used = std::max(1, m.replicates_used);
  m.avg_power /= used;
  m.prob_complete_borrow /= used;
  m.prob_discard /= used;
  if (m.pointwise) {
    m.avg_alpha_min /= used;
    m.avg_alpha_median /= used;
    m.avg_alpha_max /= used;
    m.avg_alpha_mean /= used;
    m.median_alpha_mean = alpha_means.empty() ? 0.0 : stats::quantile_type7(alpha_means, 0.5);
  }
  for (auto& pm : m.params) {
    pm.avg_bias /= used;
    pm.avg_sd /= used;
    pm.coverage /= used;
    pm.avg_interval_length /= used;
  }
  return m;
}

MetricsReport run(const ScenarioSpec& spec, bool parallel) {
  spec.validate();
  MetricsReport report;
  const bool sweeping = spec.sweep_axis != SweepAxis::none;
  const std::vector<double> grid = sweeping ? spec.sweep_grid : std::vector<double>{0.0};
  const RngStream root(spec.seed, 0);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const PointConfig c = at_sweep_value(spec, sweeping ? spec.sweep_axis : SweepAxis::none,
                                         grid[g]);
    CalibrationConfig cal = spec.calibration;
    cal.n_current = c.n;
    const CalibrationCurve curve = solve_sigmoid(cal);
    const TruthSet truth = truth_for(spec, c);
    ScenarioSpec point_spec = spec;
    point_spec.calibration = cal;

    std::vector<RepResult> reps(static_cast<std::size_t>(spec.replicates));
    const RngStream point_root = root.substream(g);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
      for (int k = 0; k < spec.replicates; ++k) {
        try {
          reps[static_cast<std::size_t>(k)] = run_replicate(
              point_spec, c, curve, truth, point_root.substream(static_cast<std::uint64_t>(k)));
        } catch (const std::exception& e) {
          reps[static_cast<std::size_t>(k)].ok = false;
          reps[static_cast<std::size_t>(k)].reason = e.what();
        }
      }
    } else {
      for (int k = 0; k < spec.replicates; ++k) {
        try {
          reps[static_cast<std::size_t>(k)] = run_replicate(
              point_spec, c, curve, truth, point_root.substream(static_cast<std::uint64_t>(k)));
        } catch (const std::exception& e) {
          reps[static_cast<std::size_t>(k)].ok = false;
          reps[static_cast<std::size_t>(k)].reason = e.what();
        }
      }
    }
    report.points.push_back(aggregate(point_spec, sweeping ? grid[g] : 0.0, truth, reps));
  }
  return report;
}

}  // namespace

MetricsReport run_scenario(const ScenarioSpec& spec) { return run(spec, true); }

MetricsReport run_scenario_serial(const ScenarioSpec& spec) { return run(spec, false); }

UniformityResult run_uniformity_demo(int n, int m, int pairs, int mc_draws, RngStream rng) {
  if (pairs < 1) throw ValidationError("uniformity demo requires pairs >= 1");
  if (n < 2 || m < 2) throw ValidationError("uniformity demo requires n, m >= 2");
  UniformityResult out;
  out.naive.resize(static_cast<std::size_t>(pairs));
  out.marginal.resize(static_cast<std::size_t>(pairs));
  const EndpointModel model = EndpointModel::normal_known(0.25, 0.25);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < pairs; ++k) {
    const RngStream base = rng.substream(static_cast<std::uint64_t>(k));
    const Dataset hist = gen_univariate(m, 20.0, 0.5, DataRole::historical, base.substream(0));
    const Dataset curr = gen_univariate(n, 20.0, 0.5, DataRole::current, base.substream(1));
    out.naive[static_cast<std::size_t>(k)] = pcm_naive_vector(
        hist, curr, model, VectorStatistic::mean, 0.5, mc_draws, base.substream(2));
    out.marginal[static_cast<std::size_t>(k)] = pcm_closed_normal(hist, curr, model).value();
  }
  out.ks_naive = ks_distance_uniform(out.naive);
  return out;
}

double ks_distance_uniform(std::vector<double> sample) {
  if (sample.empty()) throw ValidationError("KS distance of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double u = std::clamp(sample[i], 0.0, 1.0);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - u);
    d = std::max(d, u - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical_value(std::size_t n, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("KS level must lie in (0,1)");
  return std::sqrt(-0.5 * std::log(0.5 * level)) / std::sqrt(static_cast<double>(n));
}

}  // namespace ppdcpp::sim
