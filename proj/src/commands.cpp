#include "ppdcpp/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "ppdcpp/errors.hpp"
#include "ppdcpp/posterior.hpp"
#include "ppdcpp/scenario_io.hpp"
#include "ppdcpp/version.hpp"

namespace ppdcpp::io {

void AnalysisConfig::validate() const {
  if (mode == PowerMode::pointwise && endpoint != EndpointKind::linear_regression) {
    throw ValidationError("pointwise mode requires the linear_regression endpoint");
  }
  if (endpoint == EndpointKind::poisson_regression && estimator == Estimator::thm) {
    throw ValidationError("the poisson endpoint has no closed form; use estimator=sim");
  }
  if (endpoint == EndpointKind::normal_known_var &&
      (!(sigma2_hist > 0.0) || !(sigma2_curr > 0.0))) {
    throw ValidationError("known-variance endpoint requires sigma2-hist and sigma2-curr > 0");
  }
  if (mc_draws < 1) throw ValidationError("mc-draws must be >= 1");
  if (burn_in < 0 || iters <= burn_in) throw ValidationError("iters must exceed burn-in");
  if (power_override && !(*power_override >= 0.0 && *power_override <= 1.0)) {
    throw ValidationError("power override must lie in [0,1]");
  }
}

ordered_json provenance(const std::string& command, std::uint64_t seed,
                        const ordered_json& config_echo) {
  ordered_json p;
  p["version"] = kVersion;
  p["command"] = command;
  p["seed"] = seed;
  p["config"] = config_echo;
  return p;
}

std::string resolve_out_path(const std::string& name) {
  if (name.empty() || name.front() == '/') return name;
  const char* dir = std::getenv("PPDCPP_OUT_DIR");
  if (!dir || !*dir) return name;
  std::string d(dir);
  if (d.back() != '/') d += '/';
  return d + name;
}

void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("short write to '" + path + "'");
}

namespace {

ordered_json config_echo(const AnalysisConfig& c) {
  ordered_json j;
  j["endpoint"] = to_string(c.endpoint);
  j["statistic"] = to_string(c.statistic);
  j["estimator"] = to_string(c.estimator);
  j["mode"] = c.mode == PowerMode::global ? "global" : "pointwise";
  j["calibration"] = ordered_json{{"alpha_c", c.calibration.alpha_c},
                                  {"alpha_ic", c.calibration.alpha_ic},
                                  {"tau", c.calibration.tau},
                                  {"ci_method", to_string(c.calibration.ci_method)},
                                  {"ci_level", c.calibration.ci_level},
                                  {"mode", to_string(c.calibration.mode)}};
  j["mc_draws"] = c.mc_draws;
  j["iters"] = c.iters;
  j["burn_in"] = c.burn_in;
  j["cap_power"] = c.cap_power;
  if (c.power_override) j["power_override"] = *c.power_override;
  if (c.endpoint == EndpointKind::normal_known_var) {
    j["sigma2_hist"] = c.sigma2_hist;
    j["sigma2_curr"] = c.sigma2_curr;
  }
  j["hist"] = c.hist_path;
  j["curr"] = c.curr_path;
  j["response"] = c.schema.response;
  j["covariates"] = c.schema.covariates;
  return j;
}

struct LoadedData {
  Dataset hist, curr;
};

LoadedData load_data(const AnalysisConfig& c) {
  LoadedData d;
  d.hist = ingest_csv(c.hist_path, c.schema, DataRole::historical);
  d.curr = ingest_csv(c.curr_path, c.schema, DataRole::current);
  const bool needs_x = c.endpoint == EndpointKind::linear_regression ||
                       c.endpoint == EndpointKind::poisson_regression;
  if (needs_x && !d.hist.has_covariates()) {
    throw ValidationError("this endpoint requires covariate columns (--covariates)");
  }
  if (!needs_x && d.hist.has_covariates()) {
    throw ValidationError("covariates supplied for an endpoint without covariates");
  }
  return d;
}

EndpointModel model_of(const AnalysisConfig& c) {
  switch (c.endpoint) {
    case EndpointKind::normal_known_var:
      return EndpointModel::normal_known(c.sigma2_hist, c.sigma2_curr);
    case EndpointKind::normal_unknown_var:
      return EndpointModel::normal_unknown();
    case EndpointKind::linear_regression:
      return EndpointModel::regression();
    case EndpointKind::poisson_regression:
      return EndpointModel::poisson();
  }
  return EndpointModel::normal_unknown();
}

CongruenceEstimate estimate_pcm(const AnalysisConfig& c, const LoadedData& d) {
  const EndpointModel model = model_of(c);
  if (c.estimator == Estimator::sim) {
    return pcm_monte_carlo(d.hist, d.curr, model, c.statistic, c.mc_draws,
                           RngStream(c.seed, 0).substream(1));
  }
  if (c.endpoint == EndpointKind::linear_regression) {
    return pcm_closed_regression(d.hist, d.curr, RegressionTarget::score_current_given_hist,
                                 c.statistic);
  }
  return c.statistic == Statistic::lik ? pcm_closed_normal(d.hist, d.curr, model)
                                       : pcm_closed_obs(d.hist, d.curr, model);
}

ordered_json pcm_block(const CongruenceEstimate& est) {
  ordered_json j;
  j["p_cm"] = est.aggregate_p ? ordered_json(*est.aggregate_p) : ordered_json(nullptr);
  j["s"] = est.aggregate_p ? ordered_json(std::fabs(*est.aggregate_p - 0.5)) : ordered_json(nullptr);
  j["statistic"] = to_string(est.statistic);
  j["estimator"] = to_string(est.estimator);
  if (est.mc_draws) j["mc_draws"] = *est.mc_draws;
  if (est.pointwise) {
    j["pointwise_p_cm"] = est.p_cm;
    j["pointwise_s"] = est.distance_s;
  }
  if (!est.notes.empty()) j["notes"] = est.notes;
  return j;
}

ordered_json curve_block(const CalibrationCurve& curve) {
  ordered_json j;
  j["a"] = curve.a;
  j["b"] = curve.b;
  j["g1"] = curve.g1;
  j["g2"] = curve.g2;
  j["k1"] = curve.k1;
  j["k2"] = curve.k2;
  j["n_current"] = curve.config.n_current;
  j["mode"] = to_string(curve.config.mode);
  return j;
}

ordered_json summary_block(const PosteriorSummary& s) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : s.params) {
    arr.push_back(ordered_json{{"name", p.name},
                               {"mean", p.mean},
                               {"sd", p.sd},
                               {"ci95_lower", p.ci_lower},
                               {"ci95_upper", p.ci_upper},
                               {"interval_length", p.interval_length}});
  }
  return arr;
}

void maybe_write(const AnalysisConfig& c, const ordered_json& out) {
  if (!c.out_path.empty()) write_json_file(resolve_out_path(c.out_path), out);
}

}  // namespace

ordered_json cmd_pcm(const AnalysisConfig& config) {
  config.validate();
  const LoadedData d = load_data(config);
  const CongruenceEstimate est = estimate_pcm(config, d);
  ordered_json out = pcm_block(est);
  out["provenance"] = provenance("pcm", config.seed, config_echo(config));
  maybe_write(config, out);
  return out;
}

ordered_json cmd_analyze(const AnalysisConfig& config) {
  config.validate();
  const LoadedData d = load_data(config);
  const std::size_t n = d.curr.size();
  const std::size_t m = d.hist.size();

  ordered_json out;
  CalibrationConfig cal = config.calibration;
  cal.n_current = static_cast<long>(n);
  const std::optional<double> cap =
      config.cap_power
          ? std::optional<double>(std::min(1.0, static_cast<double>(n) / static_cast<double>(m)))
          : std::nullopt;

  PowerAssignment power = PowerAssignment::global(0.0);
  if (config.power_override) {
    power = PowerAssignment::global(*config.power_override);
    out["power"] = ordered_json{{"kind", "global"},
                                {"alpha", *config.power_override},
                                {"source", "override"}};
  } else {
    const CalibrationCurve curve = solve_sigmoid(cal);
    out["curve"] = curve_block(curve);
    if (config.mode == PowerMode::pointwise) {
      power = assign_pointwise_powers(d.hist, d.curr, curve, config.statistic, cap);
      const std::vector<double>& a = power.values();
      out["power"] =
          ordered_json{{"kind", "pointwise"}, {"alphas", a}, {"mean", sample_mean(a)}};
      // Report the congruence of the scored historical rows alongside.
      out["p_cm"] = pcm_block(pcm_closed_regression(
          d.hist, d.curr, RegressionTarget::score_hist_given_current, config.statistic));
    } else {
      const CongruenceEstimate est = estimate_pcm(config, d);
      out["p_cm"] = pcm_block(est);
      const double alpha = power_from_s(curve, est.distance(), cap);
      power = PowerAssignment::global(alpha);
      out["power"] = ordered_json{{"kind", "global"}, {"alpha", alpha}};
    }
  }

  const RngStream fit_stream = RngStream(config.seed, 0).substream(2);
  PosteriorSummary summary;
  std::optional<double> acceptance;
  switch (config.endpoint) {
    case EndpointKind::normal_known_var:
      summary = fit_normal_known_var(d.hist, d.curr, config.sigma2_hist, config.sigma2_curr,
                                     power);
      break;
    case EndpointKind::normal_unknown_var:
      summary = fit_normal_unknown_var(d.hist, d.curr, power, config.iters, config.burn_in,
                                       fit_stream)
                    .second;
      break;
    case EndpointKind::linear_regression:
      summary = fit_linear_regression(d.hist, d.curr, power, config.iters, config.burn_in,
                                      fit_stream)
                    .second;
      break;
    case EndpointKind::poisson_regression: {
      auto [draws, s] = fit_poisson_regression_mh(d.hist, d.curr, power, config.iters,
                                                  config.burn_in, config.proposal_scale,
                                                  fit_stream);
      acceptance = draws.acceptance_rate;
      summary = std::move(s);
      break;
    }
  }
  out["posterior"] = summary_block(summary);
  if (acceptance) out["acceptance_rate"] = *acceptance;
  out["provenance"] = provenance("analyze", config.seed, config_echo(config));
  maybe_write(config, out);
  return out;
}

ordered_json cmd_curve(const CalibrationConfig& config, int grid_points,
                       const std::string& out_csv) {
  CalibrationConfig adjusted = config;
  adjusted.mode = CalibrationMode::k_adjusted;
  CalibrationConfig unadjusted = config;
  unadjusted.mode = CalibrationMode::unadjusted;
  const CalibrationCurve curve_adj = solve_sigmoid(adjusted);
  const CalibrationCurve curve_un = solve_sigmoid(unadjusted);
  const CurveTable t_adj = emit_curve(curve_adj, grid_points);
  const CurveTable t_un = emit_curve(curve_un, grid_points);

  ordered_json out;
  out["k_adjusted"] = curve_block(curve_adj);
  out["k_adjusted"]["s_cross_alpha_c"] = t_adj.s_cross_alpha_c;
  out["k_adjusted"]["s_cross_alpha_ic"] = t_adj.s_cross_alpha_ic;
  out["unadjusted"] = curve_block(curve_un);
  out["unadjusted"]["s_cross_alpha_c"] = t_un.s_cross_alpha_c;
  out["unadjusted"]["s_cross_alpha_ic"] = t_un.s_cross_alpha_ic;

  if (!out_csv.empty()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < t_adj.rows.size(); ++i) {
      rows.push_back({t_adj.rows[i].first, t_adj.rows[i].second, t_un.rows[i].second});
    }
    write_table_csv(resolve_out_path(out_csv), {"s", "alpha_k_adjusted", "alpha_unadjusted"},
                    rows);
    out["csv"] = out_csv;
  }
  ordered_json echo;
  echo["n_current"] = config.n_current;
  echo["alpha_c"] = config.alpha_c;
  echo["alpha_ic"] = config.alpha_ic;
  echo["tau"] = config.tau;
  echo["ci_method"] = to_string(config.ci_method);
  echo["ci_level"] = config.ci_level;
  echo["grid_points"] = grid_points;
  out["provenance"] = provenance("calibrate", 0, echo);
  return out;
}

ordered_json cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                          bool serial) {
  const std::vector<sim::ScenarioSpec> specs = scenarios_from_file(scenario_path);
  ordered_json outputs = ordered_json::array();
  for (const auto& spec : specs) {
    const sim::MetricsReport report =
        serial ? sim::run_scenario_serial(spec) : sim::run_scenario(spec);
    std::string stem = "scenario-" + spec.name + "-" + std::to_string(spec.seed);
    std::string base = out_dir.empty() ? resolve_out_path(stem) : out_dir + "/" + stem;
    write_metrics_csv(base + ".csv", report);
    ordered_json summary;
    summary["scenario"] = scenario_to_json(spec);
    summary["metrics"] = metrics_to_json(report);
    summary["provenance"] = provenance("simulate", spec.seed, scenario_to_json(spec));
    write_json_file(base + ".json", summary);
    for (const auto& p : report.points) {
      std::cout << spec.name << " sweep=" << p.sweep_value << " avg_power=" << p.avg_power
                << " complete=" << p.prob_complete_borrow << " discard=" << p.prob_discard
                << " used=" << p.replicates_used << "\n";
    }
    outputs.push_back(ordered_json{{"name", spec.name},
                                   {"csv", base + ".csv"},
                                   {"json", base + ".json"},
                                   {"points", report.points.size()}});
  }
  ordered_json out;
  out["outputs"] = outputs;
  out["provenance"] = provenance("simulate", 0, ordered_json{{"scenario_file", scenario_path}});
  return out;
}

ordered_json cmd_uniformity(int n, int m, int pairs, int mc_draws, std::uint64_t seed,
                            const std::string& out_csv) {
  const sim::UniformityResult res =
      sim::run_uniformity_demo(n, m, pairs, mc_draws, RngStream(seed, 0));
  ordered_json out;
  out["pairs"] = pairs;
  out["ks_naive"] = res.ks_naive;
  out["ks_critical_1pct"] = sim::ks_critical_value(res.naive.size(), 0.01);
  std::vector<double> marg = res.marginal;
  out["marginal_sd"] = std::sqrt(sample_variance(marg));
  out["marginal_mean"] = sample_mean(marg);
  if (!out_csv.empty()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < res.naive.size(); ++i) {
      rows.push_back({static_cast<double>(i), res.naive[i], res.marginal[i]});
    }
    write_table_csv(resolve_out_path(out_csv), {"pair", "naive_p", "marginal_p"}, rows);
    out["csv"] = out_csv;
  }
  ordered_json echo;
  echo["n"] = n;
  echo["m"] = m;
  echo["pairs"] = pairs;
  echo["mc_draws"] = mc_draws;
  out["provenance"] = provenance("uniformity", seed, echo);
  return out;
}

}  // namespace ppdcpp::io
