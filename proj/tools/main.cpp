#include <cstdint>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppdcpp/commands.hpp"
#include "ppdcpp/errors.hpp"
#include "ppdcpp/version.hpp"

namespace {

using ppdcpp::io::AnalysisConfig;
using ppdcpp::io::ordered_json;

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void add_data_flags(CLI::App* cmd, AnalysisConfig& cfg, std::string& covariates_csv) {
  cmd->add_option("--hist", cfg.hist_path, "historical data CSV")->required();
  cmd->add_option("--curr", cfg.curr_path, "current data CSV")->required();
  cmd->add_option("--response", cfg.schema.response, "response column name (default y)");
  cmd->add_option("--covariates", covariates_csv, "comma-separated covariate column names");
  cmd->add_option("--sigma2-hist", cfg.sigma2_hist, "known historical variance");
  cmd->add_option("--sigma2-curr", cfg.sigma2_curr, "known current variance");
  cmd->add_option("--out", cfg.out_path, "write the result JSON to this file");
}

void add_method_flags(CLI::App* cmd, AnalysisConfig& cfg, std::string& endpoint,
                      std::string& statistic, std::string& estimator) {
  cmd->add_option("--endpoint", endpoint,
                  "normal_known_var | normal_unknown_var | linear_regression | poisson_regression")
      ->required();
  cmd->add_option("--statistic", statistic, "lik | obs");
  cmd->add_option("--estimator", estimator, "thm | sim");
  cmd->add_option("--mc-draws", cfg.mc_draws, "monte carlo draws for estimator=sim");
  cmd->add_option("--seed", cfg.seed, "random seed (generated and echoed when omitted)");
}

void add_calibration_flags(CLI::App* cmd, ppdcpp::CalibrationConfig& cal, std::string& ci_method,
                           std::string& mode) {
  cmd->add_option("--alpha-c", cal.alpha_c, "target power under congruence");
  cmd->add_option("--alpha-ic", cal.alpha_ic, "target power under incongruence");
  cmd->add_option("--tau", cal.tau, "confidence parameter");
  cmd->add_option("--ci-method", ci_method, "clopper_pearson | wald");
  cmd->add_option("--ci-level", cal.ci_level, "confidence level for the k factors");
  cmd->add_option("--calibration-mode", mode, "k_adjusted | unadjusted");
  cmd->add_flag("--conservative-k1-zero", cal.conservative_k1_zero,
                "force k1 = 0 with a 1/(2 n tau) floor");
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> names;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) names.push_back(cur);
  return names;
}

void finalize_config(AnalysisConfig& cfg, const std::string& covariates_csv,
                     const std::string& endpoint, const std::string& statistic,
                     const std::string& estimator, const std::string& ci_method,
                     const std::string& cal_mode, const std::string& power_mode,
                     bool seed_given) {
  cfg.schema.covariates = split_names(covariates_csv);
  cfg.endpoint = ppdcpp::endpoint_from_string(endpoint);
  cfg.statistic = ppdcpp::statistic_from_string(statistic);
  cfg.estimator = ppdcpp::estimator_from_string(estimator);
  cfg.calibration.ci_method = ppdcpp::ci_method_from_string(ci_method);
  cfg.calibration.mode = ppdcpp::calibration_mode_from_string(cal_mode);
  cfg.mode = power_mode == "pointwise" ? ppdcpp::io::PowerMode::pointwise
                                       : ppdcpp::io::PowerMode::global;
  cfg.seed_given = seed_given;
  if (!seed_given) cfg.seed = fresh_seed();
}

int run(int argc, char** argv) {
  CLI::App app{"Congruence-calibrated power-prior analysis"};
  app.set_version_flag("--version", ppdcpp::kVersion);
  app.require_subcommand(1);

  AnalysisConfig cfg;
  std::string covariates_csv, endpoint, statistic = "lik", estimator = "thm";
  std::string ci_method = "clopper_pearson", cal_mode = "k_adjusted", power_mode = "global";

  CLI::App* pcm = app.add_subcommand("pcm", "estimate the congruence measure");
  add_data_flags(pcm, cfg, covariates_csv);
  add_method_flags(pcm, cfg, endpoint, statistic, estimator);

  CLI::App* analyze = app.add_subcommand("analyze", "congruence -> calibration -> posterior");
  add_data_flags(analyze, cfg, covariates_csv);
  add_method_flags(analyze, cfg, endpoint, statistic, estimator);
  add_calibration_flags(analyze, cfg.calibration, ci_method, cal_mode);
  analyze->add_option("--mode", power_mode, "global | pointwise");
  analyze->add_option("--iters", cfg.iters, "sampler iterations");
  analyze->add_option("--burn-in", cfg.burn_in, "burn-in iterations");
  analyze->add_option("--proposal-scale", cfg.proposal_scale, "initial Metropolis scale");
  analyze->add_flag("--cap", cfg.cap_power, "cap the power at n/m");
  double power_override = -1.0;
  CLI::Option* ovr = analyze->add_option("--power", power_override,
                                         "skip calibration and use this power directly");

  ppdcpp::CalibrationConfig curve_cfg;
  int grid_points = 200;
  std::string curve_csv;
  std::string curve_ci_method = "clopper_pearson", curve_mode = "k_adjusted";
  CLI::App* curve = app.add_subcommand("calibrate", "emit the calibration curve");
  curve->add_option("--n", curve_cfg.n_current, "current sample size")->required();
  add_calibration_flags(curve, curve_cfg, curve_ci_method, curve_mode);
  curve->add_option("--grid-points", grid_points, "number of s grid points");
  curve->add_option("--out", curve_csv, "write the (s, alpha) table to this CSV");

  std::string scenario_path, out_dir;
  bool serial = false;
  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario file");
  simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--out-dir", out_dir, "output directory (default PPDCPP_OUT_DIR or .)");
  simulate->add_flag("--serial", serial, "single-threaded reference run");

  int un_n = 50, un_m = 50, un_pairs = 500, un_draws = 5000;
  std::uint64_t un_seed = 0;
  bool un_seed_given = false;
  std::string un_csv;
  CLI::App* uniformity = app.add_subcommand("uniformity", "whole-vector vs marginal null behavior");
  uniformity->add_option("--n", un_n, "current sample size");
  uniformity->add_option("--m", un_m, "historical sample size");
  uniformity->add_option("--pairs", un_pairs, "number of congruent pairs");
  uniformity->add_option("--mc-draws", un_draws, "replicate vectors per pair");
  CLI::Option* us = uniformity->add_option("--seed", un_seed, "random seed");
  uniformity->add_option("--out", un_csv, "write per-pair p values to this CSV");

  CLI11_PARSE(app, argc, argv);

  ordered_json out;
  if (pcm->parsed() || analyze->parsed()) {
    CLI::App* active = pcm->parsed() ? pcm : analyze;
    finalize_config(cfg, covariates_csv, endpoint, statistic, estimator, ci_method, cal_mode,
                    power_mode, active->count("--seed") > 0);
    if (analyze->parsed()) {
      if (ovr->count()) cfg.power_override = power_override;
      out = ppdcpp::io::cmd_analyze(cfg);
    } else {
      out = ppdcpp::io::cmd_pcm(cfg);
    }
  } else if (curve->parsed()) {
    curve_cfg.ci_method = ppdcpp::ci_method_from_string(curve_ci_method);
    curve_cfg.mode = ppdcpp::calibration_mode_from_string(curve_mode);
    out = ppdcpp::io::cmd_curve(curve_cfg, grid_points, curve_csv);
  } else if (simulate->parsed()) {
    out = ppdcpp::io::cmd_simulate(scenario_path, out_dir, serial);
  } else if (uniformity->parsed()) {
    un_seed_given = us->count() > 0;
    if (!un_seed_given) un_seed = fresh_seed();
    out = ppdcpp::io::cmd_uniformity(un_n, un_m, un_pairs, un_draws, un_seed, un_csv);
  }
  std::cout << out.dump(2) << std::endl;
  return 0;
}

ordered_json error_json(const std::string& stage, const std::string& message) {
  ordered_json j;
  j["error"] = ordered_json{{"stage", stage}, {"message", message}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ppdcpp::ValidationError& e) {
    std::cout << error_json("validation", e.what()).dump(2) << std::endl;
    return 2;
  } catch (const ppdcpp::NumericError& e) {
    std::cout << error_json("numerical", e.what()).dump(2) << std::endl;
    return 3;
  } catch (const ppdcpp::IoError& e) {
    std::cout << error_json("io", e.what()).dump(2) << std::endl;
    return 4;
  } catch (const std::exception& e) {
    std::cout << error_json("internal", e.what()).dump(2) << std::endl;
    return 3;
  }
}
