#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ppdcpp/calibration.hpp"
#include "ppdcpp/congruence.hpp"
#include "ppdcpp/csv.hpp"

namespace ppdcpp::io {

enum class PowerMode { global, pointwise };

// Everything one analysis run needs; the CLI maps its flags onto this.
struct AnalysisConfig {
  EndpointKind endpoint = EndpointKind::normal_unknown_var;
  Statistic statistic = Statistic::lik;
  Estimator estimator = Estimator::thm;
  PowerMode mode = PowerMode::global;

  CalibrationConfig calibration;  // n_current filled from the current data
  int mc_draws = 5000;
  int iters = 6500;
  int burn_in = 1500;
  double proposal_scale = 0.0;
  bool cap_power = false;
  std::optional<double> power_override;

  double sigma2_hist = 0.0;  // known-variance endpoint only
  double sigma2_curr = 0.0;

  std::uint64_t seed = 0;
  bool seed_given = false;

  std::string hist_path, curr_path, out_path;
  CsvSchema schema;

  void validate() const;
};

using ordered_json = nlohmann::ordered_json;

// Estimate the congruence measure for two CSVs.
ordered_json cmd_pcm(const AnalysisConfig& config);

// Full pipeline: congruence -> calibration -> power -> posterior fit.
ordered_json cmd_analyze(const AnalysisConfig& config);

// Calibration curve table (k-adjusted and unadjusted side by side). Writes
// a CSV when out_csv is nonempty.
ordered_json cmd_curve(const CalibrationConfig& config, int grid_points,
                       const std::string& out_csv);

// Run every scenario in a file; one CSV + JSON summary pair per scenario,
// named scenario-<name>-<seed>.{csv,json} under out_dir.
ordered_json cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                          bool serial);

// Whole-vector vs marginal congruence on congruent pairs.
ordered_json cmd_uniformity(int n, int m, int pairs, int mc_draws, std::uint64_t seed,
                            const std::string& out_csv);

// Shared provenance block: version, command name, seed, config echo.
ordered_json provenance(const std::string& command, std::uint64_t seed,
                        const ordered_json& config_echo);

// Resolve a file name against the default output directory (PPDCPP_OUT_DIR
// or "."), leaving absolute paths alone.
std::string resolve_out_path(const std::string& name);

void write_json_file(const std::string& path, const ordered_json& j);

}  // namespace ppdcpp::io
