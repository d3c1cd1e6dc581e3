#include "ppdcpp/scenario_io.hpp"

#include <fstream>

#include "ppdcpp/csv.hpp"
#include "ppdcpp/errors.hpp"

namespace ppdcpp::io {

namespace {

const nlohmann::json* find_field(const nlohmann::json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

template <class T>
void read_field(const nlohmann::json& j, const std::string& key, T& out,
                const std::string& prefix) {
  const nlohmann::json* f = find_field(j, key);
  if (!f) return;
  try {
    out = f->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("bad value at " + prefix + "." + key);
  }
}

CalibrationConfig calibration_from_json(const nlohmann::json& j, const std::string& prefix) {
  CalibrationConfig c;
  read_field(j, "alpha_c", c.alpha_c, prefix);
  read_field(j, "alpha_ic", c.alpha_ic, prefix);
  read_field(j, "tau", c.tau, prefix);
  read_field(j, "ci_level", c.ci_level, prefix);
  read_field(j, "conservative_k1_zero", c.conservative_k1_zero, prefix);
  if (const auto* f = find_field(j, "ci_method")) {
    c.ci_method = ci_method_from_string(f->get<std::string>());
  }
  if (const auto* f = find_field(j, "mode")) {
    c.mode = calibration_mode_from_string(f->get<std::string>());
  }
  return c;
}

ordered_json calibration_to_json(const CalibrationConfig& c) {
  ordered_json j;
  j["alpha_c"] = c.alpha_c;
  j["alpha_ic"] = c.alpha_ic;
  j["tau"] = c.tau;
  j["ci_method"] = to_string(c.ci_method);
  j["ci_level"] = c.ci_level;
  j["mode"] = to_string(c.mode);
  j["conservative_k1_zero"] = c.conservative_k1_zero;
  return j;
}

}  // namespace

ordered_json scenario_to_json(const sim::ScenarioSpec& s) {
  ordered_json j;
  j["name"] = s.name;
  j["endpoint"] = to_string(s.endpoint);
  j["mu_h"] = s.mu_h;
  j["mu_c"] = s.mu_c;
  j["sigma_h"] = s.sigma_h;
  j["sigma_c"] = s.sigma_c;
  if (!s.beta_h.empty()) j["beta_h"] = s.beta_h;
  if (!s.beta_c.empty()) j["beta_c"] = s.beta_c;
  j["bern_p_hist"] = s.bern_p_hist;
  j["bern_p_curr"] = s.bern_p_curr;
  j["du_lo"] = s.du_lo;
  j["du_hi"] = s.du_hi;
  j["m"] = s.m;
  j["n"] = s.n;
  j["method"] = to_string(s.method);
  j["replicates"] = s.replicates;
  j["calibration"] = calibration_to_json(s.calibration);
  if (s.sweep_axis != sim::SweepAxis::none) {
    j["sweep"] = ordered_json{{"axis", to_string(s.sweep_axis)}, {"grid", s.sweep_grid}};
  }
  j["mc_draws"] = s.mc_draws;
  j["iters"] = s.iters;
  j["burn_in"] = s.burn_in;
  j["cap_power"] = s.cap_power;
  j["seed"] = s.seed;
  return j;
}

sim::ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::string& prefix) {
  if (!j.is_object()) throw ValidationError("expected an object at " + prefix);
  sim::ScenarioSpec s;
  read_field(j, "name", s.name, prefix);
  if (const auto* f = find_field(j, "endpoint")) {
    s.endpoint = endpoint_from_string(f->get<std::string>());
  }
  read_field(j, "mu_h", s.mu_h, prefix);
  read_field(j, "mu_c", s.mu_c, prefix);
  read_field(j, "sigma_h", s.sigma_h, prefix);
  read_field(j, "sigma_c", s.sigma_c, prefix);
  read_field(j, "beta_h", s.beta_h, prefix);
  read_field(j, "beta_c", s.beta_c, prefix);
  read_field(j, "bern_p_hist", s.bern_p_hist, prefix);
  read_field(j, "bern_p_curr", s.bern_p_curr, prefix);
  read_field(j, "du_lo", s.du_lo, prefix);
  read_field(j, "du_hi", s.du_hi, prefix);
  read_field(j, "m", s.m, prefix);
  read_field(j, "n", s.n, prefix);
  if (const auto* f = find_field(j, "method")) {
    s.method = sim::method_from_string(f->get<std::string>());
  }
  read_field(j, "replicates", s.replicates, prefix);
  if (const auto* f = find_field(j, "calibration")) {
    s.calibration = calibration_from_json(*f, prefix + ".calibration");
  }
  if (const auto* f = find_field(j, "sweep")) {
    if (!f->is_object()) throw ValidationError("expected an object at " + prefix + ".sweep");
    std::string axis;
    read_field(*f, "axis", axis, prefix + ".sweep");
    s.sweep_axis = sim::sweep_axis_from_string(axis);
    read_field(*f, "grid", s.sweep_grid, prefix + ".sweep");
  }
  read_field(j, "mc_draws", s.mc_draws, prefix);
  read_field(j, "iters", s.iters, prefix);
  read_field(j, "burn_in", s.burn_in, prefix);
  read_field(j, "cap_power", s.cap_power, prefix);
  read_field(j, "seed", s.seed, prefix);
  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + ": " + e.what());
  }
  return s;
}

std::vector<sim::ScenarioSpec> scenarios_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  std::vector<nlohmann::json> raw;
  std::vector<std::string> prefixes;
  if (j.is_object() && j.contains("scenarios")) {
    if (!j["scenarios"].is_array()) throw ValidationError("$.scenarios must be an array");
    std::size_t idx = 0;
    for (const auto& item : j["scenarios"]) {
      raw.push_back(item);
      prefixes.push_back("$.scenarios[" + std::to_string(idx++) + "]");
    }
  } else {
    raw.push_back(j);
    prefixes.push_back("$");
  }
  std::vector<sim::ScenarioSpec> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    // "methods" fans one scenario out into one copy per method.
    if (raw[i].is_object() && raw[i].contains("methods")) {
      const auto methods = raw[i]["methods"];
      if (!methods.is_array()) {
        throw ValidationError(prefixes[i] + ".methods must be an array");
      }
      nlohmann::json base = raw[i];
      base.erase("methods");
      for (const auto& mth : methods) {
        base["method"] = mth;
        sim::ScenarioSpec s = scenario_from_json(base, prefixes[i]);
        s.name += "-" + to_string(s.method);
        out.push_back(std::move(s));
      }
    } else {
      out.push_back(scenario_from_json(raw[i], prefixes[i]));
    }
  }
  return out;
}

ordered_json metrics_to_json(const sim::MetricsReport& report) {
  ordered_json points = ordered_json::array();
  for (const auto& p : report.points) {
    ordered_json pj;
    pj["sweep_value"] = p.sweep_value;
    pj["replicates_used"] = p.replicates_used;
    pj["n_failed"] = p.n_failed;
    if (!p.failure_reasons.empty()) pj["failure_reasons"] = p.failure_reasons;
    pj["avg_power"] = p.avg_power;
    pj["prob_complete_borrow"] = p.prob_complete_borrow;
    pj["prob_discard"] = p.prob_discard;
    if (p.pointwise) {
      pj["avg_alpha_min"] = p.avg_alpha_min;
      pj["avg_alpha_median"] = p.avg_alpha_median;
      pj["avg_alpha_max"] = p.avg_alpha_max;
      pj["avg_alpha_mean"] = p.avg_alpha_mean;
      pj["median_alpha_mean"] = p.median_alpha_mean;
    }
    ordered_json params = ordered_json::array();
    for (const auto& pm : p.params) {
      params.push_back(ordered_json{{"name", pm.name},
                                    {"avg_bias", pm.avg_bias},
                                    {"avg_sd", pm.avg_sd},
                                    {"coverage", pm.coverage},
                                    {"avg_interval_length", pm.avg_interval_length}});
    }
    pj["params"] = params;
    points.push_back(pj);
  }
  ordered_json out;
  out["points"] = points;
  return out;
}

void write_metrics_csv(const std::string& path, const sim::MetricsReport& report) {
  std::vector<std::string> header = {"sweep_value", "replicates_used", "n_failed",
                                     "avg_power",   "prob_complete_borrow", "prob_discard"};
  const bool pointwise = !report.points.empty() && report.points.front().pointwise;
  if (pointwise) {
    header.insert(header.end(), {"avg_alpha_min", "avg_alpha_median", "avg_alpha_max",
                                 "avg_alpha_mean", "median_alpha_mean"});
  }
  if (!report.points.empty()) {
    for (const auto& pm : report.points.front().params) {
      header.push_back("avg_bias_" + pm.name);
      header.push_back("avg_sd_" + pm.name);
      header.push_back("coverage_" + pm.name);
      header.push_back("avg_interval_length_" + pm.name);
    }
  }
  std::vector<std::vector<double>> rows;
  for (const auto& p : report.points) {
    std::vector<double> row = {p.sweep_value,
                               static_cast<double>(p.replicates_used),
                               static_cast<double>(p.n_failed),
                               p.avg_power,
                               p.prob_complete_borrow,
                               p.prob_discard};
    if (pointwise) {
      row.insert(row.end(), {p.avg_alpha_min, p.avg_alpha_median, p.avg_alpha_max,
                             p.avg_alpha_mean, p.median_alpha_mean});
    }
    for (const auto& pm : p.params) {
      row.insert(row.end(), {pm.avg_bias, pm.avg_sd, pm.coverage, pm.avg_interval_length});
    }
    rows.push_back(std::move(row));
  }
  write_table_csv(path, header, rows);
}

}  // namespace ppdcpp::io
