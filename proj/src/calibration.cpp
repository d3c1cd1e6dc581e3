#include "ppdcpp/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "ppdcpp/errors.hpp"

namespace ppdcpp {

void CalibrationConfig::validate() const {
  if (n_current < 2) throw ValidationError("calibration requires n_current >= 2");
  if (!(alpha_c > 0.0 && alpha_c < 1.0) || !(alpha_ic > 0.0 && alpha_ic < 1.0)) {
    throw ValidationError("alpha_c and alpha_ic must lie in (0,1)");
  }
  if (!(alpha_ic < alpha_c)) throw ValidationError("alpha_ic must be below alpha_c");
  if (!(tau >= 1.0)) throw ValidationError("tau must be >= 1");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw ValidationError("ci_level must lie in (0,1)");
}

std::pair<double, double> compute_k_factors(const CalibrationConfig& config) {
  config.validate();
  const long n = config.n_current;
  // Congruent proportion 1/2, evaluated at the expected count.
  const long w1 = static_cast<long>(std::llround(0.5 * static_cast<double>(n)));
  const stats::BinomialCi ci1 = stats::binom_ci(n, w1, config.ci_level, config.ci_method);
  const double k1 =
      std::max(std::fabs(ci1.lower - 0.5), std::fabs(ci1.upper - 0.5)) / config.tau;
  // Incongruent proportion 1, expected count n. The Wald interval collapses
  // there, leaving k2 = 1/(2 tau) from the |1 - 1/2| deviation.
  const stats::BinomialCi ci2 = stats::binom_ci(n, n, config.ci_level, config.ci_method);
  const double k2 =
      std::max(std::fabs(ci2.lower - 0.5), std::fabs(ci2.upper - 0.5)) / config.tau;
  return {k1, k2};
}

std::pair<double, double> solve_sigmoid_anchors(double alpha_c, double alpha_ic, double g1,
                                                double g2) {
  if (!(g1 > 0.0) || !(g2 > 0.0)) {
    throw NumericError("calibration anchor hit zero; use the k-adjusted mode");
  }
  if (!(g1 < g2)) {
    throw NumericError("calibration infeasible: congruent anchor must lie below incongruent anchor");
  }
  if (!(alpha_ic < alpha_c)) {
    throw NumericError("calibration infeasible: alpha_c must exceed alpha_ic");
  }
  const double num = std::log(((1.0 - alpha_c) * alpha_ic) / ((1.0 - alpha_ic) * alpha_c));
  const double b = num / (std::log(g1) - std::log(g2));
  const double a = std::log((1.0 - alpha_c) / alpha_c) - b * std::log(g1);
  if (!(b > 0.0)) throw NumericError("calibration produced a non-positive slope");
  return {a, b};
}

CalibrationCurve solve_sigmoid(const CalibrationConfig& config) {
  config.validate();
  CalibrationCurve curve;
  curve.config = config;
  if (config.mode == CalibrationMode::k_adjusted) {
    auto [k1, k2] = compute_k_factors(config);
    curve.k1 = k1;
    curve.k2 = k2;
    if (config.conservative_k1_zero) {
      curve.k1 = 0.0;
      curve.g1 = 1.0 / (2.0 * static_cast<double>(config.n_current) * config.tau);
    } else {
      // |E(W^C/n) + k1 - 1/2| with E(W^C/n) = 1/2 exactly.
      curve.g1 = k1;
    }
    if (!(k2 < 0.5)) throw NumericError("k2 >= 1/2 leaves no incongruent anchor");
    // |E(W^IC/n) - k2 - 1/2| with E(W^IC/n) = 1.
    curve.g2 = 0.5 - curve.k2;
  } else {
    // The literal expectation-based anchor |E(W^C/n) - 1/2| is identically
    // zero, so the unadjusted mode anchors at the exact mean absolute
    // deviation of W^C/n instead, keeping the curve finite while borrowing
    // less aggressively than the k-adjusted one.
    curve.k1 = 0.0;
    curve.k2 = 0.0;
    curve.g1 = stats::binom_abs_dev_expectation(config.n_current, 0.5);
    curve.g2 = 0.5;
  }
  auto [a, b] = solve_sigmoid_anchors(config.alpha_c, config.alpha_ic, curve.g1, curve.g2);
  curve.a = a;
  curve.b = b;
  return curve;
}

double power_from_s(const CalibrationCurve& curve, double s, std::optional<double> cap) {
  if (!std::isfinite(s) || s < 0.0) throw ValidationError("distance s must be finite and >= 0");
  double alpha;
  if (s == 0.0) {
    alpha = 1.0;  // left limit, since b > 0
  } else {
    const double t = curve.a + curve.b * std::log(s);
    if (t > 700.0) {
      alpha = 0.0;
    } else if (t < -700.0) {
      alpha = 1.0;
    } else {
      alpha = 1.0 / (1.0 + std::exp(t));
    }
  }
  if (cap) {
    if (!(*cap > 0.0 && *cap <= 1.0)) throw ValidationError("power cap must lie in (0,1]");
    alpha = std::min(alpha, *cap);
  }
  return alpha;
}

CurveTable emit_curve(const CalibrationCurve& curve, int grid_points) {
  if (grid_points < 2) throw ValidationError("emit_curve requires at least 2 grid points");
  CurveTable table;
  table.rows.reserve(static_cast<std::size_t>(grid_points));
  const double s_min = 1e-4;  // stands in for the open left endpoint
  const double step = (0.5 - s_min) / static_cast<double>(grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double s = s_min + step * static_cast<double>(i);
    table.rows.emplace_back(s, power_from_s(curve, s));
  }
  const auto cross = [&](double alpha) {
    return std::exp((std::log((1.0 - alpha) / alpha) - curve.a) / curve.b);
  };
  table.s_cross_alpha_c = cross(curve.config.alpha_c);
  table.s_cross_alpha_ic = cross(curve.config.alpha_ic);
  return table;
}

std::string to_string(CalibrationMode m) {
  return m == CalibrationMode::k_adjusted ? "k_adjusted" : "unadjusted";
}

CalibrationMode calibration_mode_from_string(const std::string& s) {
  if (s == "k_adjusted") return CalibrationMode::k_adjusted;
  if (s == "unadjusted") return CalibrationMode::unadjusted;
  throw ValidationError("unknown calibration mode: " + s);
}

std::string to_string(stats::CiMethod m) {
  return m == stats::CiMethod::wald ? "wald" : "clopper_pearson";
}

stats::CiMethod ci_method_from_string(const std::string& s) {
  if (s == "wald") return stats::CiMethod::wald;
  if (s == "clopper_pearson") return stats::CiMethod::clopper_pearson;
  throw ValidationError("unknown ci method: " + s);
}

}  // namespace ppdcpp
