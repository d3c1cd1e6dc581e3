#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppdcpp/binomial.hpp"

namespace ppdcpp {

enum class CalibrationMode { k_adjusted, unadjusted };

// Everything the sigmoid calibration depends on. Deliberately no data in
// here: the solved curve is a pure function of the current sample size and
// these knobs, which is what makes the borrowing rule pre-specifiable.
struct CalibrationConfig {
  long n_current = 0;
  double alpha_c = 0.99;   // target power under congruence
  double alpha_ic = 0.01;  // target power under incongruence
  double tau = 2.0;        // confidence parameter scaling the CI slack
  stats::CiMethod ci_method = stats::CiMethod::clopper_pearson;
  double ci_level = 0.95;
  CalibrationMode mode = CalibrationMode::k_adjusted;
  // Conservative variant: force k1 = 0 and floor the congruent anchor at
  // half a count's resolution, 1/(2 n tau).
  bool conservative_k1_zero = false;

  void validate() const;
};

struct CalibrationCurve {
  double a = 0.0;
  double b = 0.0;  // > 0: power strictly decreasing in the distance
  double g1 = 0.0;
  double g2 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  CalibrationConfig config;
};

// CI-derived slack terms. The intervals are evaluated at the expected
// counts (round(n/2) for the congruent proportion, n for the incongruent
// one), so the result depends only on (n, tau, ci method, ci level).
std::pair<double, double> compute_k_factors(const CalibrationConfig& config);

// Closed-form (a, b) from the two anchor equations
//   alpha_c  = sigmoid(a, b)(g1),  alpha_ic = sigmoid(a, b)(g2).
std::pair<double, double> solve_sigmoid_anchors(double alpha_c, double alpha_ic, double g1,
                                                double g2);

CalibrationCurve solve_sigmoid(const CalibrationConfig& config);

// alpha = 1 / (1 + exp(a + b log s)), with alpha(0) := 1 as the left limit.
// An optional cap (e.g. n/m) truncates the result.
double power_from_s(const CalibrationCurve& curve, double s,
                    std::optional<double> cap = std::nullopt);

struct CurveTable {
  std::vector<std::pair<double, double>> rows;  // (s, alpha)
  double s_cross_alpha_c = 0.0;   // abscissa where alpha crosses alpha_c
  double s_cross_alpha_ic = 0.0;  // abscissa where alpha crosses alpha_ic
};

CurveTable emit_curve(const CalibrationCurve& curve, int grid_points);

std::string to_string(CalibrationMode m);
CalibrationMode calibration_mode_from_string(const std::string& s);
std::string to_string(stats::CiMethod m);
stats::CiMethod ci_method_from_string(const std::string& s);

}  // namespace ppdcpp
