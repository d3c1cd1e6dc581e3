#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppdcpp/linalg.hpp"

namespace ppdcpp {

enum class DataRole { historical, current };

// One arm's worth of data: responses, plus a design matrix when covariates
// are present. The design matrix always carries the intercept as its first
// column.
struct Dataset {
  std::vector<double> y;
  std::optional<Matrix> x;
  DataRole role = DataRole::current;

  std::size_t size() const { return y.size(); }
  bool has_covariates() const { return x.has_value(); }

  // y length >= 2, finite values, conformable full-column-rank design with
  // rows > cols. Throws ValidationError.
  void validate() const;
};

enum class EndpointKind { normal_known_var, normal_unknown_var, linear_regression, poisson_regression };

std::string to_string(EndpointKind kind);
EndpointKind endpoint_from_string(const std::string& s);

struct EndpointModel {
  EndpointKind kind = EndpointKind::normal_unknown_var;
  // Known variances; only meaningful for normal_known_var.
  double sigma2_hist = 0.0;
  double sigma2_curr = 0.0;

  static EndpointModel normal_known(double s2_hist, double s2_curr);
  static EndpointModel normal_unknown() { return {EndpointKind::normal_unknown_var}; }
  static EndpointModel regression() { return {EndpointKind::linear_regression}; }
  static EndpointModel poisson() { return {EndpointKind::poisson_regression}; }

  void validate() const;
};

double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // unbiased, n-1

}  // namespace ppdcpp
