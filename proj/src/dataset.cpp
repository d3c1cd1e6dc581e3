#include "ppdcpp/dataset.hpp"

#include <cmath>

#include "ppdcpp/errors.hpp"

namespace ppdcpp {

void Dataset::validate() const {
  if (y.size() < 2) throw ValidationError("dataset needs at least 2 observations");
  for (double v : y) {
    if (!std::isfinite(v)) throw ValidationError("dataset response contains a non-finite value");
  }
  if (x) {
    if (x->rows() != y.size()) {
      throw ValidationError("design matrix row count does not match response length");
    }
    if (x->rows() <= x->cols()) {
      throw ValidationError("design matrix needs more rows than columns");
    }
    for (double v : x->data()) {
      if (!std::isfinite(v)) throw ValidationError("design matrix contains a non-finite value");
    }
    // Full column rank <=> X^T X positive definite.
    try {
      Cholesky chk(cross_product(*x));
      (void)chk;
    } catch (const NumericError&) {
      throw ValidationError("design matrix is rank deficient");
    }
  }
}

std::string to_string(EndpointKind kind) {
  switch (kind) {
    case EndpointKind::normal_known_var: return "normal_known_var";
    case EndpointKind::normal_unknown_var: return "normal_unknown_var";
    case EndpointKind::linear_regression: return "linear_regression";
    case EndpointKind::poisson_regression: return "poisson_regression";
  }
  return "?";
}

EndpointKind endpoint_from_string(const std::string& s) {
  if (s == "normal_known_var") return EndpointKind::normal_known_var;
  if (s == "normal_unknown_var") return EndpointKind::normal_unknown_var;
  if (s == "linear_regression") return EndpointKind::linear_regression;
  if (s == "poisson_regression") return EndpointKind::poisson_regression;
  throw ValidationError("unknown endpoint kind: " + s);
}

EndpointModel EndpointModel::normal_known(double s2_hist, double s2_curr) {
  EndpointModel m{EndpointKind::normal_known_var};
  m.sigma2_hist = s2_hist;
  m.sigma2_curr = s2_curr;
  m.validate();
  return m;
}

void EndpointModel::validate() const {
  if (kind == EndpointKind::normal_known_var) {
    if (!(sigma2_hist > 0.0) || !(sigma2_curr > 0.0)) {
      throw ValidationError("known variances must be strictly positive");
    }
  }
}

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace ppdcpp
