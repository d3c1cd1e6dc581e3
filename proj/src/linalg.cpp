#include "ppdcpp/linalg.hpp"

#include <cmath>

#include "ppdcpp/errors.hpp"

namespace ppdcpp {

std::vector<double> Matrix::row(std::size_t i) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

Matrix cross_product(const Matrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  Matrix a(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double xij = x(i, j);
      if (xij == 0.0) continue;
      for (std::size_t k = j; k < p; ++k) a(j, k) += xij * x(i, k);
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < j; ++k) a(j, k) = a(k, j);
  }
  return a;
}

std::vector<double> cross_vector(const Matrix& x, const std::vector<double>& y) {
  if (y.size() != x.rows()) throw ValidationError("cross_vector: dimension mismatch");
  std::vector<double> b(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) b[j] += x(i, j) * y[i];
  }
  return b;
}

Cholesky::Cholesky(const Matrix& a) : n_(a.rows()), l_(a.rows(), a.cols()) {
  if (a.rows() != a.cols()) throw ValidationError("Cholesky requires a square matrix");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, std::fabs(a(i, i)));
  const double tol = 1e-12 * std::max(max_diag, 1.0);
  for (std::size_t j = 0; j < n_; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > tol)) {
      throw NumericError("matrix is not positive definite (rank deficient design?)");
    }
    l_(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n_; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / l_(j, j);
    }
  }
}

std::vector<double> Cholesky::solve_lower(const std::vector<double>& b) const {
  std::vector<double> x(b);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= l_(i, k) * x[k];
    x[i] /= l_(i, i);
  }
  return x;
}

std::vector<double> Cholesky::solve_upper(const std::vector<double>& b) const {
  std::vector<double> x(b);
  for (std::size_t ii = n_; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n_; ++k) x[ii] -= l_(k, ii) * x[k];
    x[ii] /= l_(ii, ii);
  }
  return x;
}

std::vector<double> Cholesky::solve(const std::vector<double>& b) const {
  if (b.size() != n_) throw ValidationError("Cholesky::solve: dimension mismatch");
  return solve_upper(solve_lower(b));
}

double Cholesky::quad_inverse(const std::vector<double>& x) const {
  const std::vector<double> z = solve_lower(x);
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += std::log(l_(i, i));
  return 2.0 * s;
}

OlsFit ols(const Matrix& x, const std::vector<double>& y) {
  if (x.rows() != y.size()) throw ValidationError("ols: dimension mismatch");
  if (x.rows() <= x.cols()) {
    throw ValidationError("ols requires more observations than coefficients");
  }
  OlsFit fit;
  fit.xtx = cross_product(x);
  const Cholesky chol(fit.xtx);
  fit.beta = chol.solve(cross_vector(x, y));
  double sse = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double pred = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) pred += x(i, j) * fit.beta[j];
    const double r = y[i] - pred;
    sse += r * r;
  }
  fit.sse = sse;
  fit.sigma2 = sse / static_cast<double>(x.rows() - x.cols());
  return fit;
}

}  // namespace ppdcpp
