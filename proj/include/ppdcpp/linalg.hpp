#pragma once

#include <cstddef>
#include <vector>

namespace ppdcpp {

// Minimal dense row-major matrix. Design matrices here are tall and thin
// (a handful of regression coefficients), so no BLAS is warranted.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double> row(std::size_t i) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix cross_product(const Matrix& x);  // X^T X
std::vector<double> cross_vector(const Matrix& x, const std::vector<double>& y);  // X^T y

// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
// Throws NumericError when A is (numerically) rank deficient.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a);

  std::size_t dim() const { return n_; }
  std::vector<double> solve(const std::vector<double>& b) const;       // A x = b
  std::vector<double> solve_lower(const std::vector<double>& b) const; // L x = b
  std::vector<double> solve_upper(const std::vector<double>& b) const; // L^T x = b
  double quad_inverse(const std::vector<double>& x) const;             // x^T A^{-1} x
  double log_det() const;

 private:
  std::size_t n_ = 0;
  Matrix l_;
};

struct OlsFit {
  std::vector<double> beta;
  double sigma2 = 0.0;  // SSE / (rows - cols)
  double sse = 0.0;
  Matrix xtx;
};

// Ordinary least squares with the unbiased residual variance. Requires
// rows > cols and a full-column-rank design.
OlsFit ols(const Matrix& x, const std::vector<double>& y);

}  // namespace ppdcpp
