#pragma once

#include <vector>

namespace ppdcpp::stats {

// Univariate normal.
double norm_pdf(double x);
double norm_logpdf(double x, double mean, double sd);
double norm_cdf(double x);
double norm_quantile(double p);

// Student t with df degrees of freedom (standardized form).
double t_pdf(double x, double df);
double t_cdf(double x, double df);
double t_quantile(double p, double df);

// Regularized incomplete beta I_x(a, b) and its inverse in x.
double betai(double a, double b, double x);
double betai_inv(double a, double b, double p);

double binom_logpmf(long k, long n, double p);
double poisson_logpmf(long k, double mean);

// Sample quantile with linear interpolation between order statistics
// (the common "type 7" convention). Copies and sorts its input.
double quantile_type7(std::vector<double> values, double q);

}  // namespace ppdcpp::stats
