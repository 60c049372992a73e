#pragma once

#include <Eigen/Dense>

#include <utility>

namespace splidar {

/// Regularized lower incomplete gamma P(a, x), series/continued-fraction.
double gamma_p(double a, double x);

/// Quantile of Gamma(shape, scale) at u in (0, 1).
double gamma_quantile(double shape, double scale, double u);

/// Quantile of the exponential distribution with the given mean.
double exponential_quantile(double mean, double u);

/// n-point Gauss-Legendre nodes and weights rescaled to (0, 1);
/// weights sum to 1.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> gauss_legendre_unit(int n);

/// log(sum(exp(v))) with max-subtraction.
double log_sum_exp(const Eigen::ArrayXd& v);

}  // namespace splidar
