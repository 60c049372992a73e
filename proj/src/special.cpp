#include "splidar/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace splidar {

namespace {

// Lower incomplete gamma via power series, valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma via Lentz continued fraction, valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_quantile(double shape, double scale, double u) {
  if (u <= 0.0 || u >= 1.0) {
    throw std::invalid_argument("gamma_quantile: u must be in (0, 1)");
  }
  // Bracket then bisect on the standardized (scale 1) distribution.
  double lo = 0.0;
  double hi = shape + 1.0;
  while (gamma_p(shape, hi) < u) {
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_p(shape, mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
  }
  return scale * 0.5 * (lo + hi);
}

double exponential_quantile(double mean, double u) {
  if (mean <= 0.0) throw std::invalid_argument("exponential mean must be positive");
  if (u <= 0.0 || u >= 1.0) {
    throw std::invalid_argument("exponential_quantile: u must be in (0, 1)");
  }
  return -mean * std::log1p(-u);
}

std::pair<Eigen::ArrayXd, Eigen::ArrayXd> gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("need at least one node");
  Eigen::ArrayXd nodes(n), weights(n);
  // Newton iteration from the Chebyshev initial guess for roots of P_n.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 - x);  // map [-1,1] -> (0,1), ascending
    weights[i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
  return {nodes, weights};
}

double log_sum_exp(const Eigen::ArrayXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v - m).exp().sum());
}

}  // namespace splidar
