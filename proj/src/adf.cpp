#include "splidar/adf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace splidar {

ArrayXd neighbor_weights(int m, double nu0) {
  if (m < 1) throw std::invalid_argument("M must be >= 1");
  if (nu0 < 0.0 || nu0 > 1.0) throw std::invalid_argument("nu0 must be in [0,1]");
  if (m == 1) {
    if (nu0 != 1.0) throw std::invalid_argument("M = 1 requires nu0 = 1");
    return ArrayXd::Ones(1);
  }
  ArrayXd w = ArrayXd::Constant(m, (1.0 - nu0) / (m - 1));
  w[0] = nu0;
  return w;
}

double GaussianMixture::mean() const { return (weights * means).sum(); }

double GaussianMixture::variance() const {
  const double mu = mean();
  const double second = (weights * (variances + means.square())).sum();
  return std::max(second - mu * mu, kVarianceFloor);
}

ArrayXd GaussianMixture::density_on_grid(const DepthGrid& grid) const {
  ArrayXd out = ArrayXd::Zero(grid.size());
  for (int c = 0; c < size(); ++c) {
    const double norm =
        weights[c] / std::sqrt(2.0 * std::numbers::pi * variances[c]);
    const double inv2v = 0.5 / variances[c];
    for (int i = 0; i < grid.size(); ++i) {
      const double x = grid.d_min + i - means[c];
      out[i] += norm * std::exp(-x * x * inv2v);
    }
  }
  return out;
}

ArrayXd GaussianMixture::log_density_on_grid(const DepthGrid& grid) const {
  return density_on_grid(grid).log();
}

GaussianMixture predict_prior(
    const std::vector<std::optional<NeighborBelief>>& neighbors, double nu0,
    double sigma_rw, const DepthGrid& grid) {
  if (sigma_rw <= 0.0) throw std::invalid_argument("sigma_rw must be positive");
  const int m = static_cast<int>(neighbors.size());
  GaussianMixture mix;
  mix.weights = neighbor_weights(m, nu0);
  mix.means.resize(m);
  mix.variances.resize(m);
  const double rw_var = sigma_rw * sigma_rw;
  for (int c = 0; c < m; ++c) {
    if (neighbors[c].has_value() && neighbors[c]->detected) {
      // Random-walk convolution of Gaussians is exact: variances add.
      mix.means[c] = neighbors[c]->belief.mean;
      mix.variances[c] = neighbors[c]->belief.variance + rw_var;
    } else {
      mix.means[c] = grid.mid();
      mix.variances[c] = grid.flat_variance();
    }
  }
  return mix;
}

GaussianBelief moment_match(const DiscretePosterior& post) {
  return posterior_moments(post);
}

}  // namespace splidar
