#pragma once

#include "splidar/estimators.hpp"
#include "splidar/types.hpp"

#include <optional>

namespace splidar {

/// Mixture weights for a neighborhood of M pixels, center first:
/// [nu0, (1 - nu0)/(M - 1), ...]. Sums to 1.
ArrayXd neighbor_weights(int m, double nu0);

/// Gaussian mixture over depth with exact closed-form moments.
struct GaussianMixture {
  ArrayXd weights;
  ArrayXd means;
  ArrayXd variances;

  int size() const { return static_cast<int>(weights.size()); }
  double mean() const;
  double variance() const;  // floored at kVarianceFloor
  ArrayXd density_on_grid(const DepthGrid& grid) const;
  ArrayXd log_density_on_grid(const DepthGrid& grid) const;
};

/// Previous-frame summary of one neighbor; nullopt means out of view.
struct NeighborBelief {
  GaussianBelief belief;
  bool detected = false;
};

/// Spatio-temporal prior for one pixel: each detected neighbor contributes
/// N(mu, sigma^2 + sigma_rw^2); undetected, faulty, or out-of-view neighbors
/// contribute the flat component N(grid mid, grid width^2 / 12). Neighbors
/// are ordered center first, matching neighbor_weights.
GaussianMixture predict_prior(
    const std::vector<std::optional<NeighborBelief>>& neighbors, double nu0,
    double sigma_rw, const DepthGrid& grid);

/// KL-minimizing Gaussian projection (moment matching).
GaussianBelief moment_match(const DiscretePosterior& post);

}  // namespace splidar
