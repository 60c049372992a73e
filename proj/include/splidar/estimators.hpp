#pragma once

#include "splidar/irf.hpp"
#include "splidar/types.hpp"

namespace splidar {

/// Depth distribution discretized on a DepthGrid.
struct DiscretePosterior {
  DepthGrid grid;
  ArrayXd log_weights;  // unnormalized, log domain
  ArrayXd probs;        // normalized, sums to 1

  double depth_at(int i) const { return static_cast<double>(grid.d_min + i); }
};

ArrayXd flat_log_prior(const DepthGrid& grid);
ArrayXd gaussian_log_prior(const DepthGrid& grid, double mean, double variance);

/// -K * CE_beta(d) up to an additive constant: ((beta+1)/beta) z^T s_d^beta
/// for every grid depth. Flat (all-zero) when the histogram is empty.
ArrayXd beta_pseudo_log_lik(const PixelHistogram& hist, const Irf& irf,
                            double beta, const DepthGrid& grid);

/// prior x exp(-K CE_beta), normalized on the grid. Log-domain with
/// max-subtraction throughout.
DiscretePosterior pseudo_posterior(const PixelHistogram& hist, const Irf& irf,
                                   double beta, const ArrayXd& log_prior,
                                   const DepthGrid& grid);

/// Normalizes raw log weights into a DiscretePosterior.
DiscretePosterior normalize_posterior(const DepthGrid& grid, ArrayXd log_weights);

/// Mean and variance of a normalized discrete posterior; variance floored
/// at kVarianceFloor.
GaussianBelief posterior_moments(const DiscretePosterior& post);

struct EstimateResult {
  DiscretePosterior posterior;
  GaussianBelief belief;
  double estimate = 0.0;   // posterior mean
  bool no_overlap = false; // data never overlapped the IRF support
};

/// Background-free MMSE estimator: Poisson model without background, with
/// the amplitude profiled out. Photons strictly outside the shifted IRF
/// support veto that depth.
EstimateResult bf_estimate(const PixelHistogram& hist, const Irf& irf,
                           const ArrayXd& log_prior, const DepthGrid& grid);

/// MMSE estimator under the full signal-plus-background Poisson model with
/// (r, b) known.
EstimateResult oracle_mmse(const PixelHistogram& hist, const Irf& irf, double r,
                           double b, const ArrayXd& log_prior,
                           const DepthGrid& grid);

/// Per-depth log-likelihood of the full model with (r, b) known; shared by
/// the Oracle estimator and the detector. Excludes the -sum(log z_t!) term.
ArrayXd oracle_log_lik(const PixelHistogram& hist, const Irf& irf, double r,
                       double b, const DepthGrid& grid);

/// Per-depth background-free log-likelihood (amplitude profiled out);
/// -inf where any photon falls outside the shifted support.
ArrayXd bf_log_lik(const PixelHistogram& hist, const Irf& irf,
                   const DepthGrid& grid);

/// Recursive half-sample mode of a sorted sample. Throws on empty input.
double half_sample_mode(const std::vector<double>& sorted_toas);

struct RateEstimate {
  double r = 0.0;
  double b = 0.0;
  bool converged = true;
};

/// Joint MLE of (r, b) at a fixed depth via EM on the signal/uniform
/// mixture; 50 iterations or relative change below 1e-8.
RateEstimate mle_r_b(const PixelHistogram& hist, const Irf& irf, int d_hat,
                     const DepthGrid& grid);

}  // namespace splidar
