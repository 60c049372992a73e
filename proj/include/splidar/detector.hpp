#pragma once

#include "splidar/estimators.hpp"
#include "splidar/irf.hpp"
#include "splidar/types.hpp"

namespace splidar {

/// Priors of the per-pixel presence test.
struct DetectionPriors {
  double background_mean = 1.0;  // exponential prior mean for b
  double refl_shape = 2.0;       // gamma prior on r
  double refl_scale = 27.5;
  const DiscretePosterior* depth = nullptr;  // empirical-Bayes depth prior
  double presence_prior = 0.5;               // pi0
};

/// Marginal log-evidence under H0 (r = 0): the exponential prior on b
/// integrates in closed form (gamma-Poisson conjugacy). Includes the
/// -sum(log z_t!) term so the value is a true marginal likelihood.
double log_evidence_h0(const PixelHistogram& hist, double background_mean);

/// Marginal log-evidence under H1 (r > 0): quadrature over b and r through
/// the prior quantile functions, depth weighted by the pseudo-posterior.
double log_evidence_h1(const PixelHistogram& hist, const Irf& irf,
                       const DetectionPriors& priors, const DepthGrid& grid);

/// Posterior probability of target presence.
double target_presence_probability(const PixelHistogram& hist, const Irf& irf,
                                   const DetectionPriors& priors,
                                   const DepthGrid& grid);

/// Nonlinear local averaging of presence probabilities:
/// pi0_p = sigma(sum nu_p' logit(pi_p')), inputs clamped to [1e-6, 1 - 1e-6].
/// Neighborhoods list neighbor indices center first; -1 marks out-of-view.
ArrayXd propagate_presence_prior(const ArrayXd& presence,
                                 const std::vector<std::vector<int>>& neighborhoods,
                                 double nu0);

/// Background estimate when no target is detected: K / N_T.
double background_no_target(std::int64_t k, int n_t);

}  // namespace splidar
