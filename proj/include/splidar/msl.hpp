#pragma once

#include "splidar/estimators.hpp"
#include "splidar/sim.hpp"

#include <vector>

namespace splidar {

/// One pixel observed in L spectral bands sharing N_T and the depth grid.
struct MslObservation {
  std::vector<PixelHistogram> hists;
  std::vector<Irf> irfs;

  int bands() const { return static_cast<int>(hists.size()); }
};

/// log[ ((beta+1)/beta) prod_l (1/K_l) z_l^T s_l,d^beta ] per grid depth.
/// Bands with no photons are dropped from the product (their 1/K_l term is
/// undefined and they carry no depth information); a zero cross-correlation
/// in any remaining band maps to -inf at that depth. Throws when every band
/// is empty.
ArrayXd msl_pseudo_log_lik(const MslObservation& obs, double beta,
                           const DepthGrid& grid);

/// Pseudo-posterior variant for API symmetry with the single-band path.
DiscretePosterior msl_pseudo_posterior(const MslObservation& obs, double beta,
                                       const ArrayXd& log_prior,
                                       const DepthGrid& grid);

/// MLE-only p_d sweep over (SBR, MSC), applied with the same SBR and MSC in
/// every band: PB bands-product estimators per beta, plus summed per-band
/// BF and Oracle log-likelihood maximizers.
std::vector<SweepRow> msl_sweep(const SweepSpec& spec,
                                const std::vector<Irf>& band_irfs);

}  // namespace splidar
