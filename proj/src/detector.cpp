#include "splidar/detector.hpp"

#include "splidar/adf.hpp"
#include "splidar/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace splidar {

namespace {

constexpr double kProbClamp = 1e-6;

double log_factorials(const PixelHistogram& hist) {
  double acc = 0.0;
  for (int t = 0; t < hist.n_bins(); ++t) {
    if (hist.counts[t] > 1) acc += std::lgamma(hist.counts[t] + 1.0);
  }
  return acc;
}

}  // namespace

double log_evidence_h0(const PixelHistogram& hist, double background_mean) {
  if (background_mean <= 0.0) {
    throw std::invalid_argument("background prior mean must be positive");
  }
  const double n = hist.n_bins();
  const double k = static_cast<double>(hist.total);
  const double inv_mean = 1.0 / background_mean;
  // int Exp(b; mean) prod_t Pois(z_t; b) db
  //   = Gamma(K + 1) / (mean (N_T + 1/mean)^(K+1) prod z_t!)
  return std::lgamma(k + 1.0) - std::log(background_mean) -
         (k + 1.0) * std::log(n + inv_mean) - log_factorials(hist);
}

double log_evidence_h1(const PixelHistogram& hist, const Irf& irf,
                       const DetectionPriors& priors, const DepthGrid& grid) {
  if (priors.depth == nullptr) throw std::invalid_argument("missing depth prior");
  const int n = irf.n_bins();
  const double k = static_cast<double>(hist.total);
  const double lfact = log_factorials(hist);

  const int n_nodes = 16;
  auto [u, w] = gauss_legendre_unit(n_nodes);
  ArrayXd b_nodes(n_nodes), r_nodes(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    b_nodes[i] = exponential_quantile(priors.background_mean, u[i]);
    r_nodes[i] = gamma_quantile(priors.refl_shape, priors.refl_scale, u[i]);
  }
  const ArrayXd log_w = w.log();
  const ArrayXd log_b = b_nodes.log();

  const DiscretePosterior& depth = *priors.depth;
  const int sup_begin = irf.support_begin;
  const int sup_len = irf.support_end - irf.support_begin;

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(grid.size()) * n_nodes * n_nodes);
  std::vector<double> s_nz, z_nz;
  for (int di = 0; di < depth.grid.size(); ++di) {
    const double p_d = depth.probs[di];
    if (p_d <= 1e-300) continue;
    const double log_pd = std::log(p_d);
    const int d = depth.grid.d_min + di;

    const int offset = d - irf.peak_bin + sup_begin;
    const int begin = std::max(0, offset);
    const int end = std::min(n, offset + sup_len);
    s_nz.clear();
    z_nz.clear();
    for (int t = begin; t < end; ++t) {
      if (hist.counts[t] > 0) {
        s_nz.push_back(irf.samples[t - offset + sup_begin]);
        z_nz.push_back(static_cast<double>(hist.counts[t]));
      }
    }
    const auto s_map = Eigen::Map<const ArrayXd>(s_nz.data(), s_nz.size());
    const auto z_map = Eigen::Map<const ArrayXd>(z_nz.data(), z_nz.size());

    for (int bi = 0; bi < n_nodes; ++bi) {
      const double b = b_nodes[bi];
      const double base = k * log_b[bi] - b * n - lfact + log_pd + log_w[bi];
      for (int ri = 0; ri < n_nodes; ++ri) {
        const double r = r_nodes[ri];
        const double ll =
            (z_map * ((r * s_map + b).log() - log_b[bi])).sum() - r;
        terms.push_back(base + log_w[ri] + ll);
      }
    }
  }
  return log_sum_exp(Eigen::Map<const ArrayXd>(terms.data(), terms.size()));
}

double target_presence_probability(const PixelHistogram& hist, const Irf& irf,
                                   const DetectionPriors& priors,
                                   const DepthGrid& grid) {
  const double pi0 = priors.presence_prior;
  if (pi0 <= 0.0) return 0.0;
  if (pi0 >= 1.0) return 1.0;
  const double l0 = log_evidence_h0(hist, priors.background_mean);
  const double l1 = log_evidence_h1(hist, irf, priors, grid);
  // pi = pi0 m1 / (pi0 m1 + (1 - pi0) m0), in log odds for stability.
  const double log_odds = std::log(pi0) - std::log1p(-pi0) + l1 - l0;
  return 1.0 / (1.0 + std::exp(-log_odds));
}

ArrayXd propagate_presence_prior(const ArrayXd& presence,
                                 const std::vector<std::vector<int>>& neighborhoods,
                                 double nu0) {
  const int p = static_cast<int>(presence.size());
  if (static_cast<int>(neighborhoods.size()) != p) {
    throw std::invalid_argument("neighborhood count mismatch");
  }
  auto logit = [](double x) {
    const double c = std::clamp(x, kProbClamp, 1.0 - kProbClamp);
    return std::log(c) - std::log1p(-c);
  };
  ArrayXd out(p);
  for (int i = 0; i < p; ++i) {
    const auto& nb = neighborhoods[i];
    const ArrayXd weights = neighbor_weights(static_cast<int>(nb.size()), nu0);
    double acc = 0.0;
    for (std::size_t j = 0; j < nb.size(); ++j) {
      // Out-of-view neighbors (index -1) contribute logit(0.5) = 0.
      if (nb[j] >= 0) acc += weights[j] * logit(presence[nb[j]]);
    }
    out[i] = 1.0 / (1.0 + std::exp(-acc));
  }
  return out;
}

double background_no_target(std::int64_t k, int n_t) {
  if (k < 0) throw std::invalid_argument("negative photon count");
  return static_cast<double>(k) / n_t;
}

}  // namespace splidar
