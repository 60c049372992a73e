#include "splidar/msl.hpp"

#include "splidar/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace splidar {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ArrayXd msl_pseudo_log_lik(const MslObservation& obs, double beta,
                           const DepthGrid& grid) {
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
  if (obs.hists.size() != obs.irfs.size() || obs.hists.empty()) {
    throw std::invalid_argument("band count mismatch");
  }
  ArrayXd out = ArrayXd::Constant(grid.size(), std::log((beta + 1.0) / beta));
  int live_bands = 0;
  for (int l = 0; l < obs.bands(); ++l) {
    if (obs.hists[l].total == 0) continue;  // dropped: no depth information
    ++live_bands;
    const ArrayXd xc =
        cross_correlate_power(obs.hists[l], obs.irfs[l], beta, grid);
    const double log_k = std::log(static_cast<double>(obs.hists[l].total));
    for (int i = 0; i < grid.size(); ++i) {
      out[i] += xc[i] > 0.0 ? std::log(xc[i]) - log_k : kNegInf;
    }
  }
  if (live_bands == 0) throw std::invalid_argument("no photons in any band");
  return out;
}

DiscretePosterior msl_pseudo_posterior(const MslObservation& obs, double beta,
                                       const ArrayXd& log_prior,
                                       const DepthGrid& grid) {
  return normalize_posterior(grid, log_prior + msl_pseudo_log_lik(obs, beta, grid));
}

namespace {

double argmax_depth(const ArrayXd& values, const DepthGrid& grid) {
  int best = 0;
  for (int i = 1; i < grid.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<double>(grid.d_min + best);
}

}  // namespace

std::vector<SweepRow> msl_sweep(const SweepSpec& spec,
                                const std::vector<Irf>& band_irfs) {
  if (band_irfs.empty()) throw std::invalid_argument("need at least one band");
  const int n_t = band_irfs[0].n_bins();
  // All bands must fit one shared grid.
  DepthGrid grid = default_grid(band_irfs[0]);
  for (const Irf& irf : band_irfs) {
    if (irf.n_bins() != n_t) throw std::invalid_argument("band N_T mismatch");
    const DepthGrid g = default_grid(irf);
    grid.d_min = std::max(grid.d_min, g.d_min);
    grid.d_max = std::min(grid.d_max, g.d_max);
  }
  const int bands = static_cast<int>(band_irfs.size());
  const double prior_sd = std::sqrt(spec.prior_var);

  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (double sbr : spec.sbr_values) {
    for (double msc : spec.msc_values) {
      const auto [r, b] = sbr_params(msc, sbr, n_t);
      const std::size_t ne = spec.estimators.size();
      std::vector<double> truths(spec.n_mc);
      std::vector<std::vector<double>> estimates(ne,
                                                 std::vector<double>(spec.n_mc));
      parallel_for(spec.n_mc, 0, [&](int trial) {
        std::seed_seq seq{spec.seed, cell, static_cast<std::uint64_t>(trial)};
        std::mt19937_64 rng(seq);
        double draw =
            std::normal_distribution<double>(spec.prior_mean, prior_sd)(rng);
        const int d_true = std::clamp(static_cast<int>(std::lround(draw)),
                                      grid.d_min, grid.d_max);
        truths[trial] = d_true;
        MslObservation obs;
        obs.irfs = band_irfs;
        obs.hists.reserve(bands);
        for (int l = 0; l < bands; ++l) {
          obs.hists.push_back(
              generate_pixel_histogram(band_irfs[l], d_true, r, b, rng));
        }
        bool all_empty = true;
        for (const auto& h : obs.hists) {
          if (h.total > 0) all_empty = false;
        }
        for (std::size_t e = 0; e < ne; ++e) {
          const EstimatorSpec& est = spec.estimators[e];
          if (all_empty) {
            // No photons anywhere: fall back to the prior mean.
            estimates[e][trial] = spec.prior_mean;
            continue;
          }
          ArrayXd score;
          switch (est.kind) {
            case EstimatorKind::PB:
              score = msl_pseudo_log_lik(obs, est.beta, grid);
              break;
            case EstimatorKind::BF: {
              score = ArrayXd::Zero(grid.size());
              for (int l = 0; l < bands; ++l) {
                score += bf_log_lik(obs.hists[l], band_irfs[l], grid);
              }
              break;
            }
            case EstimatorKind::Oracle: {
              score = ArrayXd::Zero(grid.size());
              for (int l = 0; l < bands; ++l) {
                score += oracle_log_lik(obs.hists[l], band_irfs[l], r, b, grid);
              }
              break;
            }
            default:
              throw std::invalid_argument("estimator not supported for MSL");
          }
          estimates[e][trial] = std::isfinite(score.maxCoeff())
                                    ? argmax_depth(score, grid)
                                    : spec.prior_mean;
        }
      });
      for (std::size_t e = 0; e < ne; ++e) {
        const EstimatorSpec& est = spec.estimators[e];
        rows.push_back({est.name() + "_mle",
                        est.kind == EstimatorKind::PB
                            ? est.beta
                            : std::numeric_limits<double>::quiet_NaN(),
                        sbr, msc, p_d(estimates[e], truths, spec.eta),
                        spec.n_mc, spec.seed});
      }
      ++cell;
    }
  }
  return rows;
}

}  // namespace splidar
