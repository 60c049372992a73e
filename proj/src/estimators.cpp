#include "splidar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace splidar {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ArrayXd flat_log_prior(const DepthGrid& grid) {
  return ArrayXd::Zero(grid.size());
}

ArrayXd gaussian_log_prior(const DepthGrid& grid, double mean, double variance) {
  ArrayXd lp(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.d_min + i - mean;
    lp[i] = -0.5 * x * x / variance;
  }
  return lp;
}

ArrayXd beta_pseudo_log_lik(const PixelHistogram& hist, const Irf& irf,
                            double beta, const DepthGrid& grid) {
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
  return ((beta + 1.0) / beta) * cross_correlate_power(hist, irf, beta, grid);
}

DiscretePosterior normalize_posterior(const DepthGrid& grid, ArrayXd log_weights) {
  DiscretePosterior post;
  post.grid = grid;
  const double m = log_weights.maxCoeff();
  if (!std::isfinite(m)) throw std::runtime_error("posterior degenerate");
  post.probs = (log_weights - m).exp();
  const double z = post.probs.sum();
  if (!(z > 0.0)) throw std::runtime_error("posterior degenerate");
  post.probs /= z;
  post.log_weights = std::move(log_weights);
  return post;
}

DiscretePosterior pseudo_posterior(const PixelHistogram& hist, const Irf& irf,
                                   double beta, const ArrayXd& log_prior,
                                   const DepthGrid& grid) {
  return normalize_posterior(grid,
                             log_prior + beta_pseudo_log_lik(hist, irf, beta, grid));
}

GaussianBelief posterior_moments(const DiscretePosterior& post) {
  double mean = 0.0;
  for (int i = 0; i < post.grid.size(); ++i) {
    mean += post.probs[i] * post.depth_at(i);
  }
  double var = 0.0;
  for (int i = 0; i < post.grid.size(); ++i) {
    const double x = post.depth_at(i) - mean;
    var += post.probs[i] * x * x;
  }
  return {mean, std::max(var, kVarianceFloor)};
}

ArrayXd bf_log_lik(const PixelHistogram& hist, const Irf& irf,
                   const DepthGrid& grid) {
  const int n = irf.n_bins();
  const int sup_begin = irf.support_begin;
  const int sup_len = irf.support_end - irf.support_begin;
  ArrayXd log_s(sup_len);
  for (int i = 0; i < sup_len; ++i) {
    const double s = irf.samples[sup_begin + i];
    log_s[i] = s > 0.0 ? std::log(s) : kNegInf;
  }

  ArrayXd out(grid.size());
  for (int d = grid.d_min; d <= grid.d_max; ++d) {
    const int offset = d - irf.peak_bin + sup_begin;
    const int begin = std::max(0, offset);
    const int end = std::min(n, offset + sup_len);
    double acc = 0.0;
    std::int64_t covered = 0;  // photons landing on positive-density bins
    for (int t = begin; t < end; ++t) {
      const int z = hist.counts[t];
      if (z == 0) continue;
      const double ls = log_s[t - offset];
      if (ls == kNegInf) continue;
      acc += z * ls;
      covered += z;
    }
    out[d - grid.d_min] = covered == hist.total ? acc : kNegInf;
  }
  return out;
}

ArrayXd oracle_log_lik(const PixelHistogram& hist, const Irf& irf, double r,
                       double b, const DepthGrid& grid) {
  if (r < 0.0 || b < 0.0) throw std::invalid_argument("negative rate");
  if (r == 0.0 && b == 0.0 && hist.total > 0) {
    throw std::invalid_argument("impossible observation: r = b = 0 with photons");
  }
  const int n = irf.n_bins();
  if (r == 0.0) {
    // Flat in d: only the background terms survive.
    const double c = b > 0.0 ? hist.total * std::log(b) - b * n : 0.0;
    return ArrayXd::Constant(grid.size(), c);
  }

  const int sup_begin = irf.support_begin;
  const int sup_len = irf.support_end - irf.support_begin;
  const double log_b = b > 0.0 ? std::log(b) : kNegInf;
  // Per-support-bin log((r s + b) / b); for b = 0 this is log(r s) directly.
  ArrayXd term(sup_len);
  for (int i = 0; i < sup_len; ++i) {
    const double s = irf.samples[sup_begin + i];
    const double lam = r * s + b;
    if (b > 0.0) {
      term[i] = std::log(lam) - log_b;
    } else {
      term[i] = s > 0.0 ? std::log(lam) : kNegInf;
    }
  }
  // sum_t lambda_t = r + b N_T up to IRF edge clipping, which the grid
  // guard rules out.
  const double rate_sum = r + b * n;
  const double base = b > 0.0 ? hist.total * log_b - rate_sum : -rate_sum;

  ArrayXd out(grid.size());
  for (int d = grid.d_min; d <= grid.d_max; ++d) {
    const int offset = d - irf.peak_bin + sup_begin;
    const int begin = std::max(0, offset);
    const int end = std::min(n, offset + sup_len);
    double acc = 0.0;
    std::int64_t covered = 0;
    for (int t = begin; t < end; ++t) {
      const int z = hist.counts[t];
      if (z == 0) continue;
      const double tm = term[t - offset];
      if (tm == kNegInf) continue;
      acc += z * tm;
      covered += z;
    }
    if (b == 0.0 && covered != hist.total) {
      out[d - grid.d_min] = kNegInf;
    } else {
      out[d - grid.d_min] = base + acc;
    }
  }
  return out;
}

namespace {

EstimateResult from_log_lik(ArrayXd log_lik, const ArrayXd& log_prior,
                            const DepthGrid& grid) {
  EstimateResult res;
  if (!std::isfinite(log_lik.maxCoeff())) {
    // Data never overlaps the shifted IRF: fall back to the prior.
    res.no_overlap = true;
    res.posterior = normalize_posterior(grid, log_prior);
  } else {
    res.posterior = normalize_posterior(grid, log_lik + log_prior);
  }
  res.belief = posterior_moments(res.posterior);
  res.estimate = res.belief.mean;
  return res;
}

}  // namespace

EstimateResult bf_estimate(const PixelHistogram& hist, const Irf& irf,
                           const ArrayXd& log_prior, const DepthGrid& grid) {
  return from_log_lik(bf_log_lik(hist, irf, grid), log_prior, grid);
}

EstimateResult oracle_mmse(const PixelHistogram& hist, const Irf& irf, double r,
                           double b, const ArrayXd& log_prior,
                           const DepthGrid& grid) {
  return from_log_lik(oracle_log_lik(hist, irf, r, b, grid), log_prior, grid);
}

double half_sample_mode(const std::vector<double>& sorted_toas) {
  if (sorted_toas.empty()) throw std::invalid_argument("empty sample");
  std::size_t begin = 0;
  std::size_t n = sorted_toas.size();
  const double* x = sorted_toas.data();
  while (n > 3) {
    const std::size_t h = (n + 1) / 2;
    std::size_t best = begin;
    double best_width = std::numeric_limits<double>::infinity();
    for (std::size_t i = begin; i + h <= begin + n; ++i) {
      const double w = x[i + h - 1] - x[i];
      if (w < best_width) {
        best_width = w;
        best = i;
      }
    }
    begin = best;
    n = h;
  }
  if (n == 1) return x[begin];
  if (n == 2) return 0.5 * (x[begin] + x[begin + 1]);
  // Three points: keep the tighter pair, middle point on ties.
  const double left = x[begin + 1] - x[begin];
  const double right = x[begin + 2] - x[begin + 1];
  if (left < right) return 0.5 * (x[begin] + x[begin + 1]);
  if (right < left) return 0.5 * (x[begin + 1] + x[begin + 2]);
  return x[begin + 1];
}

RateEstimate mle_r_b(const PixelHistogram& hist, const Irf& irf, int d_hat,
                     const DepthGrid& grid) {
  if (!grid.contains(d_hat)) throw std::out_of_range("d_hat outside grid");
  const int n = irf.n_bins();
  const std::int64_t k = hist.total;
  if (k == 0) return {0.0, 0.0, true};

  const ArrayXd s = shifted_irf(irf, d_hat, 1.0, grid);
  const double u = 1.0 / n;  // uniform background density per bin

  // EM on the two-component mixture: w s(t) + (1 - w) / N_T.
  double w = 0.5;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    double acc = 0.0;
    for (int t = 0; t < n; ++t) {
      const int z = hist.counts[t];
      if (z == 0) continue;
      const double sig = w * s[t];
      acc += z * (sig / (sig + (1.0 - w) * u));
    }
    const double w_new = acc / static_cast<double>(k);
    const double delta = std::abs(w_new - w) / std::max(w, 1e-12);
    w = w_new;
    if (delta < 1e-8) {
      converged = true;
      break;
    }
  }
  // SBR identity: r = w K, b N_T = (1 - w) K.
  return {w * k, (1.0 - w) * k / n, converged};
}

}  // namespace splidar
