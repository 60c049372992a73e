#include "splidar/sim.hpp"

#include "splidar/estimators.hpp"
#include "splidar/io.hpp"
#include "splidar/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace splidar {

PixelHistogram generate_pixel_histogram(const Irf& irf, int d, double r,
                                        double b, std::mt19937_64& rng) {
  if (r < 0.0 || b < 0.0) throw std::invalid_argument("negative rate");
  const DepthGrid grid = default_grid(irf);
  const int n = irf.n_bins();
  ArrayXi counts = ArrayXi::Zero(n);
  if (r > 0.0) {
    const ArrayXd s = shifted_irf(irf, d, 1.0, grid);
    for (int t = 0; t < n; ++t) {
      const double lam = r * s[t] + b;
      if (lam > 0.0) {
        counts[t] = std::poisson_distribution<int>(lam)(rng);
      }
    }
  } else if (b > 0.0) {
    std::poisson_distribution<int> bg(b);
    for (int t = 0; t < n; ++t) counts[t] = bg(rng);
  }
  return histogram_from_counts(std::move(counts));
}

std::pair<double, double> sbr_params(double msc, double sbr, int n_t) {
  if (msc <= 0.0 || n_t <= 0) throw std::invalid_argument("MSC and N_T must be positive");
  if (sbr <= 0.0) throw std::invalid_argument("SBR must be positive");
  return {msc, msc / (sbr * n_t)};
}

double p_d(const std::vector<double>& estimates,
           const std::vector<double>& truths, double eta) {
  if (estimates.empty()) throw std::invalid_argument("empty estimate list");
  if (estimates.size() != truths.size()) {
    throw std::invalid_argument("estimate/truth length mismatch");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (std::abs(estimates[i] - truths[i]) < eta) ++hits;
  }
  return static_cast<double>(hits) / estimates.size();
}

namespace {
// Values below this fraction of the peak are treated as zero so the IRF
// support (and the grid guard it implies) stays finite.
constexpr double kTailCut = 1e-16;
}

Irf make_gaussian_irf(double fwhm_bins, int center_bin, int n_t,
                      double bin_width) {
  if (fwhm_bins <= 0.0) throw std::invalid_argument("FWHM must be positive");
  const double sigma = fwhm_bins / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  ArrayXd raw(n_t);
  for (int t = 0; t < n_t; ++t) {
    const double x = (t - center_bin) / sigma;
    const double v = std::exp(-0.5 * x * x);
    raw[t] = v >= kTailCut ? v : 0.0;
  }
  Irf irf = normalize_irf(raw, bin_width);
  if (irf.peak_bin != center_bin) throw std::logic_error("peak misplaced");
  return irf;
}

namespace {

ArrayXd emg_shape(double sigma, double lambda, int n_t, double mu) {
  ArrayXd raw(n_t);
  for (int t = 0; t < n_t; ++t) {
    const double arg = (mu + lambda * sigma * sigma - t) / (std::numbers::sqrt2 * sigma);
    const double lg = 0.5 * lambda * (2.0 * mu + lambda * sigma * sigma - 2.0 * t);
    // erfc in log space to survive large positive arguments.
    double v;
    if (arg > 25.0) {
      // log erfc(x) ~ -x^2 - log(x sqrt(pi)) for large x
      v = std::exp(lg - arg * arg - std::log(arg * std::sqrt(std::numbers::pi)));
    } else {
      v = 0.5 * lambda * std::exp(lg) * std::erfc(arg);
    }
    raw[t] = std::isfinite(v) && v > 0.0 ? v : 0.0;
  }
  const double peak = raw.maxCoeff();
  for (int t = 0; t < n_t; ++t) {
    if (raw[t] < peak * kTailCut) raw[t] = 0.0;
  }
  return raw;
}

}  // namespace

Irf make_emg_irf(double fwhm_bins, int center_bin, int n_t, double bin_width) {
  if (fwhm_bins <= 0.0) throw std::invalid_argument("FWHM must be positive");
  const double lambda = 2.0 / fwhm_bins;  // pronounced right tail
  const double mu = n_t / 2.0;
  // Calibrate sigma so the measured FWHM matches the request.
  double lo = fwhm_bins / 50.0, hi = fwhm_bins;
  for (int i = 0; i < 60; ++i) {
    const double sigma = 0.5 * (lo + hi);
    const Irf probe = normalize_irf(emg_shape(sigma, lambda, n_t, mu), bin_width);
    if (probe.fwhm_bins < fwhm_bins) {
      lo = sigma;
    } else {
      hi = sigma;
    }
  }
  Irf centered = normalize_irf(emg_shape(0.5 * (lo + hi), lambda, n_t, mu), bin_width);
  // Roll so the peak sits at center_bin.
  const int shift = center_bin - centered.peak_bin;
  ArrayXd rolled = ArrayXd::Zero(n_t);
  for (int t = 0; t < n_t; ++t) {
    const int src = t - shift;
    if (src >= 0 && src < n_t) rolled[t] = centered.samples[src];
  }
  Irf irf = normalize_irf(rolled, bin_width);
  if (irf.peak_bin != center_bin) throw std::logic_error("peak misplaced");
  return irf;
}

std::string EstimatorSpec::name() const {
  switch (kind) {
    case EstimatorKind::Oracle: return "oracle";
    case EstimatorKind::BF: return "bf";
    case EstimatorKind::PB: return "pb";
    case EstimatorKind::HSM: return "hsm";
  }
  return "?";
}

namespace {

std::vector<double> toas_from_histogram(const PixelHistogram& hist) {
  std::vector<double> toas;
  toas.reserve(static_cast<std::size_t>(hist.total));
  for (int t = 0; t < hist.n_bins(); ++t) {
    for (int c = 0; c < hist.counts[t]; ++c) toas.push_back(t);
  }
  return toas;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, const Irf& irf) {
  if (spec.n_mc < 1) throw std::invalid_argument("N_MC must be >= 1");
  const DepthGrid grid = default_grid(irf);
  const ArrayXd log_prior =
      gaussian_log_prior(grid, spec.prior_mean, spec.prior_var);
  const double prior_sd = std::sqrt(spec.prior_var);

  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (double sbr : spec.sbr_values) {
    for (double msc : spec.msc_values) {
      const auto [r, b] = sbr_params(msc, sbr, irf.n_bins());
      const std::size_t ne = spec.estimators.size();
      std::vector<double> truths(spec.n_mc);
      std::vector<std::vector<double>> estimates(ne,
                                                 std::vector<double>(spec.n_mc));
      parallel_for(spec.n_mc, 0, [&](int trial) {
        std::seed_seq seq{spec.seed, cell, static_cast<std::uint64_t>(trial)};
        std::mt19937_64 rng(seq);
        double draw = std::normal_distribution<double>(spec.prior_mean, prior_sd)(rng);
        const int d_true = std::clamp(static_cast<int>(std::lround(draw)),
                                      grid.d_min, grid.d_max);
        truths[trial] = d_true;
        const PixelHistogram hist = generate_pixel_histogram(irf, d_true, r, b, rng);
        for (std::size_t e = 0; e < ne; ++e) {
          const EstimatorSpec& est = spec.estimators[e];
          double value;
          switch (est.kind) {
            case EstimatorKind::Oracle:
              value = oracle_mmse(hist, irf, r, b, log_prior, grid).estimate;
              break;
            case EstimatorKind::BF:
              value = bf_estimate(hist, irf, log_prior, grid).estimate;
              break;
            case EstimatorKind::PB:
              value = posterior_moments(
                          pseudo_posterior(hist, irf, est.beta, log_prior, grid))
                          .mean;
              break;
            case EstimatorKind::HSM: {
              const auto toas = toas_from_histogram(hist);
              value = toas.empty() ? spec.prior_mean : half_sample_mode(toas);
              break;
            }
          }
          estimates[e][trial] = value;
        }
      });
      for (std::size_t e = 0; e < ne; ++e) {
        const EstimatorSpec& est = spec.estimators[e];
        rows.push_back({est.name(),
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

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(12);
  out << "estimator,beta,SBR,MSC,p_d,N_MC,seed\n";
  for (const auto& row : rows) {
    out << row.estimator << ',';
    if (std::isnan(row.beta)) {
      out << "";
    } else {
      out << row.beta;
    }
    out << ',' << row.sbr << ',' << row.msc << ',' << row.p_d << ','
        << row.n_mc << ',' << row.seed << '\n';
  }
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "static") return Scenario::StaticPlane;
  if (name == "ramp") return Scenario::MovingRamp;
  if (name == "ball") return Scenario::BallExchange;
  throw std::invalid_argument("unknown scenario: " + name);
}

SceneTruth make_scene_video(const SceneSpec& spec, const Irf& irf,
                            const std::filesystem::path& splf_path,
                            const std::filesystem::path& truth_csv_path) {
  const DepthGrid grid = default_grid(irf);
  const auto [r_on, b] = sbr_params(spec.msc, spec.sbr, irf.n_bins());
  const int n_pixels = spec.rows * spec.cols;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  SplfHeader header;
  header.rows = static_cast<std::uint16_t>(spec.rows);
  header.cols = static_cast<std::uint16_t>(spec.cols);
  header.n_t = static_cast<std::uint32_t>(spec.n_t);
  header.n_frames = static_cast<std::uint32_t>(spec.n_frames);
  SplfWriter writer(splf_path, header);

  std::ofstream truth_out(truth_csv_path);
  if (!truth_out) {
    throw std::runtime_error("cannot write " + truth_csv_path.string());
  }
  truth_out << "frame,row,col,depth_bins,r,b\n";

  SceneTruth truth;
  truth.depth.assign(static_cast<std::size_t>(spec.n_frames) * n_pixels, nan);
  truth.r.assign(truth.depth.size(), 0.0);
  truth.b.assign(truth.depth.size(), b);

  // Scene geometry in bins.
  const int d_mid = static_cast<int>(std::lround(grid.mid()));
  const int ramp_start = std::max(grid.d_min, d_mid - spec.n_frames / 2);
  if (spec.scenario == Scenario::MovingRamp &&
      ramp_start + spec.n_frames - 1 > grid.d_max) {
    throw std::invalid_argument("ramp leaves the depth grid; fewer frames or larger N_T");
  }
  const int slab_near = std::clamp(d_mid - 40, grid.d_min, grid.d_max);
  const int slab_far = std::clamp(d_mid + 40, grid.d_min, grid.d_max);

  std::vector<PixelHistogram> frame(n_pixels);
  for (int f = 0; f < spec.n_frames; ++f) {
    for (int row = 0; row < spec.rows; ++row) {
      for (int col = 0; col < spec.cols; ++col) {
        const int p = row * spec.cols + col;
        double d = nan;
        switch (spec.scenario) {
          case Scenario::StaticPlane:
            d = d_mid;
            break;
          case Scenario::MovingRamp:
            d = ramp_start + f;
            break;
          case Scenario::BallExchange: {
            // Two static slabs on the outer quarters; a small disk moving
            // between them; the rest empty (background only).
            if (col < spec.cols / 4) {
              d = slab_near;
            } else if (col >= 3 * spec.cols / 4) {
              d = slab_far;
            } else {
              const double phase =
                  std::sin(2.0 * std::numbers::pi * f / std::max(spec.n_frames, 2));
              const double cx =
                  spec.cols / 2.0 + phase * spec.cols / 5.0;
              const double cy = spec.rows / 2.0;
              const double radius = std::max(1.5, spec.rows / 10.0);
              const double dx = col - cx, dy = row - cy;
              if (dx * dx + dy * dy <= radius * radius) d = d_mid;
            }
            break;
          }
        }
        const std::size_t idx = static_cast<std::size_t>(f) * n_pixels + p;
        std::seed_seq seq{spec.seed, static_cast<std::uint64_t>(f),
                          static_cast<std::uint64_t>(p)};
        std::mt19937_64 rng(seq);
        if (std::isnan(d)) {
          frame[p] = generate_pixel_histogram(irf, grid.d_min, 0.0, b, rng);
        } else {
          const int d_bin = static_cast<int>(d);
          frame[p] = generate_pixel_histogram(irf, d_bin, r_on, b, rng);
          truth.depth[idx] = d;
          truth.r[idx] = r_on;
        }
        truth_out << f << ',' << row << ',' << col << ',';
        if (std::isnan(d)) {
          truth_out << "nan";
        } else {
          truth_out << d;
        }
        truth_out << ',' << truth.r[idx] << ',' << b << '\n';
      }
    }
    writer.write_frame(frame);
  }
  return truth;
}

}  // namespace splidar
