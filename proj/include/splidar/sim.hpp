#pragma once

#include "splidar/irf.hpp"
#include "splidar/types.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace splidar {

/// counts[t] ~ Poisson(r * s_d(t) + b), independent across bins.
PixelHistogram generate_pixel_histogram(const Irf& irf, int d, double r,
                                        double b, std::mt19937_64& rng);

/// (r, b) from the SBR identity: r = MSC, b = MSC / (SBR * N_T).
std::pair<double, double> sbr_params(double msc, double sbr, int n_t);

/// Fraction of estimates within eta of the truth (strict inequality).
double p_d(const std::vector<double>& estimates,
           const std::vector<double>& truths, double eta);

/// Normalized Gaussian IRF with the requested FWHM, peak at center_bin.
/// Tails below 1e-16 of the peak are truncated to keep the support (and the
/// depth-grid guard) finite.
Irf make_gaussian_irf(double fwhm_bins, int center_bin, int n_t,
                      double bin_width = 2e-12);

/// Asymmetric surrogate for a measured response: exponentially modified
/// Gaussian calibrated to the requested FWHM, peak shifted to center_bin.
Irf make_emg_irf(double fwhm_bins, int center_bin, int n_t,
                 double bin_width = 2e-12);

enum class EstimatorKind { Oracle, BF, PB, HSM };

struct EstimatorSpec {
  EstimatorKind kind;
  double beta = 0.5;  // PB only

  std::string name() const;
};

struct SweepSpec {
  std::vector<double> sbr_values;
  std::vector<double> msc_values;
  std::vector<EstimatorSpec> estimators;
  int n_mc = 200;
  double eta = 28.0;
  double prior_mean = 600.0;
  double prior_var = 2500.0;
  std::uint64_t seed = 0;
};

struct SweepRow {
  std::string estimator;
  double beta;  // NaN for non-PB estimators
  double sbr;
  double msc;
  double p_d;
  int n_mc;
  std::uint64_t seed;
};

/// Monte Carlo p_d sweep over (SBR, MSC) cells: per trial, a depth drawn
/// from the (grid-clamped) Gaussian prior, one shared histogram, and every
/// estimator applied with the same prior. Deterministic given the seed,
/// with independent per-trial RNG streams.
std::vector<SweepRow> sweep(const SweepSpec& spec, const Irf& irf);

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows);

enum class Scenario { StaticPlane, MovingRamp, BallExchange };

Scenario scenario_from_string(const std::string& name);

struct SceneSpec {
  Scenario scenario = Scenario::StaticPlane;
  int rows = 16;
  int cols = 16;
  int n_frames = 100;
  int n_t = 1500;
  double msc = 50.0;
  double sbr = 1.0;
  std::uint64_t seed = 0;
};

/// Per-pixel, per-frame ground truth; depth is NaN where no surface exists.
struct SceneTruth {
  std::vector<double> depth;  // frame-major, then row-major pixels
  std::vector<double> r;
  std::vector<double> b;
};

/// Emits an SPLF stream plus a truth CSV (frame,row,col,depth_bins,r,b).
SceneTruth make_scene_video(const SceneSpec& spec, const Irf& irf,
                            const std::filesystem::path& splf_path,
                            const std::filesystem::path& truth_csv_path);

}  // namespace splidar
