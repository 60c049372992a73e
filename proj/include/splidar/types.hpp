#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace splidar {

using Eigen::ArrayXd;
using Eigen::ArrayXi;

// Lower bound on belief variances (bins^2); keeps Gaussian mixtures proper.
inline constexpr double kVarianceFloor = 1e-6;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Per-pixel, per-frame photon counts over N_T time bins.
struct PixelHistogram {
  ArrayXi counts;
  std::int64_t total = 0;  // K = sum of counts

  int n_bins() const { return static_cast<int>(counts.size()); }
};

PixelHistogram histogram_from_counts(ArrayXi counts);

/// Builds a histogram from bin-resolution arrival times. Throws on
/// out-of-range ToAs, naming the offending value.
PixelHistogram histogram_from_toas(const std::vector<int>& toas, int n_t);

/// Admissible depth bins [d_min, d_max] at 1-bin resolution.
struct DepthGrid {
  int d_min = 0;
  int d_max = 0;

  int size() const { return d_max - d_min + 1; }
  bool contains(int d) const { return d >= d_min && d <= d_max; }
  double mid() const { return 0.5 * (d_min + d_max); }
  // Variance of the matching flat (uniform) depth distribution.
  double flat_variance() const {
    double w = static_cast<double>(d_max) - d_min;
    return w * w / 12.0;
  }
};

/// Gaussian summary of a pixel's depth pseudo-posterior (bins, bins^2).
struct GaussianBelief {
  double mean = 0.0;
  double variance = kVarianceFloor;
};

/// Per-pixel filter state carried from frame to frame.
struct PixelState {
  GaussianBelief belief;
  double presence = 0.5;        // pi
  double presence_prior = 0.5;  // pi0
  double background = 0.0;      // b hat, counts per bin
  std::optional<double> reflectivity;
  bool detected = false;  // presence > 0.5 at the last frame
};

/// Scene-level configuration shared by the pipeline and CLI.
struct SceneConfig {
  int rows = 32;
  int cols = 32;
  int n_frames = 100;
  int n_t = 1500;
  double bin_width = 2e-12;  // seconds per bin
  double beta = 0.5;
  double sigma_rw = 1.7320508075688772;  // sqrt(3) bins
  int neighbors = 5;                     // M, including the center pixel
  double nu0 = 0.5;
  // Detection prior hyperparameters.
  double refl_prior_mean = 55.0;  // expected signal count when present
  double refl_prior_shape = 2.0;
  std::vector<int> faulty_pixels;
  int threads = 0;  // 0 = hardware concurrency

  int n_pixels() const { return rows * cols; }
};

inline double metric_depth(double depth_bins, double bin_width) {
  return depth_bins * bin_width * kSpeedOfLight / 2.0;
}

}  // namespace splidar
