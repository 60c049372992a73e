#pragma once

#include "splidar/types.hpp"

namespace splidar {

/// Discretized, normalized instrument response.
struct Irf {
  ArrayXd samples;       // sums to 1
  int peak_bin = 0;      // argmax, lowest index on ties
  double fwhm_bins = 1;  // full width at half maximum
  double bin_width = 2e-12;
  int support_begin = 0;  // first nonzero sample
  int support_end = 0;    // one past last nonzero sample

  int n_bins() const { return static_cast<int>(samples.size()); }

  // Half-width of the nonzero support around the peak; the depth grid is
  // guarded by this amount so shifts never clip the shape.
  int support_half_width() const {
    return std::max(peak_bin - support_begin, support_end - 1 - peak_bin);
  }
};

/// Normalizes a raw response to unit sum and computes peak and FWHM
/// (half-maximum crossings by linear interpolation). Negative entries must
/// be clamped by the caller; an all-zero input throws "degenerate IRF".
Irf normalize_irf(const ArrayXd& raw, double bin_width = 2e-12);

/// Widest grid on which all shifts of `irf` preserve its full shape.
DepthGrid default_grid(const Irf& irf);

/// s0~(t - d + peak)^beta, element-wise, zero outside support. The shift
/// convention aligns the IRF peak to bin d. Throws if d is off the grid.
ArrayXd shifted_irf(const Irf& irf, int d, double beta, const DepthGrid& grid);

/// z^T s_d^beta for every d in the grid. Iterates only the IRF support, so
/// the cost is O(grid * support) rather than O(grid * N_T).
ArrayXd cross_correlate_power(const PixelHistogram& hist, const Irf& irf,
                              double beta, const DepthGrid& grid);

}  // namespace splidar
