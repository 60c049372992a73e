#include "splidar/irf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace splidar {

PixelHistogram histogram_from_counts(ArrayXi counts) {
  PixelHistogram h;
  h.total = counts.cast<std::int64_t>().sum();
  h.counts = std::move(counts);
  return h;
}

PixelHistogram histogram_from_toas(const std::vector<int>& toas, int n_t) {
  ArrayXi counts = ArrayXi::Zero(n_t);
  for (int t : toas) {
    if (t < 0 || t >= n_t) {
      throw std::out_of_range("ToA " + std::to_string(t) +
                              " outside [0, " + std::to_string(n_t) + ")");
    }
    ++counts[t];
  }
  PixelHistogram h;
  h.counts = std::move(counts);
  h.total = static_cast<std::int64_t>(toas.size());
  return h;
}

namespace {

// Full width at half maximum via linear interpolation at the two
// half-maximum crossings. Falls back to 1 bin for shapes with no crossing
// (single-bin or delta-like responses).
double measure_fwhm(const ArrayXd& s, int peak) {
  const int n = static_cast<int>(s.size());
  const double half = 0.5 * s[peak];
  double left = peak, right = peak;
  bool has_left = false, has_right = false;
  for (int i = peak; i > 0; --i) {
    if (s[i - 1] < half && s[i] >= half) {
      left = (i - 1) + (half - s[i - 1]) / (s[i] - s[i - 1]);
      has_left = true;
      break;
    }
  }
  for (int i = peak; i + 1 < n; ++i) {
    if (s[i] >= half && s[i + 1] < half) {
      right = i + (s[i] - half) / (s[i] - s[i + 1]);
      has_right = true;
      break;
    }
  }
  if (!has_left || !has_right) return 1.0;
  return right - left;
}

}  // namespace

Irf normalize_irf(const ArrayXd& raw, double bin_width) {
  if (raw.size() == 0) throw std::invalid_argument("degenerate IRF: empty");
  if ((raw < 0.0).any()) {
    throw std::invalid_argument("IRF has negative samples; clamp before normalizing");
  }
  const double sum = raw.sum();
  if (sum <= 0.0) throw std::invalid_argument("degenerate IRF: all-zero input");

  Irf irf;
  irf.samples = raw / sum;
  irf.bin_width = bin_width;

  const int n = irf.n_bins();
  int peak = 0;
  for (int i = 1; i < n; ++i) {
    if (irf.samples[i] > irf.samples[peak]) peak = i;
  }
  irf.peak_bin = peak;

  int first = 0;
  while (irf.samples[first] == 0.0) ++first;
  int last = n - 1;
  while (irf.samples[last] == 0.0) --last;
  irf.support_begin = first;
  irf.support_end = last + 1;

  irf.fwhm_bins = measure_fwhm(irf.samples, peak);
  return irf;
}

DepthGrid default_grid(const Irf& irf) {
  const int guard = irf.support_half_width();
  DepthGrid grid{guard, irf.n_bins() - 1 - guard};
  if (grid.d_min > grid.d_max) {
    throw std::invalid_argument("IRF support too wide for its bin count");
  }
  return grid;
}

ArrayXd shifted_irf(const Irf& irf, int d, double beta, const DepthGrid& grid) {
  if (!grid.contains(d)) {
    throw std::out_of_range("depth " + std::to_string(d) + " outside grid [" +
                            std::to_string(grid.d_min) + ", " +
                            std::to_string(grid.d_max) + "]");
  }
  const int n = irf.n_bins();
  const int offset = d - irf.peak_bin;
  ArrayXd out = ArrayXd::Zero(n);
  const int begin = std::max(0, irf.support_begin + offset);
  const int end = std::min(n, irf.support_end + offset);
  for (int t = begin; t < end; ++t) {
    out[t] = std::pow(irf.samples[t - offset], beta);
  }
  return out;
}

ArrayXd cross_correlate_power(const PixelHistogram& hist, const Irf& irf,
                              double beta, const DepthGrid& grid) {
  const int n = irf.n_bins();
  const int sup_begin = irf.support_begin;
  const int sup_len = irf.support_end - irf.support_begin;
  ArrayXd powered(sup_len);
  for (int i = 0; i < sup_len; ++i) {
    powered[i] = std::pow(irf.samples[sup_begin + i], beta);
  }

  ArrayXd out = ArrayXd::Zero(grid.size());
  for (int d = grid.d_min; d <= grid.d_max; ++d) {
    const int offset = d - irf.peak_bin + sup_begin;
    const int begin = std::max(0, offset);
    const int end = std::min(n, offset + sup_len);
    double acc = 0.0;
    for (int t = begin; t < end; ++t) {
      acc += hist.counts[t] * powered[t - offset];
    }
    out[d - grid.d_min] = acc;
  }
  return out;
}

}  // namespace splidar
