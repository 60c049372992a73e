#include "splidar/pipeline.hpp"

#include "splidar/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace splidar {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
// Floor on the exponential background-prior mean; a zero-mean exponential
// is improper.
constexpr double kBackgroundPriorFloor = 1e-3;

std::vector<std::vector<int>> build_neighborhoods(int rows, int cols, int m) {
  const int n = rows * cols;
  std::vector<std::vector<int>> out(n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int p = r * cols + c;
      if (m == 1) {
        out[p] = {p};
      } else if (m == 5) {
        // 4-connected cross plus center; -1 marks off-view neighbors,
        // which contribute weakly informative components.
        auto at = [&](int rr, int cc) {
          return (rr >= 0 && rr < rows && cc >= 0 && cc < cols) ? rr * cols + cc
                                                                : -1;
        };
        out[p] = {p, at(r - 1, c), at(r + 1, c), at(r, c - 1), at(r, c + 1)};
      } else {
        throw std::invalid_argument("unsupported neighborhood size M=" +
                                    std::to_string(m) + " (use 1 or 5)");
      }
    }
  }
  return out;
}

}  // namespace

Pipeline::Pipeline(const SceneConfig& config, Irf irf)
    : config_(config), irf_(std::move(irf)), grid_(default_grid(irf_)) {
  if (irf_.n_bins() != config.n_t) {
    throw std::invalid_argument("IRF bin count does not match config N_T");
  }
  neighborhoods_ = build_neighborhoods(config.rows, config.cols, config.neighbors);
  faulty_.assign(config.n_pixels(), false);
  for (int p : config.faulty_pixels) {
    if (p < 0 || p >= config.n_pixels()) {
      throw std::invalid_argument("faulty pixel index out of range");
    }
    faulty_[p] = true;
  }
  // Frame-0 convention: flat Gaussian belief and pi0 = 0.5.
  PixelState init;
  init.belief = {grid_.mid(), grid_.flat_variance()};
  state_.assign(config.n_pixels(), init);
}

FrameResult Pipeline::process_frame(const std::vector<PixelHistogram>& frame) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n_pixels = config_.n_pixels();
  if (static_cast<int>(frame.size()) != n_pixels) {
    throw std::invalid_argument("frame size does not match configured geometry");
  }
  for (const auto& px : frame) {
    if (px.n_bins() != config_.n_t) {
      throw std::invalid_argument("histogram bin count does not match config");
    }
  }

  FrameResult result;
  result.frame_index = frame_index_;
  result.rows = config_.rows;
  result.cols = config_.cols;
  result.depth = ArrayXd::Constant(n_pixels, kNan);
  result.variance = ArrayXd::Constant(n_pixels, kNan);
  result.presence = ArrayXd::Constant(n_pixels, kNan);
  result.background = ArrayXd::Constant(n_pixels, kNan);
  result.reflectivity = ArrayXd::Constant(n_pixels, kNan);

  // All pixels read only the frame n-1 snapshot, so the processing order
  // cannot matter.
  const std::vector<PixelState> prev = state_;
  std::vector<PixelState> next(n_pixels);
  std::vector<char> flagged(n_pixels, 0);

  parallel_for(n_pixels, config_.threads, [&](int p) {
    try {
      std::vector<std::optional<NeighborBelief>> neighbors;
      neighbors.reserve(neighborhoods_[p].size());
      for (int q : neighborhoods_[p]) {
        if (q < 0 || faulty_[q]) {
          neighbors.push_back(std::nullopt);
        } else {
          neighbors.push_back(NeighborBelief{prev[q].belief, prev[q].detected});
        }
      }
      const GaussianMixture prior =
          predict_prior(neighbors, config_.nu0, config_.sigma_rw, grid_);

      PixelState st = prev[p];
      if (faulty_[p]) {
        // No observations: the pseudo-posterior is the prior itself.
        st.belief = {prior.mean(), prior.variance()};
        st.presence = 0.5;
        st.detected = false;
        st.reflectivity.reset();
        result.variance[p] = st.belief.variance;
        result.presence[p] = 0.5;
        next[p] = st;
        return;
      }

      const PixelHistogram& hist = frame[p];
      const ArrayXd log_prior = prior.log_density_on_grid(grid_);
      const DiscretePosterior post =
          pseudo_posterior(hist, irf_, config_.beta, log_prior, grid_);
      st.belief = moment_match(post);

      DetectionPriors priors;
      priors.background_mean =
          std::max(frame_index_ == 0
                       ? background_no_target(hist.total, config_.n_t)
                       : prev[p].background,
                   kBackgroundPriorFloor);
      priors.refl_shape = config_.refl_prior_shape;
      priors.refl_scale = config_.refl_prior_mean / config_.refl_prior_shape;
      priors.depth = &post;
      priors.presence_prior = prev[p].presence_prior;
      st.presence = target_presence_probability(hist, irf_, priors, grid_);
      st.detected = st.presence > 0.5;

      if (st.detected) {
        const int d_hat = std::clamp(
            static_cast<int>(std::lround(st.belief.mean)), grid_.d_min,
            grid_.d_max);
        const RateEstimate rb = mle_r_b(hist, irf_, d_hat, grid_);
        st.reflectivity = rb.r;
        st.background = rb.b;
        result.depth[p] = st.belief.mean;
        result.reflectivity[p] = rb.r;
      } else {
        st.reflectivity.reset();
        st.background = background_no_target(hist.total, config_.n_t);
      }
      result.variance[p] = st.belief.variance;
      result.presence[p] = st.presence;
      result.background[p] = st.background;
      next[p] = st;
    } catch (const std::exception&) {
      // Contain per-pixel numeric failures: carry the previous state and
      // flag the pixel instead of aborting the frame.
      flagged[p] = 1;
      next[p] = prev[p];
    }
  });

  ArrayXd presence(n_pixels);
  for (int p = 0; p < n_pixels; ++p) presence[p] = next[p].presence;
  const ArrayXd pi0 = propagate_presence_prior(presence, neighborhoods_, config_.nu0);
  for (int p = 0; p < n_pixels; ++p) next[p].presence_prior = pi0[p];

  for (int p = 0; p < n_pixels; ++p) {
    if (flagged[p]) result.flagged_pixels.push_back(p);
  }
  state_ = std::move(next);
  ++frame_index_;
  result.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return result;
}

SequenceSummary run_sequence(SplfReader& reader, Pipeline& pipeline,
                             const FrameSink& sink) {
  SequenceSummary summary;
  std::vector<PixelHistogram> frame;
  double total_ms = 0.0;
  std::int64_t detected = 0, pixels = 0;
  while (reader.read_frame(frame)) {
    FrameResult result = pipeline.process_frame(frame);
    total_ms += result.duration_ms;
    for (Eigen::Index p = 0; p < result.presence.size(); ++p) {
      if (result.presence[p] > 0.5) ++detected;
    }
    pixels += result.presence.size();
    ++summary.frames;
    if (sink) sink(result);
  }
  summary.truncated = reader.truncated();
  summary.mean_latency_ms = summary.frames > 0 ? total_ms / summary.frames : 0.0;
  summary.detection_rate =
      pixels > 0 ? static_cast<double>(detected) / pixels : 0.0;
  return summary;
}

CsvSink::CsvSink(const std::filesystem::path& out_dir, double bin_width)
    : dir_(out_dir), bin_width_(bin_width) {
  std::filesystem::create_directories(dir_);
  cloud_.open(dir_ / "cloud.xyz");
  if (!cloud_) throw std::runtime_error("cannot write " + (dir_ / "cloud.xyz").string());
  cloud_.precision(9);
}

namespace {

void write_map_csv(const std::filesystem::path& path, const ArrayXd& values,
                   int rows, int cols) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(9);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c > 0) out << ',';
      const double v = values[r * cols + c];
      if (std::isnan(v)) {
        out << "nan";
      } else {
        out << v;
      }
    }
    out << '\n';
  }
}

}  // namespace

void CsvSink::operator()(const FrameResult& result) {
  std::ostringstream tag;
  tag << std::setw(5) << std::setfill('0') << result.frame_index;
  write_map_csv(dir_ / ("depth_" + tag.str() + ".csv"), result.depth,
                result.rows, result.cols);
  write_map_csv(dir_ / ("variance_" + tag.str() + ".csv"), result.variance,
                result.rows, result.cols);
  write_map_csv(dir_ / ("presence_" + tag.str() + ".csv"), result.presence,
                result.rows, result.cols);
  for (int r = 0; r < result.rows; ++r) {
    for (int c = 0; c < result.cols; ++c) {
      const int p = r * result.cols + c;
      const double d = result.depth[p];
      if (std::isnan(d)) continue;
      cloud_ << c << ' ' << r << ' ' << metric_depth(d, bin_width_) << ' '
             << result.reflectivity[p] << '\n';
    }
  }
}

}  // namespace splidar
