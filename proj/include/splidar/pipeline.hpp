#pragma once

#include "splidar/adf.hpp"
#include "splidar/detector.hpp"
#include "splidar/io.hpp"
#include "splidar/irf.hpp"
#include "splidar/types.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace splidar {

/// Per-frame outputs; NaN marks pixels with no detected surface.
struct FrameResult {
  int frame_index = 0;
  int rows = 0;
  int cols = 0;
  ArrayXd depth;        // bins, NaN when absent
  ArrayXd variance;     // bins^2
  ArrayXd presence;     // pi
  ArrayXd background;   // b hat
  ArrayXd reflectivity; // r hat, NaN when absent
  std::vector<int> flagged_pixels;  // contained per-pixel numeric failures
  double duration_ms = 0.0;
};

/// Online per-frame filter: prior prediction, pseudo-posterior update,
/// moment matching, presence test, parameter estimation, presence-prior
/// propagation. State carries only the previous frame.
class Pipeline {
 public:
  Pipeline(const SceneConfig& config, Irf irf);

  FrameResult process_frame(const std::vector<PixelHistogram>& frame);

  const std::vector<PixelState>& state() const { return state_; }
  const DepthGrid& grid() const { return grid_; }
  const Irf& irf() const { return irf_; }
  int frames_processed() const { return frame_index_; }

 private:
  SceneConfig config_;
  Irf irf_;
  DepthGrid grid_;
  std::vector<PixelState> state_;
  std::vector<std::vector<int>> neighborhoods_;  // center first, -1 = off view
  std::vector<bool> faulty_;
  int frame_index_ = 0;
};

struct SequenceSummary {
  std::int64_t frames = 0;
  double mean_latency_ms = 0.0;
  double detection_rate = 0.0;  // fraction of pixel-frames with pi > 0.5
  bool truncated = false;
};

using FrameSink = std::function<void(const FrameResult&)>;

/// Streams frames from an SPLF reader through the pipeline in order,
/// constant memory in the frame count. Truncated input is processed up to
/// the last complete frame and reported.
SequenceSummary run_sequence(SplfReader& reader, Pipeline& pipeline,
                             const FrameSink& sink);

/// CSV/point-cloud sink writing depth_XXXX.csv, variance_XXXX.csv,
/// presence_XXXX.csv per frame and one cumulative cloud.xyz
/// (x, y, depth_m, signal) with a record per detected pixel per frame.
class CsvSink {
 public:
  CsvSink(const std::filesystem::path& out_dir, double bin_width);
  void operator()(const FrameResult& result);

 private:
  std::filesystem::path dir_;
  double bin_width_;
  std::ofstream cloud_;
};

}  // namespace splidar
