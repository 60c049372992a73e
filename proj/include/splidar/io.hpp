#pragma once

#include "splidar/types.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace splidar {

/// Reads a one-column IRF CSV (one value per line). Negative entries are
/// clamped to 0; `clamped_negatives` reports how many, for the caller's
/// warning.
ArrayXd read_irf_csv(const std::filesystem::path& path,
                     int* clamped_negatives = nullptr);

/// Reads an L-column multiband IRF CSV (comma-separated), one row per bin.
std::vector<ArrayXd> read_multiband_irf_csv(const std::filesystem::path& path,
                                            int* clamped_negatives = nullptr);

void write_irf_csv(const std::filesystem::path& path, const ArrayXd& samples);

/// SPLF frame file: header {magic "SPLF", version u16, rows u16, cols u16,
/// N_T u32, N_frames u32}, then per frame, per pixel (row-major), a dense
/// u16 count per bin. Little-endian throughout.
struct SplfHeader {
  std::uint16_t version = 1;
  std::uint16_t rows = 0;
  std::uint16_t cols = 0;
  std::uint32_t n_t = 0;
  std::uint32_t n_frames = 0;
};

class SplfWriter {
 public:
  SplfWriter(const std::filesystem::path& path, const SplfHeader& header);
  void write_frame(const std::vector<PixelHistogram>& pixels);
  ~SplfWriter();

 private:
  std::ofstream out_;
  SplfHeader header_;
  std::uint32_t frames_written_ = 0;
};

class SplfReader {
 public:
  explicit SplfReader(const std::filesystem::path& path);
  const SplfHeader& header() const { return header_; }
  /// Returns false at end of input; `truncated()` tells whether the file
  /// ended before the advertised frame count.
  bool read_frame(std::vector<PixelHistogram>& pixels);
  bool truncated() const { return truncated_; }
  std::uint32_t frames_read() const { return frames_read_; }

 private:
  std::ifstream in_;
  SplfHeader header_;
  std::uint32_t frames_read_ = 0;
  bool truncated_ = false;
};

}  // namespace splidar
