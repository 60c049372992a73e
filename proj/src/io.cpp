#include "splidar/io.hpp"

#include <bit>
#include <cstring>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "SPLF I/O assumes a little-endian host");

namespace splidar {

namespace {

std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ArrayXd read_irf_csv(const std::filesystem::path& path, int* clamped_negatives) {
  const auto rows = read_csv_rows(path);
  ArrayXd out(rows.size());
  int clamped = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double v = rows[i][0];
    if (v < 0.0) {
      v = 0.0;
      ++clamped;
    }
    out[i] = v;
  }
  if (clamped_negatives) *clamped_negatives = clamped;
  return out;
}

std::vector<ArrayXd> read_multiband_irf_csv(const std::filesystem::path& path,
                                            int* clamped_negatives) {
  const auto rows = read_csv_rows(path);
  if (rows.empty()) throw std::runtime_error("empty IRF file: " + path.string());
  const std::size_t bands = rows[0].size();
  std::vector<ArrayXd> out(bands, ArrayXd(rows.size()));
  int clamped = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != bands) {
      throw std::runtime_error("ragged IRF file: " + path.string());
    }
    for (std::size_t l = 0; l < bands; ++l) {
      double v = rows[i][l];
      if (v < 0.0) {
        v = 0.0;
        ++clamped;
      }
      out[l][i] = v;
    }
  }
  if (clamped_negatives) *clamped_negatives = clamped;
  return out;
}

void write_irf_csv(const std::filesystem::path& path, const ArrayXd& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    out << samples[i] << '\n';
  }
}

SplfWriter::SplfWriter(const std::filesystem::path& path, const SplfHeader& header)
    : out_(path, std::ios::binary), header_(header) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_.write("SPLF", 4);
  out_.write(reinterpret_cast<const char*>(&header_.version), 2);
  out_.write(reinterpret_cast<const char*>(&header_.rows), 2);
  out_.write(reinterpret_cast<const char*>(&header_.cols), 2);
  out_.write(reinterpret_cast<const char*>(&header_.n_t), 4);
  out_.write(reinterpret_cast<const char*>(&header_.n_frames), 4);
}

void SplfWriter::write_frame(const std::vector<PixelHistogram>& pixels) {
  const std::size_t expected =
      static_cast<std::size_t>(header_.rows) * header_.cols;
  if (pixels.size() != expected) {
    throw std::invalid_argument("frame pixel count mismatch");
  }
  if (frames_written_ >= header_.n_frames) {
    throw std::logic_error("more frames than advertised in header");
  }
  std::vector<std::uint16_t> buf(header_.n_t);
  for (const auto& px : pixels) {
    if (px.counts.size() != static_cast<Eigen::Index>(header_.n_t)) {
      throw std::invalid_argument("histogram bin count mismatch");
    }
    for (std::uint32_t t = 0; t < header_.n_t; ++t) {
      const int c = px.counts[t];
      if (c < 0 || c > 0xFFFF) throw std::out_of_range("count exceeds u16");
      buf[t] = static_cast<std::uint16_t>(c);
    }
    out_.write(reinterpret_cast<const char*>(buf.data()), 2 * buf.size());
  }
  ++frames_written_;
}

SplfWriter::~SplfWriter() = default;

SplfReader::SplfReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary) {
  if (!in_) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  in_.read(magic, 4);
  if (!in_ || std::memcmp(magic, "SPLF", 4) != 0) {
    throw std::runtime_error("not an SPLF file: " + path.string());
  }
  in_.read(reinterpret_cast<char*>(&header_.version), 2);
  in_.read(reinterpret_cast<char*>(&header_.rows), 2);
  in_.read(reinterpret_cast<char*>(&header_.cols), 2);
  in_.read(reinterpret_cast<char*>(&header_.n_t), 4);
  in_.read(reinterpret_cast<char*>(&header_.n_frames), 4);
  if (!in_) throw std::runtime_error("truncated SPLF header: " + path.string());
  if (header_.version != 1) {
    throw std::runtime_error("unsupported SPLF version " +
                             std::to_string(header_.version));
  }
}

bool SplfReader::read_frame(std::vector<PixelHistogram>& pixels) {
  if (frames_read_ >= header_.n_frames) return false;
  const std::size_t n_pixels =
      static_cast<std::size_t>(header_.rows) * header_.cols;
  pixels.resize(n_pixels);
  std::vector<std::uint16_t> buf(header_.n_t);
  for (std::size_t p = 0; p < n_pixels; ++p) {
    in_.read(reinterpret_cast<char*>(buf.data()), 2 * buf.size());
    if (!in_) {
      truncated_ = true;
      return false;
    }
    ArrayXi counts(header_.n_t);
    for (std::uint32_t t = 0; t < header_.n_t; ++t) counts[t] = buf[t];
    pixels[p] = histogram_from_counts(std::move(counts));
  }
  ++frames_read_;
  return true;
}

}  // namespace splidar
