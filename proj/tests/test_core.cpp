#include "splidar/io.hpp"
#include "splidar/irf.hpp"
#include "splidar/sim.hpp"
#include "splidar/types.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace splidar;

TEST_CASE("normalize_irf scales to unit sum and finds the peak") {
  ArrayXd raw(5);
  raw << 0, 2, 4, 2, 0;
  const Irf irf = normalize_irf(raw);
  CHECK(irf.samples[0] == 0.0);
  CHECK(irf.samples[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(irf.samples[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(irf.peak_bin == 2);
  CHECK(irf.samples.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(irf.support_begin == 1);
  CHECK(irf.support_end == 4);
}

TEST_CASE("normalize_irf single bin") {
  ArrayXd raw(1);
  raw << 3.0;
  const Irf irf = normalize_irf(raw);
  CHECK(irf.samples[0] == 1.0);
  CHECK(irf.peak_bin == 0);
}

TEST_CASE("normalize_irf rejects degenerate input") {
  CHECK_THROWS(normalize_irf(ArrayXd::Zero(8)));
}

TEST_CASE("normalize_irf ties break to the lowest index") {
  ArrayXd raw(4);
  raw << 0, 2, 2, 0;
  CHECK(normalize_irf(raw).peak_bin == 1);
}

TEST_CASE("FWHM of a synthetic Gaussian is recovered") {
  const Irf irf = make_gaussian_irf(28.0, 600, 1500);
  CHECK(irf.fwhm_bins == doctest::Approx(28.0).epsilon(0.02));
  CHECK(irf.peak_bin == 600);
}

TEST_CASE("shifted_irf basics") {
  const Irf irf = make_gaussian_irf(6.0, 32, 64);
  const DepthGrid grid = default_grid(irf);

  SUBCASE("zero shift, unit power reproduces the samples") {
    const ArrayXd s = shifted_irf(irf, irf.peak_bin, 1.0, grid);
    CHECK((s - irf.samples).abs().maxCoeff() == 0.0);
  }
  SUBCASE("pure translation") {
    const ArrayXd s = shifted_irf(irf, irf.peak_bin + 5, 1.0, grid);
    for (int t = 5; t < 64; ++t) {
      CHECK(s[t] == irf.samples[t - 5]);
    }
  }
  SUBCASE("out-of-grid depth throws") {
    CHECK_THROWS(shifted_irf(irf, grid.d_max + 1, 1.0, grid));
  }
}

TEST_CASE("shifted_irf applies the power element-wise") {
  // Uniform response over 4 bins: 0.25 each, so 0.25^0.5 = 0.5 in-support.
  ArrayXd raw = ArrayXd::Zero(16);
  raw.segment(6, 4) = 1.0;
  const Irf irf = normalize_irf(raw);
  const DepthGrid grid = default_grid(irf);
  const ArrayXd s = shifted_irf(irf, irf.peak_bin, 0.5, grid);
  for (int t = 6; t < 10; ++t) CHECK(s[t] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.sum() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("shift invariance: identical value multisets and unit sums") {
  const Irf irf = make_gaussian_irf(8.0, 100, 256);
  const DepthGrid grid = default_grid(irf);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(grid.d_min, grid.d_max);
  for (int rep = 0; rep < 20; ++rep) {
    const int d1 = pick(rng), d2 = pick(rng);
    ArrayXd a = shifted_irf(irf, d1, 0.7, grid);
    ArrayXd b = shifted_irf(irf, d2, 0.7, grid);
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    CHECK((a - b).abs().maxCoeff() == 0.0);
    CHECK(shifted_irf(irf, d1, 1.0, grid).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("histogram_from_toas") {
  SUBCASE("empty") {
    const PixelHistogram h = histogram_from_toas({}, 8);
    CHECK(h.total == 0);
    CHECK(h.counts.sum() == 0);
  }
  SUBCASE("multiplicities") {
    const PixelHistogram h = histogram_from_toas({3, 3, 7}, 8);
    CHECK(h.counts[3] == 2);
    CHECK(h.counts[7] == 1);
    CHECK(h.total == 3);
  }
  SUBCASE("large K") {
    std::vector<int> toas(301, 5);
    CHECK(histogram_from_toas(toas, 153).total == 301);
  }
  SUBCASE("out of range names the value") {
    CHECK_THROWS_WITH_AS(histogram_from_toas({9}, 8),
                         doctest::Contains("9"), std::out_of_range);
  }
}

TEST_CASE("IRF CSV round trip with negative clamping") {
  const auto path = std::filesystem::temp_directory_path() / "irf_test.csv";
  {
    std::ofstream out(path);
    out << "0.0\n-1.0\n2.0\n1.0\n";
  }
  int clamped = 0;
  const ArrayXd raw = read_irf_csv(path, &clamped);
  CHECK(clamped == 1);
  CHECK(raw[1] == 0.0);
  CHECK(raw[2] == 2.0);
  std::filesystem::remove(path);
}

TEST_CASE("SPLF write/read round trip") {
  const auto path = std::filesystem::temp_directory_path() / "test.splf";
  SplfHeader header;
  header.rows = 2;
  header.cols = 3;
  header.n_t = 16;
  header.n_frames = 2;
  {
    SplfWriter writer(path, header);
    for (int f = 0; f < 2; ++f) {
      std::vector<PixelHistogram> frame(6);
      for (int p = 0; p < 6; ++p) {
        ArrayXi counts = ArrayXi::Zero(16);
        counts[(f + p) % 16] = p + 1;
        frame[p] = histogram_from_counts(std::move(counts));
      }
      writer.write_frame(frame);
    }
  }
  SplfReader reader(path);
  CHECK(reader.header().rows == 2);
  CHECK(reader.header().n_frames == 2);
  std::vector<PixelHistogram> frame;
  int frames = 0;
  while (reader.read_frame(frame)) {
    CHECK(frame.size() == 6);
    for (int p = 0; p < 6; ++p) {
      CHECK(frame[p].counts[(frames + p) % 16] == p + 1);
      CHECK(frame[p].total == p + 1);
    }
    ++frames;
  }
  CHECK(frames == 2);
  CHECK_FALSE(reader.truncated());
  std::filesystem::remove(path);
}

TEST_CASE("SPLF reader reports truncation") {
  const auto path = std::filesystem::temp_directory_path() / "trunc.splf";
  SplfHeader header;
  header.rows = 1;
  header.cols = 2;
  header.n_t = 8;
  header.n_frames = 3;
  {
    SplfWriter writer(path, header);
    std::vector<PixelHistogram> frame(2);
    for (auto& px : frame) px = histogram_from_counts(ArrayXi::Zero(8));
    writer.write_frame(frame);
  }
  SplfReader reader(path);
  std::vector<PixelHistogram> frame;
  CHECK(reader.read_frame(frame));
  CHECK_FALSE(reader.read_frame(frame));
  CHECK(reader.truncated());
  CHECK(reader.frames_read() == 1);
  std::filesystem::remove(path);
}
