#include "splidar/io.hpp"
#include "splidar/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace splidar;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* stem) {
  return fs::temp_directory_path() / stem;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generator marginals: per-bin mean and variance are Poisson") {
  const Irf irf = make_gaussian_irf(10.0, 100, 200);
  const DepthGrid grid = default_grid(irf);
  const int d = static_cast<int>(grid.mid());
  const double r = 40.0, b = 0.5;
  const int n_rep = 4000;
  std::mt19937_64 rng(42);

  ArrayXd sum = ArrayXd::Zero(200), sum2 = ArrayXd::Zero(200);
  for (int rep = 0; rep < n_rep; ++rep) {
    const PixelHistogram h = generate_pixel_histogram(irf, d, r, b, rng);
    const ArrayXd z = h.counts.cast<double>();
    sum += z;
    sum2 += z * z;
  }
  const ArrayXd mean = sum / n_rep;
  const ArrayXd expect = r * shifted_irf(irf, d, 1.0, grid) + b;
  for (int t = 0; t < 200; ++t) {
    // 3-sigma band on the sample mean of a Poisson(lambda).
    const double se = std::sqrt(expect[t] / n_rep);
    CHECK(std::abs(mean[t] - expect[t]) <= 3.5 * se + 1e-12);
  }
  // Mean ~ variance on the peak bin (Poisson signature).
  const double m = mean[d];
  const double v = sum2[d] / n_rep - m * m;
  CHECK(std::abs(v - m) / m < 0.1);
}

TEST_CASE("sbr_params") {
  {
    const auto [r, b] = sbr_params(300.0, 0.01, 1500);
    CHECK(r == doctest::Approx(300.0).epsilon(1e-15));
    CHECK(b == doctest::Approx(20.0).epsilon(1e-15));
  }
  {
    const auto [r, b] = sbr_params(10.0, 1.0, 1500);
    CHECK(r == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(b == doctest::Approx(1.0 / 150.0).epsilon(1e-15));
  }
}

TEST_CASE("p_d counts strict inclusion") {
  std::vector<double> est, truth;
  for (int i = 0; i < 20; ++i) {
    truth.push_back(600.0);
    est.push_back(600.0 + i * 2.0);  // errors 0, 2, ..., 38
  }
  // Errors < 28 are hits: 0..26 -> 14 of 20. The boundary case belongs in
  // its own check below.
  CHECK(p_d(est, truth, 28.0) == doctest::Approx(14.0 / 20.0).epsilon(1e-15));

  est.assign(20, 600.0);
  est[0] = 628.0;  // exactly eta away: a miss under strict inequality
  est[1] = 627.999;
  CHECK(p_d(est, truth, 28.0) == doctest::Approx(19.0 / 20.0).epsilon(1e-15));

  est.assign(20, 600.0);
  for (int i = 0; i < 3; ++i) est[i] = 700.0;
  CHECK(p_d(est, truth, 28.0) == doctest::Approx(17.0 / 20.0).epsilon(1e-15));

  CHECK_THROWS(p_d({}, {}, 28.0));
  CHECK_THROWS(p_d({1.0}, {1.0, 2.0}, 28.0));
}

TEST_CASE("make_gaussian_irf") {
  const Irf irf = make_gaussian_irf(28.0, 750, 1500);
  CHECK(irf.peak_bin == 750);
  CHECK(irf.fwhm_bins == doctest::Approx(28.0).epsilon(0.02));
  CHECK(irf.samples.sum() == doctest::Approx(1.0).epsilon(1e-12));
  // Symmetric around the peak.
  for (int k = 1; k < 40; ++k) {
    CHECK(irf.samples[750 - k] == doctest::Approx(irf.samples[750 + k]).epsilon(1e-9));
  }
  // Tails truncated: the support is finite and well inside the window.
  CHECK(irf.support_begin > 0);
  CHECK(irf.support_end < 1500);
  CHECK(irf.samples[irf.support_begin - 1] == 0.0);
}

TEST_CASE("make_emg_irf hits the requested FWHM and is asymmetric") {
  for (double fwhm : {10.0, 28.0}) {
    const Irf irf = make_emg_irf(fwhm, 750, 1500);
    CHECK(irf.peak_bin == 750);
    CHECK(std::abs(irf.fwhm_bins - fwhm) <= 0.5);
    CHECK(irf.samples.sum() == doctest::Approx(1.0).epsilon(1e-12));
    // Exponential tail on the right: slower decay than the left side.
    const int k = static_cast<int>(fwhm);
    CHECK(irf.samples[750 + k] > irf.samples[750 - k]);
  }
}

TEST_CASE("sweep: deterministic byte-for-byte and perfect in the noise-free limit") {
  const Irf irf = make_gaussian_irf(6.0, 40, 300);
  SweepSpec spec;
  spec.sbr_values = {1e6};
  spec.msc_values = {500.0};
  spec.estimators = {{EstimatorKind::Oracle}, {EstimatorKind::BF},
                     {EstimatorKind::PB, 0.5}, {EstimatorKind::HSM}};
  spec.n_mc = 20;
  spec.eta = 6.0;
  spec.prior_mean = default_grid(irf).mid();
  spec.prior_var = 100.0;
  spec.seed = 7;

  const std::vector<SweepRow> rows = sweep(spec, irf);
  REQUIRE(rows.size() == 4);
  for (const SweepRow& row : rows) {
    INFO(row.estimator);
    CHECK(row.p_d == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(row.n_mc == 20);
  }

  const fs::path a = temp_file("sweep_a.csv"), b = temp_file("sweep_b.csv");
  write_sweep_csv(a, rows);
  write_sweep_csv(b, sweep(spec, irf));
  CHECK(slurp(a) == slurp(b));
  std::string head = slurp(a).substr(0, slurp(a).find('\n'));
  CHECK(head == "estimator,beta,SBR,MSC,p_d,N_MC,seed");
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("scenario_from_string") {
  CHECK(scenario_from_string("static") == Scenario::StaticPlane);
  CHECK(scenario_from_string("ramp") == Scenario::MovingRamp);
  CHECK(scenario_from_string("ball") == Scenario::BallExchange);
  CHECK_THROWS(scenario_from_string("nope"));
}

TEST_CASE("ramp scene: truth advances one bin per frame") {
  const Irf irf = make_gaussian_irf(28.0, 750, 1500);
  SceneSpec spec;
  spec.scenario = Scenario::MovingRamp;
  spec.rows = 4;
  spec.cols = 4;
  spec.n_frames = 30;
  spec.msc = 200.0;
  spec.sbr = 10.0;
  spec.seed = 3;
  const fs::path splf = temp_file("ramp.splf"), csv = temp_file("ramp_truth.csv");
  const SceneTruth truth = make_scene_video(spec, irf, splf, csv);

  const int pixels = spec.rows * spec.cols;
  REQUIRE(static_cast<int>(truth.depth.size()) == spec.n_frames * pixels);
  for (int f = 1; f < spec.n_frames; ++f) {
    for (int p = 0; p < pixels; ++p) {
      CHECK(truth.depth[f * pixels + p] - truth.depth[(f - 1) * pixels + p] ==
            doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  // The SPLF stream matches the truth in aggregate: frames and sizing.
  SplfReader reader(splf);
  CHECK(reader.header().n_frames == spec.n_frames);
  CHECK(reader.header().rows == spec.rows);
  CHECK(reader.header().n_t == spec.n_t);
  fs::remove(splf);
  fs::remove(csv);
}

TEST_CASE("ball scene: background slabs differ and the disk moves") {
  const Irf irf = make_gaussian_irf(28.0, 750, 1500);
  SceneSpec spec;
  spec.scenario = Scenario::BallExchange;
  spec.rows = 16;
  spec.cols = 16;
  spec.n_frames = 40;
  spec.msc = 100.0;
  spec.sbr = 5.0;
  spec.seed = 5;
  const fs::path splf = temp_file("ball.splf"), csv = temp_file("ball_truth.csv");
  const SceneTruth truth = make_scene_video(spec, irf, splf, csv);

  const int pixels = spec.rows * spec.cols;
  int empty = 0;
  for (double d : truth.depth) {
    if (std::isnan(d)) ++empty;
  }
  const double empty_frac =
      static_cast<double>(empty) / (spec.n_frames * pixels);
  // Half of the field of view (the middle band minus the ball) is empty.
  CHECK(empty_frac > 0.3);
  CHECK(empty_frac < 0.55);

  // The two slabs sit at distinct depths within every frame.
  const double left = truth.depth[0 * pixels + 0];
  const double right = truth.depth[0 * pixels + spec.cols - 1];
  CHECK(left != right);

  // The ball moves: the set of non-slab finite-depth pixels changes.
  auto ball_mask = [&](int f) {
    std::vector<bool> mask(pixels, false);
    for (int p = 0; p < pixels; ++p) {
      const int c = p % spec.cols;
      const bool slab = c < spec.cols / 4 || c >= 3 * spec.cols / 4;
      if (!slab && !std::isnan(truth.depth[f * pixels + p])) mask[p] = true;
    }
    return mask;
  };
  CHECK(ball_mask(0) != ball_mask(10));
  fs::remove(splf);
  fs::remove(csv);
}

TEST_CASE("scene generation is deterministic") {
  const Irf irf = make_gaussian_irf(12.0, 200, 400);
  SceneSpec spec;
  spec.scenario = Scenario::StaticPlane;
  spec.rows = 3;
  spec.cols = 3;
  spec.n_frames = 4;
  spec.n_t = 400;
  spec.msc = 30.0;
  spec.sbr = 2.0;
  spec.seed = 99;
  const fs::path s1 = temp_file("det1.splf"), c1 = temp_file("det1.csv");
  const fs::path s2 = temp_file("det2.splf"), c2 = temp_file("det2.csv");
  make_scene_video(spec, irf, s1, c1);
  make_scene_video(spec, irf, s2, c2);
  CHECK(slurp(s1) == slurp(s2));
  CHECK(slurp(c1) == slurp(c2));
  for (const auto& p : {s1, c1, s2, c2}) fs::remove(p);
}
