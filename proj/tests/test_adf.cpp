#include "splidar/adf.hpp"
#include "splidar/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace splidar;

namespace {

double gauss_density(double x, double mu, double var) {
  return std::exp(-0.5 * (x - mu) * (x - mu) / var) /
         std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

TEST_CASE("neighbor_weights") {
  SUBCASE("paper defaults M=5, nu0=0.5") {
    const ArrayXd w = neighbor_weights(5, 0.5);
    CHECK(w[0] == 0.5);
    for (int i = 1; i < 5; ++i) CHECK(w[i] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("M=1 identity") {
    const ArrayXd w = neighbor_weights(1, 1.0);
    CHECK(w.size() == 1);
    CHECK(w[0] == 1.0);
  }
  SUBCASE("M=2") {
    const ArrayXd w = neighbor_weights(2, 0.3);
    CHECK(w[0] == doctest::Approx(0.3));
    CHECK(w[1] == doctest::Approx(0.7));
  }
  SUBCASE("M=1 with nu0 != 1 is rejected") {
    CHECK_THROWS(neighbor_weights(1, 0.5));
  }
}

TEST_CASE("predict_prior: all undetected gives the flat component") {
  const DepthGrid grid{0, 1500};
  std::vector<std::optional<NeighborBelief>> nb(5, std::nullopt);
  const GaussianMixture mix = predict_prior(nb, 0.5, std::sqrt(3.0), grid);
  for (int c = 0; c < 5; ++c) {
    CHECK(mix.means[c] == doctest::Approx(750.0));
    CHECK(mix.variances[c] == doctest::Approx(1500.0 * 1500.0 / 12.0));
  }
}

TEST_CASE("predict_prior: M=1 variance additivity") {
  const DepthGrid grid{0, 1500};
  std::vector<std::optional<NeighborBelief>> nb{
      NeighborBelief{{600.0, 25.0}, true}};
  const GaussianMixture mix = predict_prior(nb, 1.0, std::sqrt(3.0), grid);
  CHECK(mix.means[0] == 600.0);
  CHECK(mix.variances[0] == doctest::Approx(28.0).epsilon(1e-15));
}

TEST_CASE("predict_prior: detected center plus flat neighbors matches the closed form") {
  const DepthGrid grid{0, 1500};
  std::vector<std::optional<NeighborBelief>> nb(5, std::nullopt);
  nb[0] = NeighborBelief{{600.0, 25.0}, true};
  const GaussianMixture mix = predict_prior(nb, 0.5, std::sqrt(3.0), grid);
  const ArrayXd dens = mix.density_on_grid(grid);
  for (int i = 0; i < grid.size(); ++i) {
    const double d = grid.d_min + i;
    const double expect =
        0.5 * gauss_density(d, 600.0, 28.0) + 0.5 * gauss_density(d, 750.0, 187500.0);
    CHECK(dens[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("predict_prior density matches the mixture formula on random configs") {
  std::mt19937_64 rng(17);
  const DepthGrid grid{50, 450};
  for (int rep = 0; rep < 20; ++rep) {
    const int m = (rep % 2 == 0) ? 5 : 2;
    const double nu0 = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const double sigma_rw = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
    std::vector<std::optional<NeighborBelief>> nb(m);
    for (int c = 0; c < m; ++c) {
      if (std::bernoulli_distribution(0.3)(rng)) continue;  // missing
      nb[c] = NeighborBelief{
          {std::uniform_real_distribution<double>(100.0, 400.0)(rng),
           std::uniform_real_distribution<double>(1.0, 200.0)(rng)},
          std::bernoulli_distribution(0.7)(rng)};
    }
    const GaussianMixture mix = predict_prior(nb, nu0, sigma_rw, grid);
    const ArrayXd w = neighbor_weights(m, nu0);
    const ArrayXd dens = mix.density_on_grid(grid);
    for (int i = 0; i < grid.size(); i += 7) {
      const double d = grid.d_min + i;
      double expect = 0.0;
      for (int c = 0; c < m; ++c) {
        if (nb[c].has_value() && nb[c]->detected) {
          expect += w[c] * gauss_density(d, nb[c]->belief.mean,
                                         nb[c]->belief.variance + sigma_rw * sigma_rw);
        } else {
          expect += w[c] * gauss_density(d, grid.mid(), grid.flat_variance());
        }
      }
      CHECK(dens[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("prior integrates to about 1 for beliefs well inside the grid") {
  const DepthGrid grid{0, 1000};
  std::vector<std::optional<NeighborBelief>> nb{
      NeighborBelief{{500.0, 100.0}, true},
      NeighborBelief{{480.0, 64.0}, true},
  };
  const GaussianMixture mix = predict_prior(nb, 0.6, 2.0, grid);
  CHECK(mix.density_on_grid(grid).sum() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("sigma_rw -> 0 limit: prior equals the discretized belief") {
  const DepthGrid grid{0, 1000};
  std::vector<std::optional<NeighborBelief>> nb{
      NeighborBelief{{500.0, 49.0}, true}};
  const GaussianMixture mix = predict_prior(nb, 1.0, 1e-9, grid);
  const ArrayXd dens = mix.density_on_grid(grid);
  for (int i = 450; i <= 550; ++i) {
    CHECK(std::abs(dens[i] - gauss_density(i, 500.0, 49.0)) < 1e-9);
  }
}

TEST_CASE("moment matching") {
  SUBCASE("discrete uniform over [0, 99]") {
    const DepthGrid grid{0, 99};
    const DiscretePosterior post =
        normalize_posterior(grid, ArrayXd::Zero(grid.size()));
    const GaussianBelief g = moment_match(post);
    CHECK(g.mean == doctest::Approx(49.5).epsilon(1e-12));
    CHECK(g.variance == doctest::Approx((100.0 * 100.0 - 1.0) / 12.0).epsilon(1e-12));
  }
  SUBCASE("discretized Gaussian recovers its moments") {
    const DepthGrid grid{0, 1200};
    DiscretePosterior post = normalize_posterior(
        grid, gaussian_log_prior(grid, 600.0, 2500.0));
    const GaussianBelief g = moment_match(post);
    CHECK(std::abs(g.mean - 600.0) < 0.1);
    CHECK(std::abs(g.variance - 2500.0) / 2500.0 < 0.01);
  }
  SUBCASE("idempotence to 1e-12") {
    const DepthGrid grid{0, 500};
    const DiscretePosterior post = normalize_posterior(
        grid, gaussian_log_prior(grid, 230.0, 144.0));
    const GaussianBelief g1 = moment_match(post);
    const DiscretePosterior again = normalize_posterior(
        grid, gaussian_log_prior(grid, g1.mean, g1.variance));
    const GaussianBelief g2 = moment_match(again);
    CHECK(g2.mean == doctest::Approx(g1.mean).epsilon(1e-12));
    CHECK(g2.variance == doctest::Approx(g1.variance).epsilon(1e-12));
  }
}

TEST_CASE("random-walk displacement coverage: 3 sigma stays in the central mass") {
  const DepthGrid grid{0, 1500};
  const double sigma_rw = std::sqrt(3.0);
  std::vector<std::optional<NeighborBelief>> nb{
      NeighborBelief{{600.0, 1.0}, true}};
  const GaussianMixture mix = predict_prior(nb, 1.0, sigma_rw, grid);
  const double sd = std::sqrt(mix.variances[0]);
  const double jump = 3.0 * sigma_rw;
  // Truth after a <= 3 sigma_RW jump sits within the 99.7% central mass.
  CHECK(std::abs((600.0 + jump) - mix.means[0]) <= 3.0 * sd);
}
