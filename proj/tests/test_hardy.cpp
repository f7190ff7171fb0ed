#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "relfrac/hardy.hpp"
#include "relfrac/specfun.hpp"

using namespace relfrac;

TEST_CASE("random Gaussian mixtures satisfy the Herbst inequality") {
  const std::pair<int, double> cases[] = {{1, 0.25}, {1, 0.4}, {2, 0.5}, {3, 0.5}, {3, 0.75}};
  for (const auto& [N, s] : cases) {
    CAPTURE(N);
    CAPTURE(s);
    const double lambda = constants(N, s).Lambda_Ns;
    std::mt19937_64 rng(20240917);
    for (int i = 0; i < 20; ++i) {
      const GaussianMixture u = random_mixture(N, rng);
      const HerbstTerms t = herbst_gaussian_mixture(u, s);
      CHECK(t.weighted > 0.0);
      CHECK(t.margin > 0.0);
      CHECK(t.ratio > lambda);
      CHECK(t.margin == doctest::Approx(t.kinetic - lambda * t.weighted).epsilon(1e-12));
    }
  }
}

TEST_CASE("single centred Gaussian matches the Gamma-ratio closed form") {
  for (int N : {1, 2, 3}) {
    for (double s : {0.25, 0.45}) {
      for (double w : {0.3, 1.0, 4.0}) {
        GaussianMixture u;
        u.N = N;
        u.amp = {1.0};
        u.width = {w};
        u.center = {0.0};
        const HerbstTerms t = herbst_gaussian_mixture(u, s);
        const double expected = std::tgamma(0.5 * N + s) / std::tgamma(0.5 * N - s);
        CHECK(std::abs(t.ratio / expected - 1.0) <= 1e-9);
        if (N == 1) {
          // kinetic = Gamma(1/2 + s) (2w)^{s - 1/2}
          const double kin = std::tgamma(0.5 + s) * std::pow(2.0 * w, s - 0.5);
          CHECK(std::abs(t.kinetic / kin - 1.0) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("near-optimizer family approaches the sharp constant") {
  const std::pair<int, double> cases[] = {{1, 0.25}, {3, 0.5}, {3, 0.75}};
  for (const auto& [N, s] : cases) {
    CAPTURE(N);
    CAPTURE(s);
    const double lambda = constants(N, s).Lambda_Ns;
    double previous = INFINITY;
    for (double eps : {0.1, 0.01, 0.001}) {
      const HerbstTerms t = herbst_near_optimizer(N, s, eps);
      CHECK(t.ratio > lambda);
      CHECK(t.ratio < previous);
      previous = t.ratio;
    }
    CHECK(previous / lambda - 1.0 <= 0.05);
  }
}

TEST_CASE("Herbst routines reject invalid arguments") {
  GaussianMixture u;
  u.N = 1;
  u.amp = {1.0};
  u.width = {1.0};
  u.center = {0.0};
  CHECK_THROWS_AS(herbst_gaussian_mixture(u, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(herbst_near_optimizer(2, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(herbst_near_optimizer(1, 0.25, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(herbst_near_optimizer(1, 0.6, 0.1), std::invalid_argument);
}
