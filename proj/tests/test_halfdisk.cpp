#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "relfrac/angular.hpp"
#include "relfrac/halfdisk.hpp"
#include "relfrac/specfun.hpp"

using namespace relfrac;

namespace {

struct Oracle {
  AngularEigenpair pair;
  double m = 0.0, p = 0.0;
  double operator()(double r, double a) const {
    const double radial = m == 0.0 ? std::pow(r, pair.sigma_plus) : std::pow(r, -p) * bessel_i(pair.bessel_nu, m * r);
    return radial * pair.profile.value_at(a);
  }
};

Oracle make_oracle(const Params& p) {
  SolveOptions o;
  o.grid_n = 4096;
  Oracle orc;
  orc.pair = solve_sector(p, 0, 1, o)[0];
  orc.m = p.m;
  orc.p = p.half_gap();
  return orc;
}

BoundaryData dirichlet_from(const std::function<double(double, double)>& f, double R, double rho_min) {
  BoundaryData bc;
  bc.outer = [=](double a) { return f(R, a); };
  bc.inner.data = [=](double a) { return f(rho_min, a); };
  bc.source = "oracle";
  return bc;
}

const Params kBase{1, 0.25, 0.0, PotentialSpec::two_point(0.05, 0.12)};

}  // namespace

TEST_CASE("polar grid") {
  auto g = make_polar_grid(0.25, 0.0, 2.0, 2e-3, 256, 64);
  CHECK(g.rho.front() == 2e-3);
  CHECK(g.rho.back() == 2.0);
  CHECK(g.q == doctest::Approx(std::pow(1000.0, 1.0 / 256)));
  CHECK(g.columns() == 66);
  CHECK(g.alpha.front() == doctest::Approx(-std::numbers::pi / 2));
  for (int j = 1; j <= g.n_alpha(); ++j) CHECK(g.alpha_mass[j] > 0.0);
  for (double w : g.rho_mass) CHECK(w > 0.0);
  auto gr = make_polar_grid_ratio(0.25, 0.0, 1.0, 1e-3, 1.03, 32);
  CHECK(gr.q <= 1.03);
  CHECK(gr.q > 1.029);
  CHECK_THROWS_AS(make_polar_grid(0.25, 0.0, 1.0, 1e-3, 32, 64), std::invalid_argument);
  CHECK_THROWS_AS(make_polar_grid(0.25, 0.0, 1.0, 2.0, 256, 64), std::invalid_argument);
  CHECK_THROWS_AS(make_polar_grid(0.25, 0.0, 1.0, 1e-3, 256, 4), std::invalid_argument);
}

TEST_CASE("power separable oracle") {
  const Oracle orc = make_oracle(kBase);
  auto sol = solve_halfdisk(kBase, make_polar_grid(0.25, 0.0, 1.0, 1e-3, 256, 256), dirichlet_from(orc, 1.0, 1e-3));
  CHECK(sol.residual_norm <= 1e-10);
  CHECK(oracle_error(sol, orc) <= 5e-3);
  CHECK(oracle_error(sol, orc) <= 1e-5);
  CHECK(sol.value_at(0.3, 0.2) == doctest::Approx(orc(0.3, 0.2)).epsilon(1e-3));
}

TEST_CASE("Bessel separable oracle") {
  Params p = kBase;
  p.m = 1.0;
  const Oracle orc = make_oracle(p);
  auto sol = solve_halfdisk(p, make_polar_grid(0.25, 1.0, 1.0, 1e-3, 256, 256), dirichlet_from(orc, 1.0, 1e-3));
  CHECK(oracle_error(sol, orc) <= 1e-2);
  CHECK(oracle_error(sol, orc) <= 1e-4);
}

TEST_CASE("refinement studies") {
  const Oracle orc = make_oracle(kBase);
  auto power = refine_study(kBase, 1.0, 1e-3, 96, 48, dirichlet_from(orc, 1.0, 1e-3), orc);
  CHECK(power.monotone);
  CHECK(power.observed_order >= 1.5);

  Params pm = kBase;
  pm.m = 1.0;
  const Oracle orb = make_oracle(pm);
  auto bessel = refine_study(pm, 1.0, 1e-3, 96, 48, dirichlet_from(orb, 1.0, 1e-3), orb);
  CHECK(bessel.monotone);
  CHECK(bessel.observed_order >= 1.5);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> c(6);
  for (double& v : c) v = coef(rng);
  BoundaryData bc;
  bc.outer = [c](double a) {
    double v = 2.0;
    for (int k = 0; k < 6; ++k) v += c[k] * std::cos((k + 1) * a) / (k + 1);
    return v;
  };
  bc.inner.data = [](double) { return 0.0; };
  auto cauchy = refine_study(kBase, 1.0, 1e-3, 96, 48, bc);
  REQUIRE(cauchy.error.size() == 2);
  CHECK(cauchy.monotone);
}

TEST_CASE("linear response to a small h") {
  const Oracle orc = make_oracle(kBase);
  const auto bc = dirichlet_from(orc, 1.0, 1e-3);
  const auto grid = make_polar_grid(0.25, 0.0, 1.0, 1e-3, 128, 96);
  const auto base = solve_halfdisk(kBase, grid, bc);
  std::vector<double> dev;
  for (double ch : {0.05, 0.1, 0.2}) {
    Params p = kBase;
    p.potential.h_kind = PotentialSpec::HKind::power;
    p.potential.c_h = ch;
    p.potential.chi = 0.5;
    const auto sol = solve_halfdisk(p, grid, bc);
    double d = 0.0;
    for (std::size_t k = 0; k < sol.values.size(); ++k) d = std::max(d, std::abs(sol.values[k] - base.values[k]));
    dev.push_back(d / ch);
  }
  // deviation / c_h is nearly constant (first-order response)
  CHECK(dev[1] == doctest::Approx(dev[0]).epsilon(0.1));
  CHECK(dev[2] == doctest::Approx(dev[0]).epsilon(0.2));
  CHECK(dev[0] > 0.0);
}

TEST_CASE("discrete maximum principle") {
  Params p{1, 0.25, 0.5, PotentialSpec::two_point(-0.1, 0.0)};
  p.potential.h_kind = PotentialSpec::HKind::power;
  p.potential.c_h = -0.1;
  BoundaryData bc;
  bc.outer = [](double a) { return 1.0 + std::sin(3 * a); };
  bc.inner.data = [](double a) { return std::max(0.0, std::cos(a)); };
  auto sol = solve_halfdisk(p, make_polar_grid(0.25, 0.5, 1.0, 1e-3, 128, 64), bc);
  double mn = 1.0;
  for (double v : sol.values) mn = std::min(mn, v);
  CHECK(mn >= -1e-10);
}

TEST_CASE("energy equals the boundary flux pairing") {
  Params p = kBase;
  p.m = 0.7;
  p.potential.h_kind = PotentialSpec::HKind::power;
  p.potential.c_h = 0.1;
  BoundaryData bc;
  bc.outer = [](double a) { return 1.0 + 0.3 * std::sin(a); };
  bc.inner.data = [](double a) { return 0.2 * std::cos(a); };
  auto sol = solve_halfdisk(p, make_polar_grid(0.25, 0.7, 1.0, 1e-3, 128, 64), bc);
  CHECK(std::abs(sol.energy - sol.flux_pairing) <= 1e-8 * std::abs(sol.energy));

  // homogeneous inner condition: pairing over the outer arc only
  BoundaryData hb = bc;
  hb.inner.kind = InnerCondition::Kind::homogeneous;
  hb.inner.gamma = make_oracle(kBase).pair.sigma_plus;
  auto hs = solve_halfdisk(p, make_polar_grid(0.25, 0.7, 1.0, 1e-3, 128, 64), hb);
  CHECK(std::abs(hs.energy - hs.flux_pairing) <= 1e-8 * std::abs(hs.energy));
  const double lam = std::pow(hs.grid.rho[0] / hs.grid.rho[1], hb.inner.gamma);
  for (int j = 0; j < hs.grid.columns(); ++j) CHECK(hs.at(0, j) == doctest::Approx(lam * hs.at(1, j)));
}

TEST_CASE("homogeneous inner condition recovers the power solution") {
  const Oracle orc = make_oracle(kBase);
  BoundaryData bc;
  bc.outer = [orc](double a) { return orc(1.0, a); };
  bc.inner.kind = InnerCondition::Kind::homogeneous;
  bc.inner.gamma = orc.pair.sigma_plus;
  auto sol = solve_halfdisk(kBase, make_polar_grid(0.25, 0.0, 1.0, 1e-3, 192, 96), bc);
  CHECK(oracle_error(sol, orc) <= 1e-4);
}

TEST_CASE("solver argument errors") {
  const auto grid = make_polar_grid(0.25, 0.0, 1.0, 1e-3, 128, 32);
  BoundaryData bc;
  bc.outer = [](double) { return 1.0; };
  bc.inner.data = [](double) { return 0.0; };
  CHECK_THROWS_AS(solve_halfdisk(Params{2, 0.25, 0.0, PotentialSpec::zero()}, grid, bc), std::invalid_argument);
  CHECK_THROWS_AS(solve_halfdisk(Params{1, 0.25, 0.0, PotentialSpec::constant(1.0)}, grid, bc), std::invalid_argument);
  CHECK_THROWS_AS(solve_halfdisk(Params{1, 0.25, 0.3, PotentialSpec::zero()}, grid, bc), std::invalid_argument);
  BoundaryData missing;
  CHECK_THROWS_AS(solve_halfdisk(kBase, grid, missing), std::invalid_argument);
  auto sol = solve_halfdisk(kBase, grid, bc);
  const std::string csv = sol.to_csv();
  CHECK(csv.rfind("rho,alpha,w\n", 0) == 0);
}
