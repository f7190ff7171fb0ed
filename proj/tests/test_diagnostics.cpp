#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "relfrac/angular.hpp"
#include "relfrac/diagnostics.hpp"
#include "relfrac/halfdisk.hpp"
#include "relfrac/quadrature.hpp"
#include "relfrac/specfun.hpp"

using namespace relfrac;

namespace {

using Radial = SeparableSolution::Radial;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

Params make_params(int N, double s, double m, PotentialSpec pot = PotentialSpec::zero()) {
  Params p;
  p.N = N;
  p.s = s;
  p.m = m;
  p.potential = pot;
  return p;
}

std::vector<double> log_radii(double lo, double hi, int n) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  return r;
}

double max_abs_diff(const std::vector<double>& v, double target) {
  double e = 0.0;
  for (double x : v) e = std::max(e, std::abs(x - target));
  return e;
}

}  // namespace

TEST_CASE("separable solutions: constant, linear trace and Bessel residual") {
  const Params p = make_params(1, 0.5, 0.0);
  const auto pairs = solve_sector(p, 0, 2);
  const SeparableSolution c = make_separable(pairs[0], Radial::power, 2.0);
  // N = 2s: gamma = sqrt(mu), so an eigenvalue error of 1e-10 becomes 1e-5 in gamma
  CHECK(std::abs(pairs[0].mu) <= 1e-9);
  CHECK(std::abs(c.gamma()) <= 1e-4);
  CHECK(std::abs(c.phi(0.3) / c.phi(0.9) - 1.0) <= 1e-4);
  // mu = 1 pair: w = r psi(alpha) with psi proportional to sin(alpha), so the trace is linear in x
  const SeparableSolution lin = make_separable(pairs[1], Radial::power, 1.0);
  CHECK(lin.gamma() == doctest::Approx(1.0).epsilon(1e-8));
  const double slope = lin.value(0.5, kHalfPi) / 0.5;
  for (double x : {0.1, 0.3, 0.7}) CHECK(std::abs(lin.value(x, kHalfPi) - slope * x) <= 1e-8 * std::abs(slope));
  CHECK(lin.certified_residual <= 1e-12);

  const Params q = make_params(1, 0.5, 1.0);
  const SeparableSolution b = make_separable(solve_sector(q, 0, 1)[0], Radial::modified_bessel, 1.0, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(std::log(1e-3), std::log(3.0));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) worst = std::max(worst, b.ode_residual(std::exp(u(rng))));
  CHECK(worst <= 1e-8);

  AngularEigenpair bad = pairs[0];
  bad.admissible = false;
  CHECK_THROWS_AS(make_separable(bad, Radial::power, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_separable(pairs[0], Radial::modified_bessel, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("power solutions give a constant frequency and exact H growth") {
  struct Case {
    int N;
    double s;
    PotentialSpec pot;
  };
  const Case cases[] = {{1, 0.25, PotentialSpec::two_point(0.05, 0.1)},
                        {2, 0.5, PotentialSpec::constant(0.2)},
                        {3, 0.75, PotentialSpec::zero()}};
  for (const Case& cs : cases) {
    CAPTURE(cs.N);
    const Params p = make_params(cs.N, cs.s, 0.0, cs.pot);
    for (const AngularEigenpair& e : solve_sector(p, 0, 2)) {
      const SeparableSolution w = make_separable(e, Radial::power, 1.7);
      const FrequencyTrace t = frequency_trace(w, p, log_radii(1e-3, 1.0, 16));
      CHECK(max_abs_diff(t.Nfreq, w.gamma()) <= 1e-10);
      CHECK(check_Hprime(t).max_residual <= 1e-12);
      CHECK(std::abs(e.norm_certificate - 1.0) <= 1e-8);
      for (std::size_t i = 0; i < t.r_values.size(); ++i) {
        const double expected = 1.7 * 1.7 * std::pow(t.r_values[i], 2.0 * w.gamma()) * e.norm_certificate;
        CHECK(std::abs(t.H[i] / expected - 1.0) <= 1e-12);
        CHECK(std::abs(t.nu1[i]) <= 1e-10);
        CHECK(t.nu2[i] == 0.0);
      }
      const GammaEstimate g = gamma_extract(t);
      CHECK(std::abs(g.gamma - w.gamma()) <= 1e-10);
      CHECK(g.cross_check);
    }
  }
}

TEST_CASE("Bessel solutions: frequency limit, H' identity and growth window") {
  const Params p = make_params(1, 0.5, 1.0);
  const SeparableSolution w = make_separable(solve_sector(p, 0, 1)[0], Radial::modified_bessel, 1.0, 1.0);
  const FrequencyTrace t = frequency_trace(w, p, log_radii(1e-3, 1.0, 31));
  bool found = false;
  for (std::size_t i = 0; i < t.r_values.size(); ++i)
    if (std::abs(t.r_values[i] - 0.01) < 1e-12) {
      CHECK(std::abs(t.Nfreq[i] - w.gamma()) <= 1e-3);
      found = true;
    }
  CHECK(found);
  CHECK(check_Hprime(t).max_residual <= 1e-6);
  const GammaEstimate g = gamma_extract(t);
  CHECK(std::abs(g.gamma - w.gamma()) <= 1e-3);
  CHECK(std::abs(t.gamma_fit - g.gamma) <= 1e-15);
  // slope of log H against log r on the final decade
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.r_values.size(); ++i)
    if (t.r_values[i] <= 1e-2 + 1e-15) {
      x.push_back(std::log(t.r_values[i]));
      y.push_back(std::log(t.H[i]));
    }
  const double slope = (y.front() - y.back()) / (x.front() - x.back());
  CHECK(slope >= 2.0 * w.gamma() - 0.05);
  CHECK(slope <= 2.0 * w.gamma() + 0.01);
  const std::string csv = t.to_csv();
  CHECK(csv.rfind("r,H,D,N,res_Hprime,nu1,nu2\n", 0) == 0);
}

TEST_CASE("frequency lower bound and nu2 bound shape for Bessel solutions") {
  struct Case {
    int N;
    double s;
    PotentialSpec pot;
  };
  const Case cases[] = {{1, 0.25, PotentialSpec::two_point(0.05, 0.1)}, {3, 0.5, PotentialSpec::constant(0.2)}};
  for (const Case& cs : cases) {
    CAPTURE(cs.N);
    const Params p = make_params(cs.N, cs.s, 1.0, cs.pot);
    const SeparableSolution w = make_separable(solve_sector(p, 0, 1)[0], Radial::modified_bessel, 1.0, 1.0);
    const FrequencyTrace t = frequency_trace(w, p, log_radii(1e-3, 1.0, 31));
    double cmin = INFINITY, cmax = 0.0;
    for (std::size_t i = 0; i < t.r_values.size(); ++i) {
      CHECK(t.Nfreq[i] > -p.half_gap());
      CHECK(std::isfinite(t.nu2[i]));
      CHECK(std::abs(t.nu1[i]) <= 1e-10);
      if (t.r_values[i] <= 1e-2) {
        const double c = std::abs(t.nu2[i]) / ((t.Nfreq[i] + p.half_gap()) * t.r_values[i]);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
      }
    }
    CHECK(std::isfinite(cmax));
    CHECK(cmax <= 1.01 * cmin);
  }
}

TEST_CASE("Pohozaev identities hold for separable solutions") {
  struct Case {
    int N;
    double s;
    PotentialSpec pot;
  };
  const Case cases[] = {{1, 0.5, PotentialSpec::zero()},
                        {1, 0.25, PotentialSpec::two_point(0.05, 0.1)},
                        {2, 0.5, PotentialSpec::constant(0.2)},
                        {3, 0.75, PotentialSpec::constant(-0.3)}};
  for (const Case& cs : cases) {
    CAPTURE(cs.N);
    CAPTURE(cs.s);
    const Params p0 = make_params(cs.N, cs.s, 0.0, cs.pot);
    for (const AngularEigenpair& e : solve_sector(p0, 0, 2)) {
      const SeparableSolution w = make_separable(e, Radial::power, 0.8);
      for (double r : {0.1, 0.5, 1.0}) {
        const PohozaevResidual res = pohozaev_residual(w, p0, r);
        CHECK(res.res1 <= 1e-8);
        CHECK(res.res2 <= 1e-8);
      }
    }
    const Params p1 = make_params(cs.N, cs.s, 1.0, cs.pot);
    const SeparableSolution b = make_separable(solve_sector(p1, 0, 1)[0], Radial::modified_bessel, 1.0, 1.0);
    for (double r : {0.1, 0.5, 1.0}) {
      const PohozaevResidual res = pohozaev_residual(b, p1, r);
      CHECK(res.res1 <= 1e-6);
      CHECK(res.res2 <= 1e-6);
      CHECK(res.scale1 > 0.0);
    }
  }
  const Params p = make_params(1, 0.25, 0.0);
  const SeparableSolution w = make_separable(solve_sector(p, 0, 1)[0], Radial::power, 1.0);
  CHECK_THROWS_AS(pohozaev_residual(w, make_params(1, 0.25, 1.0), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(pohozaev_residual(w, p, 0.0), std::invalid_argument);
}

TEST_CASE("blow-up rescaling converges to the homogeneous profile") {
  const Params p0 = make_params(2, 0.5, 0.0, PotentialSpec::constant(0.1));
  const SeparableSolution w = make_separable(solve_sector(p0, 0, 1)[0], Radial::power, -2.0);
  const BlowupReport zero = rescale_blowup(w, p0, {0.5, 0.1, 0.01});
  for (double d : zero.distance) CHECK(d == 0.0);
  CHECK(zero.decreasing);

  const Params p1 = make_params(1, 0.5, 1.0);
  const SeparableSolution b = make_separable(solve_sector(p1, 0, 1)[0], Radial::modified_bessel, 1.0, 1.0);
  const BlowupReport rep = rescale_blowup(b, p1, {0.2, 0.1, 0.05});
  CHECK(rep.decreasing);
  CHECK(rep.fitted_rate == doctest::Approx(2.0).epsilon(0.02));
  CHECK(rep.to_json().rfind("{\"tau\":[0.20000000000000001,", 0) == 0);
  CHECK_THROWS_AS(rescale_blowup(b, p1, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(rescale_blowup(b, p1, {1.5}), std::invalid_argument);
}

TEST_CASE("gamma extraction argument checks") {
  FrequencyTrace t;
  for (double r : log_radii(1e-3, 1.0, 20)) {
    t.r_values.push_back(r);
    t.H.push_back(r * r);
    t.Nfreq.push_back(1.0);
  }
  CHECK(gamma_extract(t).gamma == doctest::Approx(1.0).epsilon(1e-12));
  t.H[2] = 10.0;
  CHECK_THROWS_AS(gamma_extract(t), std::runtime_error);
  FrequencyTrace few;
  for (double r : log_radii(1e-2, 1.0, 5)) {
    few.r_values.push_back(r);
    few.H.push_back(r);
    few.Nfreq.push_back(0.5);
  }
  CHECK_THROWS_AS(gamma_extract(few), std::invalid_argument);
  FrequencyTrace narrow;
  for (double r : log_radii(0.5, 1.0, 10)) {
    narrow.r_values.push_back(r);
    narrow.H.push_back(r);
    narrow.Nfreq.push_back(0.5);
  }
  CHECK_THROWS_AS(gamma_extract(narrow), std::invalid_argument);
}

TEST_CASE("beta coefficients: orthogonality, Bessel leading term and sum rule") {
  const Params p0 = make_params(1, 0.25, 0.0, PotentialSpec::two_point(0.0, 0.1));
  const auto pairs = solve_sector(p0, 0, 3);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const SeparableSolution w = make_separable(pairs[k], Radial::power, 1.25);
    const auto beta = beta_coefficients(w, p0, pairs, 0.8);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i == k)
        CHECK(beta[i] == doctest::Approx(1.25 * pairs[k].norm_certificate).epsilon(1e-12));
      else
        CHECK(std::abs(beta[i]) <= 1e-8);
    }
  }
  for (const auto& [N, s] : {std::pair{1, 0.5}, std::pair{2, 0.5}, std::pair{3, 0.25}}) {
    CAPTURE(N);
    const Params p1 = make_params(N, s, 1.0);
    const auto bp = global_spectrum(p1, 3, 2);
    const SeparableSolution b = make_separable(bp[0], Radial::modified_bessel, 1.5, 1.0);
    const auto beta = beta_coefficients(b, p1, bp, 1.0);
    const double nu = bp[0].bessel_nu;
    const double expected = 1.5 * std::pow(0.5, nu) / std::tgamma(nu + 1.0);
    CHECK(std::abs(beta[0] - expected) <= 1e-4);
    for (std::size_t i = 1; i < beta.size(); ++i) CHECK(std::abs(beta[i]) <= 1e-8);
    CHECK(std::abs(projected_coefficient(b, bp[0], 1e-3) - beta[0]) <= 1e-3);
  }
  CHECK_THROWS_AS(beta_coefficients(make_separable(pairs[0], Radial::power, 1.0), p0, pairs, 0.0),
                  std::invalid_argument);
}

TEST_CASE("boundary Hardy inequality margins") {
  const Params p = make_params(2, 0.5, 0.0, PotentialSpec::constant(0.1));
  const AngularEigenpair e = solve_sector(p, 0, 1)[0];
  const SeparableSolution w = make_separable(e, Radial::power, 1.0);
  const HardyMargin hm = hardy_boundary_check(w, p, 1.0);
  // power ground state: margin = |psi|^2 r^{2 gamma + N - 2s} (gamma + (N-2s)/2) / 2
  const double gap = p.half_gap();
  CHECK(hm.margin >= 0.0);
  CHECK(hm.margin == doctest::Approx(e.norm_certificate * (w.gamma() + gap) / 2.0).epsilon(1e-8));

  const Params p1 = make_params(1, 0.25, 0.0, PotentialSpec::two_point(0.05, 0.1));
  const PolarFunction one{[](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                          [](double, double) { return 0.0; }};
  const double mu = mu1(p1).mu1, c = integrate_sin_cos_power(-kHalfPi, kHalfPi, 0.0, 0.5);
  const double closed = -kappa(0.25) * 0.15 / 0.5 + 0.25 * c - (mu + 0.0625) * c / 0.5;
  const HardyMargin h1 = hardy_boundary_check(one, p1, 1.0);
  CHECK(h1.margin > 0.0);
  CHECK(h1.margin == doctest::Approx(closed).epsilon(1e-8));

  const PolarFunction zero{[](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                           [](double, double) { return 0.0; }};
  CHECK(hardy_boundary_check(zero, p1, 1.0).margin == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double c0 = u(rng), c1 = u(rng), c2 = u(rng);
    // w = c0 + c1 x + c2 (t^2 - x^2) with t = rho cos(alpha), x = rho sin(alpha)
    const PolarFunction f{
        [=](double r, double a) { return c0 + c1 * r * std::sin(a) + c2 * r * r * std::cos(2.0 * a); },
        [=](double r, double a) { return c1 * std::sin(a) + 2.0 * c2 * r * std::cos(2.0 * a); },
        [=](double r, double a) { return c1 * r * std::cos(a) - 2.0 * c2 * r * r * std::sin(2.0 * a); }};
    for (double r : {0.5, 2.0}) CHECK(hardy_boundary_check(f, p1, r).margin >= -1e-10);
  }
}

TEST_CASE("half-disk pipeline: two-point a with power h") {
  Params p = make_params(1, 0.25, 0.0, PotentialSpec::two_point(0.1, 0.1).with_power_h(0.1, 0.5));
  PipelineOptions opt;
  opt.n_rho = 256;
  opt.n_alpha = 128;
  opt.rho_min = 1e-5;
  const PipelineResult r = halfdisk_pipeline(p, opt);
  CHECK(std::abs(r.gamma.gamma / r.gamma_pred - 1.0) <= 0.02);
  CHECK(r.min_frequency_margin > 0.0);
  CHECK(r.blowup.decreasing);
  CHECK(r.blowup.fitted_rate >= 0.25);
  CHECK(r.blowup.fitted_rate <= 0.75);
  CHECK(r.pohozaev.res1 <= 1e-2);
  CHECK(r.pohozaev.res2 <= 1e-2);
  CHECK(check_Hprime(r.trace).max_residual <= 1e-2);
  CHECK(r.trace.from_grid);

  Params degenerate = make_params(1, 0.5, 0.0, PotentialSpec::two_point(0.1, 0.1).with_power_h(0.1, 0.5));
  CHECK_THROWS_AS(halfdisk_pipeline(degenerate, opt), std::invalid_argument);
}

TEST_CASE("grid diagnostics reproduce a power oracle") {
  const Params p = make_params(1, 0.25, 0.0, PotentialSpec::two_point(0.05, 0.12));
  SolveOptions so;
  so.grid_n = 4096;
  const AngularEigenpair e = solve_sector(p, 0, 1, so)[0];
  const SeparableSolution w = make_separable(e, Radial::power, 1.0);
  const PolarGrid g = make_polar_grid(p.s, p.m, 1.0, 1e-3, 192, 192);
  BoundaryData bc;
  bc.outer = [&](double a) { return w.value(1.0, a); };
  bc.inner.data = [&](double a) { return w.value(1e-3, a); };
  const GridSolution sol = solve_halfdisk(p, g, bc);
  const FrequencyTrace t = frequency_trace(sol, p, log_radii(3e-3, 1.0, 24));
  CHECK(max_abs_diff(t.Nfreq, w.gamma()) <= 2e-3);
  CHECK(check_Hprime(t).max_residual <= 1e-2);
  const PohozaevResidual pr = pohozaev_residual(sol, p, 0.5);
  CHECK(pr.res1 <= 1e-2);
  CHECK(pr.res2 <= 1e-2);
  const auto beta = beta_coefficients(sol, p, {e}, 1.0);
  CHECK(beta[0] == doctest::Approx(e.norm_certificate).epsilon(1e-3));
  CHECK_THROWS_AS(frequency_trace(sol, p, {1e-3}), std::invalid_argument);
  CHECK_THROWS_AS(beta_coefficients(sol, p, {e}, 2.0), std::invalid_argument);
}
