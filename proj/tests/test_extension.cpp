#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "relfrac/extension.hpp"
#include "relfrac/specfun.hpp"

using namespace relfrac;

namespace {

constexpr double kPi = std::numbers::pi;

Params line(double s, double m) { return Params{1, s, m, PotentialSpec::zero()}; }

SpectralField gaussian(double L = 40.0, int n = 512) {
  return SpectralField::from_function(1, L, n, [](const double* x) { return std::exp(-x[0] * x[0]); });
}

SpectralField cosine(int k, double L, int n) {
  return SpectralField::from_function(1, L, n, [=](const double* x) { return std::cos(2.0 * kPi * k * x[0] / L); });
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a.values()[i] - b.values()[i]));
  return e;
}

double max_abs(const SpectralField& a) {
  double e = 0.0;
  for (double v : a.values()) e = std::max(e, std::abs(v));
  return e;
}

}  // namespace

TEST_CASE("spectral field bookkeeping") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int dim : {1, 2}) {
    const int n = dim == 1 ? 256 : 32;
    std::vector<double> v(dim == 1 ? n : n * n);
    for (double& x : v) x = nd(rng);
    auto f = SpectralField::from_values(dim, 7.0, n, v);
    CHECK(f.hermitian_defect() <= 1e-12);
    CHECK(std::abs(f.grid_norm() - f.modal_norm()) <= 1e-10 * f.grid_norm());
    auto g = SpectralField::from_modal(dim, 7.0, n, f.modal());
    CHECK(max_abs_diff(f, g) <= 1e-12);
  }
  CHECK_THROWS_AS(SpectralField::from_values(3, 1.0, 4, std::vector<double>(64)), std::invalid_argument);
  CHECK_THROWS_AS(SpectralField::from_values(1, 1.0, 8, std::vector<double>(7)), std::invalid_argument);
  std::vector<std::complex<double>> bad(8);
  bad[1] = {0.0, 1.0};
  CHECK_THROWS_AS(SpectralField::from_modal(1, 1.0, 8, bad), std::invalid_argument);
  auto f = cosine(2, 4.0, 8);
  const std::string csv = f.to_csv();
  CHECK(csv.rfind("x,value\n-2,1\n", 0) == 0);
}

TEST_CASE("symbol backend") {
  const double L = 40.0;
  auto u = cosine(5, L, 256);
  const double xi = 2.0 * kPi * 5 / L;
  auto a = apply_symbol(u, 0.5, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(a.values()[i] == doctest::Approx(std::sqrt(xi * xi + 1.0) * u.values()[i]).epsilon(1e-12).scale(1.0));

  auto one = SpectralField::from_values(1, L, 64, std::vector<double>(64, 1.0));
  const auto m2 = apply_symbol(one, 0.5, 2.0);
  for (double v : m2.values()) CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
  // m = 0 annihilates the mean
  const auto m0 = apply_symbol(one, 0.3, 0.0);
  for (double v : m0.values()) CHECK(std::abs(v) <= 1e-14);

  // energy two ways on a random field
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::vector<double> v(128);
  for (double& x : v) x = nd(rng);
  auto r = SpectralField::from_values(1, 10.0, 128, v);
  auto ar = apply_symbol(r, 0.75, 0.5);
  double grid = 0.0, modal = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) grid += r.spacing() * v[i] * ar.values()[i];
  for (std::size_t i = 0; i < v.size(); ++i) modal += 10.0 * std::pow(r.xi_squared(i) + 0.25, 0.75) * std::norm(r.modal()[i]);
  CHECK(grid == doctest::Approx(modal).epsilon(1e-12));

  // two dimensions: product mode
  auto u2 = SpectralField::from_function(2, 10.0, 32, [](const double* x) {
    return std::cos(2.0 * kPi * 2 * x[0] / 10.0) * std::cos(2.0 * kPi * 3 * x[1] / 10.0);
  });
  const double l2 = std::pow(2.0 * kPi / 10.0, 2) * 13.0 + 1.0;
  auto a2 = apply_symbol(u2, 0.25, 1.0);
  CHECK(max_abs_diff(a2, u2.map_modes([&](double) { return std::pow(l2, 0.25); })) <= 1e-12);
}

TEST_CASE("singular-integral backend agrees with the symbol backend") {
  for (double s : {0.25, 0.5, 0.75}) {
    for (double m : {0.5, 1.0, 2.0}) {
      const double L = std::max(40.0, 40.0 / m);
      auto u = SpectralField::from_function(1, L, 512, [&](const double* x) {
        return std::cos(2 * kPi * 3 * x[0] / L) + 0.5 * std::sin(2 * kPi * 11 * x[0] / L) +
               0.3 * std::cos(2 * kPi * 25 * x[0] / L);
      });
      auto a = apply_symbol(u, s, m);
      auto b = apply_kernel_pv(u, s, m, default_pv_cutoff(u));
      CAPTURE(s);
      CAPTURE(m);
      CHECK(max_abs_diff(a, b) / max_abs(a) <= 1e-3);
    }
  }
  // single mode, N = 1, s = 1/2, m = 1
  auto c = cosine(4, 40.0, 512);
  CHECK(max_abs_diff(apply_symbol(c, 0.5, 1.0), apply_kernel_pv(c, 0.5, 1.0, 2 * c.spacing())) <=
        1e-3 * max_abs(apply_symbol(c, 0.5, 1.0)));
}

TEST_CASE("singular-integral backend structure") {
  auto one = SpectralField::from_values(1, 40.0, 256, std::vector<double>(256, 3.0));
  const auto kc = apply_kernel_pv(one, 0.4, 2.0, 2 * one.spacing());
  for (double v : kc.values())
    CHECK(v == doctest::Approx(3.0 * std::pow(2.0, 0.8)).epsilon(1e-12));

  // odd input gives an odd kernel part
  const int n = 256;
  auto odd = SpectralField::from_function(1, 40.0, n, [](const double* x) { return x[0] * std::exp(-x[0] * x[0] / 4); });
  auto k = apply_kernel_pv(odd, 0.6, 1.0, 2 * odd.spacing());
  const double m2s = std::pow(1.0, 1.2);
  double asym = 0.0;
  for (int j = 1; j < n; ++j) {
    const double kj = k.values()[j] - m2s * odd.values()[j];
    const double kr = k.values()[n - j] - m2s * odd.values()[n - j];
    asym = std::max(asym, std::abs(kj + kr));
  }
  CHECK(asym <= 1e-10);

  const double h = odd.spacing();
  CHECK_THROWS_AS(apply_kernel_pv(odd, 0.5, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_kernel_pv(odd, 0.5, 1.0, 10.0 * h), std::invalid_argument);
  CHECK_THROWS_AS(apply_kernel_pv(odd, 0.5, 1.0, 0.2 * h), std::invalid_argument);
  CHECK_THROWS_AS(apply_kernel_pv(odd, 0.5, 0.0, 2.0 * h), std::invalid_argument);
  auto two_d = SpectralField::from_values(2, 1.0, 8, std::vector<double>(64, 1.0));
  CHECK_THROWS_AS(apply_kernel_pv(two_d, 0.5, 1.0, 0.2), std::invalid_argument);
}

TEST_CASE("Bessel kernel normalization and shape") {
  for (double s : {0.25, 0.5, 0.75}) {
    for (double t : {0.5, 1.0, 2.0}) {
      auto ks = kernel_quadrature(line(s, 1.0), t);
      CHECK(ks.integral() == doctest::Approx(theta_profile(s, t)).epsilon(1e-6));
      auto kc = kernel_quadrature(line(s, 1.0), t, true);
      CHECK(kc.integral() == doctest::Approx(theta_profile(1.0 - s, t)).epsilon(1e-6));
      for (double v : ks.values) CHECK(v >= 0.0);
      for (double v : kc.values) CHECK(v >= 0.0);
    }
  }
  for (int N : {2, 3}) {
    Params p{N, 0.5, 0.7, PotentialSpec::zero()};
    CHECK(kernel_quadrature(p, 0.8).integral() == doctest::Approx(theta_profile(0.5, 0.56)).epsilon(1e-6));
  }
  // uniform offsets give trapezoid weights
  std::vector<double> xs;
  for (int i = -4000; i <= 4000; ++i) xs.push_back(i * 0.01);
  auto ku = kernel_eval(line(0.5, 1.0), 0.5, xs);
  CHECK(ku.integral() == doctest::Approx(theta_profile(0.5, 0.5)).epsilon(1e-6));
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(ku.values[i] == ku.values[xs.size() - 1 - i]);

  // self-conjugate at s = 1/2
  auto a = kernel_eval(line(0.5, 1.3), 0.7, xs);
  auto b = conjugate_kernel_eval(line(0.5, 1.3), 0.7, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(a.values[i] == b.values[i]);

  // small-mass limit approaches the Poisson kernel
  for (double s : {0.25, 0.5, 0.75}) {
    const double nu = 0.5 + s;
    const double C = std::tgamma(nu) / (std::sqrt(kPi) * std::tgamma(s));
    std::vector<double> near;
    for (int i = 0; i <= 50; ++i) near.push_back(-5.0 + 0.2 * i);
    auto k = kernel_eval(line(s, 1e-3), 1.0, near);
    for (std::size_t i = 0; i < near.size(); ++i) {
      const double poisson = C / std::pow(1.0 + near[i] * near[i], nu);
      CHECK(std::abs(k.values[i] / poisson - 1.0) <= 1e-2);
    }
  }
  CHECK_THROWS_AS(kernel_eval(line(0.5, 1.0), 0.0, xs), std::invalid_argument);
  CHECK_THROWS_AS(kernel_eval(line(0.5, 0.0), 1.0, xs), std::invalid_argument);
  const std::string csv = kernel_csv({kernel_eval(line(0.5, 1.0), 1.0, {0.0, 1.0})});
  CHECK(csv.rfind("t,x,P_m\n1,0,", 0) == 0);
}

TEST_CASE("extension by the profile") {
  const double L = 40.0;
  auto c = cosine(3, L, 128);
  const double xi = 2.0 * kPi * 3 / L;
  const Params p = line(0.5, 1.0);
  auto w = extend(c, p, {0.0, 0.25, 1.0});
  CHECK(max_abs_diff(w[0], c) == 0.0);
  for (int j = 1; j < 3; ++j) {
    const double t = j == 1 ? 0.25 : 1.0;
    const double th = theta_profile(0.5, std::sqrt(xi * xi + 1.0) * t);
    for (std::size_t i = 0; i < c.size(); ++i)
      CHECK(w[j].values()[i] == doctest::Approx(th * c.values()[i]).epsilon(1e-12).scale(1.0));
  }
  auto one = SpectralField::from_values(1, L, 64, std::vector<double>(64, 1.0));
  const auto w1 = extend(one, line(0.3, 1.0), {0.7});
  for (double v : w1[0].values()) CHECK(v == doctest::Approx(theta_profile(0.3, 0.7)));
  CHECK_THROWS_AS(extend(one, p, {1.0, 0.5}), std::invalid_argument);

  // two independent routes for a Gaussian
  auto g = gaussian();
  auto viaModes = extend(g, p, {0.5})[0];
  auto viaKernel = kernel_convolve(g, p, 0.5);
  CHECK(max_abs_diff(viaModes, viaKernel) <= 1e-4);
}

TEST_CASE("Neumann trace") {
  const double L = 40.0;
  auto c = cosine(3, L, 128);
  const double xi = 2.0 * kPi * 3 / L;
  auto tr = neumann_trace(c, line(0.5, 1.0));
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(tr.values()[i] == doctest::Approx(std::sqrt(xi * xi + 1.0) * c.values()[i]).epsilon(1e-12).scale(1.0));
  auto one = SpectralField::from_values(1, L, 64, std::vector<double>(64, 1.0));
  const auto t1 = neumann_trace(one, line(0.3, 1.5));
  for (double v : t1.values())
    CHECK(v == doctest::Approx(kappa(0.3) * std::pow(1.5, 0.6)));
  for (double s : {0.25, 0.5, 0.75}) {
    auto chk = neumann_trace_check(gaussian(), line(s, 1.0));
    CHECK(chk.modes_checked > 10);
    CHECK(chk.max_rel_error <= 1e-6);
  }
}

TEST_CASE("Dirichlet form identity") {
  const Params p = line(0.5, 1.0);
  auto zero = SpectralField::from_values(1, 40.0, 256, std::vector<double>(256, 0.0));
  auto z = dirichlet_form_identity(zero, p);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.rel_gap == 0.0);
  for (double s : {0.25, 0.5, 0.75}) {
    auto r = dirichlet_form_identity(gaussian(), line(s, 1.0));
    CAPTURE(s);
    CHECK(r.rel_gap <= 1e-3);
  }
  auto g = gaussian();
  std::vector<double> twice = g.values();
  for (double& v : twice) v *= 2.0;
  auto r1 = dirichlet_form_identity(g, p);
  auto r2 = dirichlet_form_identity(SpectralField::from_values(1, 40.0, 512, twice), p);
  CHECK(r2.lhs == 4.0 * r1.lhs);
  CHECK(r2.rhs == 4.0 * r1.rhs);
  CHECK_THROWS_AS(dirichlet_form_identity(cosine(2, 40.0, 256), p), std::invalid_argument);
}

TEST_CASE("extension energy equals the weighted trace norm") {
  for (double s : {0.25, 0.5, 0.75}) {
    const Params p = line(s, 1.0);
    auto g = gaussian(40.0, 256);
    auto exact = trace_energy(g, p);
    CHECK(std::abs(exact.rel_gap) <= 1e-6);
    for (double eps : {0.1, 0.01}) {
      auto pert = trace_energy(g, p, eps);
      CHECK(pert.extension_energy > pert.trace_side);
      CHECK(pert.rel_gap > 1e-6);
    }
  }
}

TEST_CASE("pointwise limit of the kernel convolution") {
  const Params p = line(0.5, 1.0);
  auto one = SpectralField::from_values(1, 40.0, 128, std::vector<double>(128, 1.0));
  auto r1 = pointwise_kernel_limit(one, p, {0.1, 0.01, 0.001});
  for (std::size_t i = 0; i < r1.t.size(); ++i)
    CHECK(r1.sup_error[i] == doctest::Approx(1.0 - theta_profile(0.5, r1.t[i])).epsilon(1e-5));

  auto rg = pointwise_kernel_limit(gaussian(), p, {0.1, 0.01, 0.001});
  CHECK(rg.decreasing);
  CHECK(rg.sup_error.back() <= 1e-2);
  CHECK(rg.fitted_rate > 0.5);

  auto kink = SpectralField::from_function(1, 40.0, 512, [](const double* x) { return std::abs(x[0]) * std::exp(-x[0] * x[0]); });
  auto rk = pointwise_kernel_limit(kink, p, {0.1, 0.01, 0.001, 0.0001});
  CHECK(rk.decreasing);
  CHECK(rk.sup_error.back() < 0.1 * rk.sup_error.front());
}
