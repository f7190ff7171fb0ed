#include "relfrac/hardy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "relfrac/quadrature.hpp"
#include "relfrac/specfun.hpp"

namespace relfrac {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_gap(int N, double s) {
  if (N < 1 || !(s > 0.0 && s < 1.0)) throw std::invalid_argument("Herbst: need N >= 1 and s in (0,1)");
  if (!(N > 2.0 * s)) throw std::invalid_argument("Herbst inequality requires N > 2s");
}

double half_line(const std::function<double(double)>& f, double split) {
  return integrate_de(f, 0.0, split).value + integrate_de(f, split, kInf).value;
}

HerbstTerms finish(double kinetic, double weighted, int N, double s) {
  HerbstTerms h;
  h.kinetic = kinetic;
  h.weighted = weighted;
  h.ratio = kinetic / weighted;
  h.margin = kinetic - constants(N, s).Lambda_Ns * weighted;
  return h;
}

}  // namespace

HerbstTerms herbst_gaussian_mixture(const GaussianMixture& u, double s) {
  require_gap(u.N, s);
  const std::size_t k = u.amp.size();
  if (u.width.size() != k || (u.N == 1 && u.center.size() != k) || k == 0)
    throw std::invalid_argument("Herbst: mixture arrays have different lengths");
  for (double b : u.width)
    if (!(b > 0.0)) throw std::invalid_argument("Herbst: widths must be positive");

  if (u.N == 1) {
    auto usq = [&](double x) {
      double v = 0.0;
      for (std::size_t i = 0; i < k; ++i) v += u.amp[i] * std::exp(-u.width[i] * (x - u.center[i]) * (x - u.center[i]));
      return v * v;
    };
    auto weighted = [&](double r) { return (usq(r) + usq(-r)) * std::pow(r, -2.0 * s); };
    // |u^(xi)|^2 with u^ = sum a (2b)^{-1/2} exp(-xi^2/(4b) - i xi c)
    auto kinetic = [&](double xi) {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double g = u.amp[i] / std::sqrt(2.0 * u.width[i]) * std::exp(-xi * xi / (4.0 * u.width[i]));
        re += g * std::cos(xi * u.center[i]);
        im -= g * std::sin(xi * u.center[i]);
      }
      return 2.0 * std::pow(xi, 2.0 * s) * (re * re + im * im);
    };
    return finish(half_line(kinetic, 1.0), half_line(weighted, 1.0), 1, s);
  }

  // centred radial mixture: all integrals reduce to int r^{a-1} e^{-c r^2}
  const double area = sphere_area(u.N);
  const double ak = 0.5 * (u.N + 2.0 * s), aw = 0.5 * (u.N - 2.0 * s);
  double kin = 0.0, wt = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double bi = u.width[i], bj = u.width[j];
      const double ci = u.amp[i] * std::pow(2.0 * bi, -0.5 * u.N), cj = u.amp[j] * std::pow(2.0 * bj, -0.5 * u.N);
      kin += ci * cj * 0.5 * gamma(ak) * std::pow(0.25 / bi + 0.25 / bj, -ak);
      wt += u.amp[i] * u.amp[j] * 0.5 * gamma(aw) * std::pow(bi + bj, -aw);
    }
  return finish(area * kin, area * wt, u.N, s);
}

GaussianMixture random_mixture(int N, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> terms(2, 4);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), width(0.2, 5.0), centre(-2.0, 2.0);
  GaussianMixture g;
  g.N = N;
  const int k = terms(rng);
  for (int i = 0; i < k; ++i) {
    g.amp.push_back(i == 0 ? std::abs(amp(rng)) + 0.1 : amp(rng));
    g.width.push_back(width(rng));
    g.center.push_back(N == 1 ? centre(rng) : 0.0);
  }
  return g;
}

HerbstTerms herbst_near_optimizer(int N, double s, double eps) {
  require_gap(N, s);
  if (N != 1 && N != 3) throw std::invalid_argument("Herbst near-optimizer: unsupported dimension (N must be 1 or 3)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("Herbst near-optimizer: eps must lie in (0,1)");
  // exponent p = -(N-2s)/2 + eps; q = p + 1 (N = 1) or p + 2 (N = 3)
  const double q = s + 0.5 + eps;
  // int u^2 |x|^{-2s} = |S^{N-1}| Gamma(2 eps) / 2^{2 eps}
  const double weighted = sphere_area(N) * gamma(2.0 * eps) * std::pow(2.0, -2.0 * eps);
  // N = 1: u^ = sqrt(2/pi) Gamma(q) cos^q(th) cos(q th)
  // N = 3: u^ = sqrt(2/pi) Gamma(q) cos^q(th) sin(q th) / rho,   rho = tan th
  // kinetic = |S^{N-1}| (2/pi) Gamma(q)^2 int tan^{2s} cos^{2q-2} trig^2(q th) dth
  // integrand sin^{2s}(th) cos^{2 eps - 1}(th) trig^2(q th); on [pi/4, pi/2]
  // write phi = pi/2 - th and peel off the endpoint power phi^{2 eps - 1}
  auto trig = [&](double th) { return N == 1 ? std::cos(q * th) : std::sin(q * th); };
  auto f = [&](double th) {
    const double tr = trig(th);
    return std::pow(std::sin(th), 2.0 * s) * std::pow(std::cos(th), 2.0 * eps - 1.0) * tr * tr;
  };
  auto G = [&](double phi) {
    const double tr = trig(0.5 * kPi - phi);
    return std::pow(std::cos(phi), 2.0 * s) * tr * tr;
  };
  const double G0 = G(0.0);
  const double e2 = 2.0 * eps - 1.0;
  auto smooth_part = [&](double phi) { return std::pow(std::sin(phi), e2) * (G(phi) - G0); };
  auto power_gap = [&](double phi) { return std::pow(phi, e2) * (std::pow(std::sin(phi) / phi, e2) - 1.0); };
  const double quarter = 0.25 * kPi;
  const double near_end = integrate_de(smooth_part, 0.0, quarter).value +
                          G0 * (std::pow(quarter, 2.0 * eps) / (2.0 * eps) + integrate_de(power_gap, 0.0, quarter).value);
  const double I = integrate_de(f, 0.0, quarter).value + near_end;
  const double g = gamma(q);
  const double kinetic = sphere_area(N) * (2.0 / kPi) * g * g * I;
  return finish(kinetic, weighted, N, s);
}

}  // namespace relfrac
