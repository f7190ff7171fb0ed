#include "relfrac/diagnostics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "relfrac/quadrature.hpp"
#include "relfrac/specfun.hpp"

namespace relfrac {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int dim_of(const SeparableSolution& sol) { return sol.eigenpair.profile.N; }
double s_of(const SeparableSolution& sol) { return sol.eigenpair.profile.s; }

double half_gap_of(const SeparableSolution& sol) { return 0.5 * (dim_of(sol) - 2.0 * s_of(sol)); }

void check_consistent(const SeparableSolution& sol, const Params& p) {
  if (p.N != dim_of(sol) || std::abs(p.s - s_of(sol)) > 0.0)
    throw std::invalid_argument("separable solution built for different N or s");
  if (p.potential.h_kind != PotentialSpec::HKind::zero && p.potential.c_h != 0.0)
    throw std::invalid_argument("separable solutions require h = 0");
  const double m = sol.radial == SeparableSolution::Radial::power ? 0.0 : sol.m;
  if (std::abs(p.m - m) > 1e-15 * std::max(1.0, m))
    throw std::invalid_argument("separable solution built for a different mass m");
}

enum class Radial2 { phi2, dphi2, phidphi };

// x^{-nu} I_nu(x), with the two-term series below x = 1e-6.
double scaled_bessel_i(double nu, double x) {
  if (x < 1e-6) return std::pow(2.0, -nu) / std::tgamma(nu + 1.0) * (1.0 + 0.25 * x * x / (nu + 1.0));
  return std::pow(x, -nu) * bessel_i(nu, x);
}

// int_0^r rho^e G(rho) d rho for e > -1 and G bounded near 0, through
// rho = r y^{1/(e+1)}, which turns the power into the constant density.
double power_weighted_integral(const std::function<double(double)>& G, double e, double r) {
  if (!(e > -1.0)) throw std::invalid_argument("radial integral diverges at the origin");
  const double q = 1.0 / (e + 1.0);
  auto f = [&](double y) { return G(r * std::pow(y, q)); };
  return std::pow(r, e + 1.0) * q * integrate_de(f, 0.0, 1.0, 1e-13).value;
}

// int_0^r rho^k F(rho) d rho with F one of phi^2, phi'^2, phi phi'.
// Bessel kind: phi = rho^gamma f and phi' = rho^{gamma-1} (gamma f + rho^2 g)
// with f = A m^nu J_nu(m rho), g = A m^{nu+2} J_{nu+1}(m rho), J_nu(x) = x^{-nu} I_nu(x),
// so every piece is a power of rho times a bounded function.
double radial_integral(const SeparableSolution& sol, double k, Radial2 which, double r) {
  const double A = sol.amplitude, sg = sol.gamma();
  if (sol.radial == SeparableSolution::Radial::power) {
    double coef = A * A, e = 2.0 * sg;
    if (which == Radial2::dphi2) {
      coef *= sg * sg;
      e -= 2.0;
    } else if (which == Radial2::phidphi) {
      coef *= sg;
      e -= 1.0;
    }
    if (coef == 0.0) return 0.0;
    const double ex = k + e + 1.0;
    if (!(ex > 0.0)) throw std::invalid_argument("radial integral diverges at the origin");
    return coef * std::pow(r, ex) / ex;
  }
  const double nu = sol.eigenpair.bessel_nu, m = sol.m;
  auto f = [&](double rho) { return A * std::pow(m, nu) * scaled_bessel_i(nu, m * rho); };
  auto g = [&](double rho) { return A * std::pow(m, nu + 2.0) * scaled_bessel_i(nu + 1.0, m * rho); };
  auto term = [&](double coef, double e, const std::function<double(double)>& G) {
    return coef == 0.0 ? 0.0 : coef * power_weighted_integral(G, k + e, r);
  };
  auto ff = [&](double rho) { return f(rho) * f(rho); };
  auto fg = [&](double rho) { return f(rho) * g(rho); };
  auto gg = [&](double rho) { return g(rho) * g(rho); };
  switch (which) {
    case Radial2::phi2:
      return term(1.0, 2.0 * sg, ff);
    case Radial2::dphi2:
      return term(sg * sg, 2.0 * sg - 2.0, ff) + term(2.0 * sg, 2.0 * sg, fg) + term(1.0, 2.0 * sg + 2.0, gg);
    case Radial2::phidphi:
      return term(sg, 2.0 * sg - 1.0, ff) + term(1.0, 2.0 * sg + 1.0, fg);
  }
  return 0.0;
}

// Per-radius quantities of a separable solution (full ball B_r^+).
struct SepTerms {
  double I_grad = 0.0, I_mass = 0.0, B_V = 0.0;  // volume and flat-boundary integrals
  double S_w2 = 0.0, S_grad = 0.0, S_nn = 0.0, S_wn = 0.0, dB = 0.0;  // arc terms
};

SepTerms separable_terms(const SeparableSolution& sol, double r) {
  const AngularEigenpair& e = sol.eigenpair;
  const int N = dim_of(sol);
  const double s = s_of(sol), kap = kappa(s);
  const double n = e.norm_certificate, B = e.boundary_mass;
  const double E = e.mu * n + kap * B;
  auto lazy = [&](double coef, double k, Radial2 w) { return coef == 0.0 ? 0.0 : coef * radial_integral(sol, k, w, r); };
  SepTerms t;
  t.I_grad = lazy(n, N + 1.0 - 2.0 * s, Radial2::dphi2) + lazy(E, N - 1.0 - 2.0 * s, Radial2::phi2);
  t.I_mass = sol.m > 0.0 ? lazy(n, N + 1.0 - 2.0 * s, Radial2::phi2) : 0.0;
  t.B_V = lazy(B, N - 1.0 - 2.0 * s, Radial2::phi2);
  const double rf = std::pow(r, N + 1.0 - 2.0 * s);
  const double v = sol.phi(r), d = sol.dphi(r);
  t.S_w2 = rf * n * v * v;
  t.S_grad = rf * (n * d * d + E * v * v / (r * r));
  t.S_nn = rf * n * d * d;
  t.S_wn = rf * n * v * d;
  t.dB = std::pow(r, N - 1.0 - 2.0 * s) * v * v * B;
  return t;
}

double relative_gap(double a, double b, double floor = 0.0) {
  const double sc = std::max({std::abs(a), std::abs(b), floor});
  return sc > 0.0 ? std::abs(a - b) / sc : 0.0;
}

// |H' - 2D/r| relative to max(|H'|, |2D/r|, H/r)
double hprime_residual(double Hp, double D, double H, double r) { return relative_gap(Hp, 2.0 * D / r, H / r); }

// Three-point derivative weights at x for nodes x0, x1, x2.
void diff_weights(double x, double x0, double x1, double x2, double& c0, double& c1, double& c2) {
  c0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
  c1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
  c2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
}

int nearest_row(const PolarGrid& g, double r) {
  int best = 0;
  for (int i = 1; i < g.n_rho(); ++i)
    if (std::abs(std::log(g.rho[i] / r)) < std::abs(std::log(g.rho[best] / r))) best = i;
  return best;
}

double arc_h(const Params& p, double rho) {
  return p.potential.h_kind == PotentialSpec::HKind::power ? p.potential.h(p.s, rho) : 0.0;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y, double* se = nullptr) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double b = sxy / sxx;
  if (se) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - my - b * (x[i] - mx);
      ss += r * r;
    }
    *se = x.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  }
  return b;
}

void finish_trace(FrequencyTrace& t) {
  t.residual_Hprime.resize(t.r_values.size());
  for (std::size_t i = 0; i < t.r_values.size(); ++i)
    t.residual_Hprime[i] = hprime_residual(t.Hprime[i], t.D[i], t.H[i], t.r_values[i]);
  t.gamma_fit = kNaN;
  try {
    t.gamma_fit = gamma_extract(t).gamma;
  } catch (const std::exception&) {
  }
}

std::vector<double> sorted_decreasing(std::vector<double> r) {
  std::sort(r.begin(), r.end(), std::greater<>());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

void fit_rate(BlowupReport& rep) {
  rep.decreasing = true;
  for (std::size_t k = 1; k < rep.distance.size(); ++k)
    if (rep.distance[k] > rep.distance[k - 1]) rep.decreasing = false;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < rep.tau.size(); ++k) {
    if (!(rep.distance[k] > 0.0)) {
      rep.fitted_rate = 0.0;
      return;
    }
    x.push_back(std::log(rep.tau[k]));
    y.push_back(std::log(rep.distance[k]));
  }
  rep.fitted_rate = x.size() >= 2 ? least_squares_slope(x, y) : 0.0;
}

void check_tau(const std::vector<double>& tau) {
  if (tau.empty()) throw std::invalid_argument("blow-up: empty tau sequence");
  for (std::size_t k = 0; k < tau.size(); ++k) {
    if (!(tau[k] > 0.0 && tau[k] <= 1.0)) throw std::invalid_argument("blow-up: tau must lie in (0, 1]");
    if (k > 0 && !(tau[k] < tau[k - 1])) throw std::invalid_argument("blow-up: tau sequence must decrease");
  }
}

// Discrete weighted inner product of two profiles, evaluating `b` on a's cells.
double profile_overlap(const AngularProfile& a, const AngularProfile& b) {
  const bool same = a.alpha.size() == b.alpha.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < a.alpha.size(); ++j)
    acc += a.mass[j] * a.g[j] * (same ? b.g[j] : b.value_at(a.alpha[j]));
  return acc;
}

}  // namespace

// ---------------------------------------------------------------- separable

double SeparableSolution::phi(double r) const {
  if (radial == Radial::power) return amplitude * std::pow(r, gamma());
  const double nu = eigenpair.bessel_nu;
  return amplitude * std::pow(m, nu) * std::pow(r, gamma()) * scaled_bessel_i(nu, m * r);
}

double SeparableSolution::dphi(double r) const {
  if (radial == Radial::power) {
    const double sg = gamma();
    return sg == 0.0 ? 0.0 : amplitude * sg * std::pow(r, sg - 1.0);
  }
  const double p = half_gap_of(*this);
  const BesselIK b = bessel_ik(eigenpair.bessel_nu, m * r);
  return amplitude * std::pow(r, -p) * (-p * b.i / r + m * b.di);
}

double SeparableSolution::d2phi(double r) const {
  if (radial == Radial::power) {
    const double sg = gamma();
    return sg == 0.0 ? 0.0 : amplitude * sg * (sg - 1.0) * std::pow(r, sg - 2.0);
  }
  const double p = half_gap_of(*this), nu = eigenpair.bessel_nu, x = m * r;
  const BesselIK b = bessel_ik(nu, x);
  const double d2i = b.i * (1.0 + nu * nu / (x * x)) - b.di / x;
  return amplitude * std::pow(r, -p) *
         (p * (p + 1.0) * b.i / (r * r) - 2.0 * p * m * b.di / r + m * m * d2i);
}

double SeparableSolution::value(double r, double alpha) const { return phi(r) * eigenpair.profile.value_at(alpha); }

double SeparableSolution::ode_residual(double r) const {
  const int N = dim_of(*this);
  const double s = s_of(*this);
  const double t0 = d2phi(r), t1 = (N + 1.0 - 2.0 * s) / r * dphi(r);
  const double t2 = -eigenpair.mu / (r * r) * phi(r), t3 = -m * m * phi(r);
  const double sc = std::max({std::abs(t0), std::abs(t1), std::abs(t2), std::abs(t3)});
  return sc > 0.0 ? std::abs(t0 + t1 + t2 + t3) / sc : 0.0;
}

SeparableSolution make_separable(const AngularEigenpair& pair, SeparableSolution::Radial kind, double amplitude,
                                 double m) {
  if (!pair.admissible) throw std::invalid_argument("inadmissible eigenpair: mu < -((N-2s)/2)^2");
  if (kind == SeparableSolution::Radial::modified_bessel && !(m > 0.0))
    throw std::invalid_argument("Bessel radial factor requires m > 0");
  if (!std::isfinite(amplitude)) throw std::invalid_argument("amplitude must be finite");
  SeparableSolution sol;
  sol.eigenpair = pair;
  sol.radial = kind;
  sol.m = kind == SeparableSolution::Radial::power ? 0.0 : m;
  sol.amplitude = amplitude;
  fill_exponents(sol.eigenpair, pair.profile.N, pair.profile.s);
  double worst = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const double r = 1e-3 * std::pow(2e3, i / 64.0);
    worst = std::max(worst, sol.ode_residual(r));
  }
  sol.certified_residual = worst;
  if (!(worst <= 1e-8)) throw std::runtime_error("separable solution failed the radial residual certificate");
  return sol;
}

// ---------------------------------------------------------------- traces

std::string FrequencyTrace::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17) << "r,H,D,N,res_Hprime,nu1,nu2\n";
  for (std::size_t i = 0; i < r_values.size(); ++i)
    os << r_values[i] << ',' << H[i] << ',' << D[i] << ',' << Nfreq[i] << ',' << residual_Hprime[i] << ','
       << nu1[i] << ',' << nu2[i] << '\n';
  return os.str();
}

FrequencyTrace frequency_trace(const SeparableSolution& sol, const Params& p, const std::vector<double>& r_values) {
  check_consistent(sol, p);
  FrequencyTrace t;
  t.r_values = sorted_decreasing(r_values);
  if (t.r_values.empty() || !(t.r_values.back() > 0.0)) throw std::invalid_argument("trace radii must be positive");
  const double n = sol.eigenpair.norm_certificate, kap = kappa(p.s);
  for (double r : t.r_values) {
    const SepTerms q = separable_terms(sol, r);
    const double H = n * sol.phi(r) * sol.phi(r);
    if (!(H >= 1e-300)) throw std::runtime_error("degenerate trace: H(r) below 1e-300");
    const double D = std::pow(r, -(p.N - 2.0 * p.s)) * (q.I_grad + p.m * p.m * q.I_mass - kap * q.B_V);
    t.H.push_back(H);
    t.D.push_back(D);
    t.Nfreq.push_back(D / H);
    t.Hprime.push_back(2.0 * n * sol.phi(r) * sol.dphi(r));
    t.nu1.push_back(2.0 * r * (q.S_nn * q.S_w2 - q.S_wn * q.S_wn) / (q.S_w2 * q.S_w2));
    t.nu2.push_back(2.0 * p.m * p.m * q.I_mass / q.S_w2);
  }
  finish_trace(t);
  return t;
}

FrequencyTrace frequency_trace(const GridSolution& sol, const Params& p, const std::vector<double>& r_values) {
  const PolarGrid& g = sol.grid;
  if (p.N != 1) throw std::invalid_argument("grid traces require N = 1");
  const int M = g.n_rho() - 1;
  std::vector<int> rows;
  for (double r : r_values) {
    if (!(r >= 3.0 * g.rho_min * (1.0 - 1e-12) && r <= g.R * (1.0 + 1e-12)))
      throw std::invalid_argument("grid trace radius outside [3 rho_min, R]");
    rows.push_back(std::max(1, nearest_row(g, r)));
  }
  std::sort(rows.begin(), rows.end(), std::greater<>());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const double s = p.s, kap = kappa(s), chi = p.potential.chi;
  const double rho0 = g.rho[0];
  const ArcIntegrals a0 = arc_integrals(sol, 0);
  const double flux_in = std::pow(rho0, 2.0 - 2.0 * s) * a0.w_dr;
  // continuation of the excised ball by H(rho) = H0 (rho/rho0)^{2 g0}
  const double g0 = rho0 * a0.w_dr / a0.w2;
  const double ball_mass = a0.w2 * std::pow(rho0, 3.0 - 2.0 * s) / (3.0 - 2.0 * s + 2.0 * g0);
  double ball_h = 0.0;
  if (p.potential.h_kind == PotentialSpec::HKind::power) {
    const double ex = -2.0 * s + chi + 2.0 * g0 + 1.0;
    const double wm = sol.at(0, 0), wp = sol.at(0, g.columns() - 1);
    ball_h = ex > 0.0 ? p.potential.c_h * (wm * wm + wp * wp) * std::pow(rho0, -2.0 * s + chi + 1.0) / ex : kNaN;
  }
  auto H_at = [&](int i) { return arc_integrals(sol, i).w2; };

  FrequencyTrace t;
  t.from_grid = true;
  for (int k : rows) {
    const double r = g.rho[k];
    const AnnulusIntegrals ai = annulus_integrals(p, sol, k);
    const ArcIntegrals ar = arc_integrals(sol, k);
    const double H = ar.w2;
    if (!(H >= 1e-300)) throw std::runtime_error("degenerate trace: H(r) below 1e-300");
    const double numer = ai.gradient + p.m * p.m * ai.mass - kap * (ai.boundary_a + ai.boundary_h) + flux_in;
    const double D = std::pow(r, -(1.0 - 2.0 * s)) * numer;
    const int i0 = std::clamp(k - 1, 0, M - 2);
    double c0, c1, c2;
    diff_weights(r, g.rho[i0], g.rho[i0 + 1], g.rho[i0 + 2], c0, c1, c2);
    const double Hp = c0 * H_at(i0) + c1 * H_at(i0 + 1) + c2 * H_at(i0 + 2);
    const double S = std::pow(r, 2.0 - 2.0 * s) * H;
    const double mass_ball = ai.mass + ball_mass;
    t.r_values.push_back(r);
    t.H.push_back(H);
    t.D.push_back(D);
    t.Nfreq.push_back(D / H);
    t.Hprime.push_back(Hp);
    t.nu1.push_back(2.0 * r * (ar.dr2 * ar.w2 - ar.w_dr * ar.w_dr) / (ar.w2 * ar.w2));
    t.nu2.push_back((2.0 * p.m * p.m * mass_ball - kap * chi * (ai.boundary_h + ball_h)) / S);
  }
  finish_trace(t);
  return t;
}

HprimeReport check_Hprime(const FrequencyTrace& trace) {
  if (trace.r_values.size() < 4) throw std::invalid_argument("check_Hprime needs at least 4 samples");
  HprimeReport rep;
  for (std::size_t i = 0; i < trace.r_values.size(); ++i) {
    rep.residual.push_back(hprime_residual(trace.Hprime[i], trace.D[i], trace.H[i], trace.r_values[i]));
    rep.max_residual = std::max(rep.max_residual, rep.residual.back());
  }
  return rep;
}

// ---------------------------------------------------------------- Pohozaev

PohozaevResidual pohozaev_residual(const SeparableSolution& sol, const Params& p, double r) {
  check_consistent(sol, p);
  if (!(r > 0.0)) throw std::invalid_argument("Pohozaev radius must be positive");
  const SepTerms q = separable_terms(sol, r);
  const double N = p.N, s = p.s, m2 = p.m * p.m, kap = kappa(s), gap = p.half_gap();
  const double t1 = -gap * q.I_grad, t2 = -m2 * (N + 2.0 - 2.0 * s) / 2.0 * q.I_mass;
  const double t3 = r * m2 / 2.0 * q.S_w2, t4 = r / 2.0 * q.S_grad;
  const double t5 = r * q.S_nn, t6 = -kap / 2.0 * (N - 2.0 * s) * q.B_V, t7 = r * kap / 2.0 * q.dB;
  PohozaevResidual res;
  res.scale1 = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4), std::abs(t5), std::abs(t6),
                         std::abs(t7)});
  res.res1 = res.scale1 > 0.0 ? std::abs(t1 + t2 + t3 + t4 - t5 - t6 - t7) / res.scale1 : 0.0;
  const double u1 = q.I_grad, u2 = m2 * q.I_mass, u3 = q.S_wn, u4 = kap * q.B_V;
  res.scale2 = std::max({std::abs(u1), std::abs(u2), std::abs(u3), std::abs(u4)});
  res.res2 = res.scale2 > 0.0 ? std::abs(u1 + u2 - u3 - u4) / res.scale2 : 0.0;
  return res;
}

PohozaevResidual pohozaev_residual(const GridSolution& sol, const Params& p, double r) {
  if (p.N != 1) throw std::invalid_argument("grid Pohozaev residual requires N = 1");
  const PolarGrid& g = sol.grid;
  const int k = nearest_row(g, r);
  if (k < 1) throw std::invalid_argument("Pohozaev radius must exceed rho_min");
  const double s = p.s, m2 = p.m * p.m, kap = kappa(s), gap = p.half_gap(), chi = p.potential.chi;
  const bool has_h = p.potential.h_kind == PotentialSpec::HKind::power;
  const double am = p.potential.a_side(-1), ap = p.potential.a_side(+1);
  const AnnulusIntegrals ai = annulus_integrals(p, sol, k);
  struct Arc {
    double w2, grad, nn, wn, dB;
  };
  auto arc = [&](int i) {
    const double rho = g.rho[i], rf = std::pow(rho, 2.0 - 2.0 * s);
    const ArcIntegrals a = arc_integrals(sol, i);
    const double wm = sol.at(i, 0), wp = sol.at(i, g.columns() - 1), h = arc_h(p, rho);
    const double vr = std::pow(rho, -2.0 * s);
    return Arc{rf * a.w2, rf * (a.dr2 + a.dalpha2 / (rho * rho)), rf * a.dr2, rf * a.w_dr,
               (am * vr + h) * wm * wm + (ap * vr + h) * wp * wp};
  };
  const Arc out = arc(k), in = arc(0);
  const double ro = g.rho[k], ri = g.rho[0];
  const double t1 = -gap * ai.gradient, t2 = -m2 * (3.0 - 2.0 * s) / 2.0 * ai.mass;
  const double t3 = m2 / 2.0 * (ro * out.w2 - ri * in.w2);
  const double t4 = 0.5 * (ro * out.grad - ri * in.grad);
  const double t5 = ro * out.nn - ri * in.nn;
  const double t6 = -kap / 2.0 * ((1.0 - 2.0 * s) * ai.boundary_a + (has_h ? (1.0 - 2.0 * s + chi) * ai.boundary_h : 0.0));
  const double t7 = kap / 2.0 * (ro * out.dB - ri * in.dB);
  PohozaevResidual res;
  res.scale1 = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4), std::abs(t5), std::abs(t6),
                         std::abs(t7)});
  res.res1 = res.scale1 > 0.0 ? std::abs(t1 + t2 + t3 + t4 - t5 - t6 - t7) / res.scale1 : 0.0;
  const double u1 = ai.gradient, u2 = m2 * ai.mass, u3 = out.wn - in.wn, u4 = kap * (ai.boundary_a + ai.boundary_h);
  res.scale2 = std::max({std::abs(u1), std::abs(u2), std::abs(u3), std::abs(u4)});
  res.res2 = res.scale2 > 0.0 ? std::abs(u1 + u2 - u3 - u4) / res.scale2 : 0.0;
  return res;
}

// ---------------------------------------------------------------- blow-up

std::string BlowupReport::to_json() const {
  std::ostringstream os;
  os << std::setprecision(17) << "{\"tau\":[";
  for (std::size_t k = 0; k < tau.size(); ++k) os << (k ? "," : "") << tau[k];
  os << "],\"distance\":[";
  for (std::size_t k = 0; k < distance.size(); ++k) os << (k ? "," : "") << distance[k];
  os << "],\"fitted_rate\":" << fitted_rate << "}";
  return os.str();
}

BlowupReport rescale_blowup(const SeparableSolution& sol, const Params& p, const std::vector<double>& tau_seq) {
  check_consistent(sol, p);
  check_tau(tau_seq);
  const double k = p.N + 1.0 - 2.0 * p.s, gm = sol.gamma();
  BlowupReport rep;
  for (double tau : tau_seq) {
    const double ph = sol.phi(tau);
    if (!(ph * ph * sol.eigenpair.norm_certificate > 0.0)) throw std::runtime_error("blow-up: H(tau) <= 0");
    const double sign = sol.amplitude >= 0.0 ? 1.0 : -1.0;
    double d2 = 0.0;
    if (sol.radial == SeparableSolution::Radial::modified_bessel) {
      auto f = [&](double rho) {
        const double d = sol.phi(tau * rho) / std::abs(ph) - sign * std::pow(rho, gm);
        return std::pow(rho, k) * d * d;
      };
      d2 = integrate_de(f, 0.0, 1.0, 1e-12).value;
    }
    rep.tau.push_back(tau);
    rep.distance.push_back(std::sqrt(std::max(d2, 0.0)));
  }
  fit_rate(rep);
  return rep;
}

BlowupReport rescale_blowup(const GridSolution& sol, const Params& p, const std::vector<double>& tau_seq) {
  if (p.N != 1) throw std::invalid_argument("grid blow-up requires N = 1");
  check_tau(tau_seq);
  const PolarGrid& g = sol.grid;
  const Mu1Result ground = mu1(p);
  const AngularEigenpair& e = ground.eigenpair;
  const double gm = e.sigma_plus, sn = std::sqrt(e.norm_certificate), s = p.s;
  const int C = g.columns();
  std::vector<double> psi(C);
  for (int j = 0; j < C; ++j) psi[j] = e.profile.value_at(g.alpha[j]) / sn;
  BlowupReport rep;
  for (double tau_req : tau_seq) {
    const int kt = nearest_row(g, tau_req);
    const double tau = g.rho[kt];
    if (kt < 2) throw std::invalid_argument("blow-up: tau too close to rho_min");
    const double H = arc_integrals(sol, kt).w2;
    if (!(H > 0.0)) throw std::runtime_error("blow-up: H(tau) <= 0");
    const double sq = std::sqrt(H);
    // trapezoid in u = log(rho) over rows 0..kt mapped to rho_i / tau
    double ww = 0.0, wt = 0.0, tt = 0.0;
    for (int i = 0; i <= kt; ++i) {
      const double z = g.rho[i] / tau;
      const double du = i == 0 ? std::log(g.rho[1] / g.rho[0]) : i == kt ? std::log(g.rho[kt] / g.rho[kt - 1])
                                                                          : std::log(g.rho[i + 1] / g.rho[i - 1]);
      const double wu = 0.5 * du * std::pow(z, 3.0 - 2.0 * s);
      const double zg = std::pow(z, gm);
      for (int j = 1; j < C - 1; ++j) {
        const double a = sol.at(i, j) / sq, b = zg * psi[j];
        ww += wu * g.alpha_mass[j] * a * a;
        wt += wu * g.alpha_mass[j] * a * b;
        tt += wu * g.alpha_mass[j] * b * b;
      }
    }
    const double sign = wt >= 0.0 ? 1.0 : -1.0;
    rep.tau.push_back(tau);
    rep.distance.push_back(std::sqrt(std::max(ww - 2.0 * sign * wt + tt, 0.0)));
  }
  fit_rate(rep);
  return rep;
}

// ---------------------------------------------------------------- gamma

GammaEstimate gamma_extract(const FrequencyTrace& trace) {
  const auto& r = trace.r_values;
  if (r.empty()) throw std::invalid_argument("gamma_extract: empty trace");
  const double rmin = *std::min_element(r.begin(), r.end()), rmax = *std::max_element(r.begin(), r.end());
  if (!(rmax >= 10.0 * rmin * (1.0 - 1e-12))) throw std::invalid_argument("gamma_extract: samples must span a decade");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i] <= 10.0 * rmin * (1.0 + 1e-12)) idx.push_back(i);
  if (idx.size() < 6) throw std::invalid_argument("gamma_extract: fewer than 6 samples in the smallest decade");
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  int up = 0, down = 0;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const double a = trace.H[idx[k - 1]], b = trace.H[idx[k]];
    const double tol = 1e-14 * std::max(std::abs(a), std::abs(b));
    if (b > a + tol) ++up;
    if (b < a - tol) ++down;
  }
  if (up > 0 && down > 0) throw std::runtime_error("gamma_extract: H not monotone in the fit window");
  std::vector<double> x, y;
  for (std::size_t i : idx) {
    x.push_back(2.0 * std::log(r[i]));
    y.push_back(std::log(trace.H[i]));
  }
  double se = 0.0;
  GammaEstimate est;
  est.gamma = least_squares_slope(x, y, &se);
  const boost::math::students_t dist(static_cast<double>(idx.size()) - 2.0);
  est.ci = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  est.window = static_cast<int>(idx.size());
  est.window_lo = r[idx.front()];
  est.window_hi = r[idx.back()];
  const double n_small = trace.Nfreq[idx.front()];
  est.cross_check = std::abs(n_small - est.gamma) <= std::max(3.0 * est.ci, 1e-8);
  return est;
}

// ---------------------------------------------------------------- beta

double projected_coefficient(const SeparableSolution& sol, const AngularEigenpair& pair, double tau) {
  const bool same_sector = sol.eigenpair.profile.N == 1 || sol.eigenpair.sector_l == pair.sector_l;
  const double o = same_sector ? profile_overlap(sol.eigenpair.profile, pair.profile) : 0.0;
  return std::pow(tau, -pair.sigma_plus) * sol.phi(tau) * o;
}

std::vector<double> beta_coefficients(const SeparableSolution& sol, const Params& p,
                                      const std::vector<AngularEigenpair>& pairs, double R) {
  check_consistent(sol, p);
  if (!(R > 0.0 && std::isfinite(R))) throw std::invalid_argument("beta: R outside the domain");
  const double N = p.N, s = p.s, m2 = p.m * p.m, gs = sol.gamma();
  const double self = sol.eigenpair.norm_certificate;
  std::vector<double> out;
  for (const AngularEigenpair& e : pairs) {
    const bool same_sector = p.N == 1 || sol.eigenpair.sector_l == e.sector_l;
    double o = same_sector ? profile_overlap(sol.eigenpair.profile, e.profile) : 0.0;
    // projections below the eigen solver's orthogonality level are exact zeros
    if (std::abs(o) <= 1e-10 * self) o = 0.0;
    if (o == 0.0) {
      out.push_back(0.0);
      continue;
    }
    const double gm = e.sigma_plus, den = 2.0 * gm + N - 2.0 * s;
    double beta = std::pow(R, -gm) * sol.phi(R) * o;
    if (m2 > 0.0) {
      // bracket = -m^2 rho^{2-2s} phi_i with phi_i = o rho^{gamma} f(rho)
      const double nu = sol.eigenpair.bessel_nu;
      auto G = [&](double rho) {
        return -m2 * o * sol.amplitude * std::pow(p.m, nu) * scaled_bessel_i(nu, p.m * rho);
      };
      const double i1 = power_weighted_integral(G, gm + N + 1.0 - 2.0 * s + gs, R);
      const double i2 = power_weighted_integral(G, 1.0 - gm + gs, R);
      beta += -std::pow(R, -2.0 * gm - N + 2.0 * s) * i1 / den + i2 / den;
    }
    out.push_back(beta);
  }
  return out;
}

std::vector<double> beta_coefficients(const GridSolution& sol, const Params& p,
                                      const std::vector<AngularEigenpair>& pairs, double R) {
  if (p.N != 1) throw std::invalid_argument("grid beta coefficients require N = 1");
  const PolarGrid& g = sol.grid;
  if (!(R > g.rho_min && R <= g.R * (1.0 + 1e-12))) throw std::invalid_argument("beta: R outside the domain");
  const int kR = nearest_row(g, R), C = g.columns();
  const double s = p.s, m2 = p.m * p.m, kap = kappa(s);
  const bool has_h = p.potential.h_kind == PotentialSpec::HKind::power;
  const double chi = p.potential.chi;
  std::vector<double> out;
  for (const AngularEigenpair& e : pairs) {
    const double gm = e.sigma_plus;
    std::vector<double> psi(C);
    for (int j = 0; j < C; ++j) psi[j] = e.profile.value_at(g.alpha[j]);
    psi.front() = e.profile.g_minus;
    psi.back() = e.profile.g_plus;
    std::vector<double> proj(kR + 1), ray(kR + 1);
    for (int i = 0; i <= kR; ++i) {
      double acc = 0.0;
      for (int j = 1; j < C - 1; ++j) acc += g.alpha_mass[j] * sol.at(i, j) * psi[j];
      proj[i] = acc;
      ray[i] = sol.at(i, 0) * psi.front() + sol.at(i, C - 1) * psi.back();
    }
    // bracket(rho) = kappa h(rho) sum_rays w psi - m^2 rho^{2-2s} phi_i(rho)
    auto bracket_at = [&](int i) {
      return kap * arc_h(p, g.rho[i]) * ray[i] - m2 * std::pow(g.rho[i], 2.0 - 2.0 * s) * proj[i];
    };
    const double den = 2.0 * gm + 1.0 - 2.0 * s;
    auto integral = [&](double power) {
      // trapezoid in log rho on rows 0..kR, plus the continued inner piece
      double acc = 0.0;
      for (int i = 0; i < kR; ++i) {
        const double du = std::log(g.rho[i + 1] / g.rho[i]);
        acc += 0.5 * du *
               (std::pow(g.rho[i], power + 1.0) * bracket_at(i) + std::pow(g.rho[i + 1], power + 1.0) * bracket_at(i + 1));
      }
      const double r0 = g.rho[0];
      const double eh = has_h ? -2.0 * s + chi + gm : 0.0, em = 2.0 - 2.0 * s + gm;
      const double bh = kap * arc_h(p, r0) * ray[0], bm = -m2 * std::pow(r0, 2.0 - 2.0 * s) * proj[0];
      if (bh != 0.0) acc += bh * std::pow(r0, power + 1.0) / (power + eh + 1.0);
      if (bm != 0.0) acc += bm * std::pow(r0, power + 1.0) / (power + em + 1.0);
      return acc;
    };
    const double Rn = g.rho[kR];
    const double i1 = integral(gm), i2 = integral(2.0 * s - gm - 1.0);
    out.push_back(std::pow(Rn, -gm) * proj[kR] - std::pow(Rn, -2.0 * gm - 1.0 + 2.0 * s) * i1 / den + i2 / den);
  }
  return out;
}

// ---------------------------------------------------------------- Hardy

HardyMargin hardy_boundary_check(const SeparableSolution& sol, const Params& p, double r) {
  check_consistent(sol, p);
  if (!(r > 0.0)) throw std::invalid_argument("Hardy check radius must be positive");
  const double gap = p.half_gap(), kap = kappa(p.s), n = sol.eigenpair.norm_certificate;
  const double mu = mu1(p).mu1;
  const SepTerms q = separable_terms(sol, r);
  HardyMargin h;
  h.lhs = q.I_grad - kap * q.B_V + gap / r * q.S_w2;
  const double coef = mu + gap * gap;
  h.rhs = coef == 0.0 ? 0.0 : coef * n * radial_integral(sol, p.N - 1.0 - 2.0 * p.s, Radial2::phi2, r);
  h.margin = h.lhs - h.rhs;
  return h;
}

HardyMargin hardy_boundary_check(const PolarFunction& w, const Params& p, double r) {
  if (p.N != 1) throw std::invalid_argument("polar Hardy check requires N = 1");
  if (!(r > 0.0)) throw std::invalid_argument("Hardy check radius must be positive");
  if (!w.w || !w.w_rho || !w.w_alpha) throw std::invalid_argument("Hardy check: missing w or derivatives");
  const double s = p.s, gap = p.half_gap(), kap = kappa(s);
  const double am = p.potential.a_side(-1), ap = p.potential.a_side(+1);
  const double mu = mu1(p).mu1;
  constexpr double tol = 1e-11;
  auto over_alpha = [&](const std::function<double(double)>& f) {
    return integrate_de(f, -kHalfPi, 0.0, tol).value + integrate_de(f, 0.0, kHalfPi, tol).value;
  };
  auto c = [&](double a) { return std::pow(std::cos(a), 1.0 - 2.0 * s); };
  auto grad = [&](double rho) {
    return over_alpha([&](double a) {
      const double wr = w.w_rho(rho, a), wa = w.w_alpha(rho, a);
      return c(a) * (std::pow(rho, 2.0 - 2.0 * s) * wr * wr + std::pow(rho, -2.0 * s) * wa * wa);
    });
  };
  auto weighted = [&](double rho) {
    return over_alpha([&](double a) {
      const double v = w.w(rho, a);
      return c(a) * std::pow(rho, -2.0 * s) * v * v;
    });
  };
  auto flat = [&](double rho) {
    const double vm = w.w(rho, -kHalfPi), vp = w.w(rho, kHalfPi);
    return std::pow(rho, -2.0 * s) * (am * vm * vm + ap * vp * vp);
  };
  const double energy = integrate_de(grad, 0.0, r, tol).value;
  const double potential = integrate_de(flat, 0.0, r, tol).value;
  const double arc = std::pow(r, 2.0 - 2.0 * s) * over_alpha([&](double a) {
    const double v = w.w(r, a);
    return c(a) * v * v;
  });
  HardyMargin h;
  h.lhs = energy - kap * potential + gap / r * arc;
  h.rhs = (mu + gap * gap) * integrate_de(weighted, 0.0, r, tol).value;
  h.margin = h.lhs - h.rhs;
  return h;
}

// ---------------------------------------------------------------- pipeline

PipelineResult halfdisk_pipeline(const Params& p, const PipelineOptions& opt) {
  p.validate();
  if (p.N != 1) throw std::invalid_argument("half-disk pipeline requires N = 1");
  if (!(p.N > 2.0 * p.s)) throw std::invalid_argument("half-disk pipeline requires N > 2s");
  PipelineResult res;
  res.angular = mu1(p);
  const double gap = p.half_gap();
  if (!(res.angular.mu1 > -gap * gap)) throw std::invalid_argument("inadmissible a: mu1(a) <= -((N-2s)/2)^2");
  const AngularEigenpair& e = res.angular.eigenpair;
  res.gamma_pred = -gap + std::sqrt(gap * gap + res.angular.mu1);
  const double gm = res.gamma_pred;
  const AngularProfile prof = e.profile;

  BoundaryData bc;
  bc.outer = [prof](double a) { return prof.value_at(a); };
  bc.source = "outer psi_1, inner homogeneous (coarse pass)";
  bc.inner.kind = InnerCondition::Kind::homogeneous;
  bc.inner.gamma = gm;
  const int coarse_rho = std::max(opt.n_rho / 4, static_cast<int>(std::ceil(std::log(opt.R / opt.rho_min) / std::log(1.1))));
  const PolarGrid coarse = make_polar_grid(p.s, p.m, opt.R, opt.rho_min, coarse_rho, std::max(opt.n_alpha / 4, 8));
  const GridSolution first = solve_halfdisk(p, coarse, bc);
  {
    const int k = std::max(1, nearest_row(coarse, 3.0 * opt.rho_min));
    double acc = 0.0;
    for (int j = 1; j < coarse.columns() - 1; ++j)
      acc += coarse.alpha_mass[j] * first.at(k, j) * prof.value_at(coarse.alpha[j]);
    res.bootstrap_c = acc / e.norm_certificate / std::pow(coarse.rho[k], gm);
  }
  const double c = res.bootstrap_c, rho0 = opt.rho_min;
  bc.inner.kind = InnerCondition::Kind::dirichlet;
  bc.inner.data = [c, rho0, gm, prof](double a) { return c * std::pow(rho0, gm) * prof.value_at(a); };
  bc.source = "outer psi_1, inner c rho^gamma psi_1 (bootstrap)";
  const PolarGrid fine = make_polar_grid(p.s, p.m, opt.R, opt.rho_min, opt.n_rho, opt.n_alpha);
  res.solution = solve_halfdisk(p, fine, bc);

  std::vector<double> rv = opt.r_values;
  if (rv.empty()) {
    const double lo = 3.0 * opt.rho_min, hi = opt.R;
    for (int i = 0; i < 48; ++i) rv.push_back(lo * std::pow(hi / lo, i / 47.0));
  }
  res.trace = frequency_trace(res.solution, p, rv);
  res.gamma = gamma_extract(res.trace);
  res.blowup = rescale_blowup(res.solution, p, opt.tau);
  res.pohozaev = pohozaev_residual(res.solution, p, opt.pohozaev_radius * opt.R);
  res.min_frequency_margin = INFINITY;
  for (double v : res.trace.Nfreq) res.min_frequency_margin = std::min(res.min_frequency_margin, v + gap);
  return res;
}

}  // namespace relfrac
