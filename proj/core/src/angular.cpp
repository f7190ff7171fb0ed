#include "relfrac/angular.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "relfrac/quadrature.hpp"
#include "relfrac/specfun.hpp"

namespace relfrac {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

void tridiag_solve(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                   std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

void check_potential(const Params& p) {
  p.validate(false);
  if (p.N >= 2 && p.potential.a_kind == PotentialSpec::AKind::two_point)
    throw std::invalid_argument("unsupported: non-constant a for N >= 2");
}

}  // namespace

double AngularProfile::lo() const { return N == 1 ? -kHalfPi : 0.0; }
double AngularProfile::hi() const { return kHalfPi; }

double AngularProfile::value_at(double a) const {
  // Near a boundary ray the flux cos^{1-2s} g' is nearly constant, so g is
  // close to affine in d^{2s}, d = distance to the ray. Interpolation is
  // linear in that variable on each side and linear in alpha across 0.
  const double e = 2.0 * s;
  auto lerp = [&](double x0, double g0, double x1, double g1) {
    double v0, v1, v;
    if (x0 >= 0.0 || N >= 2) {
      v0 = std::pow(hi() - x0, e), v1 = std::pow(hi() - x1, e), v = std::pow(std::max(hi() - a, 0.0), e);
    } else if (x1 <= 0.0) {
      v0 = std::pow(x0 - lo(), e), v1 = std::pow(x1 - lo(), e), v = std::pow(std::max(a - lo(), 0.0), e);
    } else {
      v0 = x0, v1 = x1, v = a;
    }
    const double t = (v - v0) / (v1 - v0);
    return (1.0 - t) * g0 + t * g1;
  };
  const std::size_t n = g.size();
  if (a >= alpha.back()) return lerp(alpha.back(), g.back(), hi(), g_plus);
  if (a <= alpha.front()) {
    if (N == 1) return lerp(lo(), g_minus, alpha.front(), g.front());
    return g.front();  // even extension through the pole
  }
  const double h = alpha[1] - alpha[0];
  std::size_t j = static_cast<std::size_t>((a - alpha[0]) / h);
  if (j >= n - 1) j = n - 2;
  return lerp(alpha[j], g[j], alpha[j + 1], g[j + 1]);
}

SectorOperator::SectorOperator(int N, double s, int l, int n)
    : N_(N), l_(N == 1 ? 0 : l), n_(n), s_(s), kappa_(kappa(s)) {
  if (n < 64) throw std::invalid_argument("angular grid_n must be >= 64");
  if (l < 0) throw std::invalid_argument("sector l must be >= 0");
  const bool N1 = (N == 1);
  const double lo = N1 ? -kHalfPi : 0.0;
  const double h = (kHalfPi - lo) / n;
  const double e1 = N1 ? 0.0 : N - 1.0, e2 = 1.0 - 2.0 * s;
  alpha_.resize(n);
  mass_.resize(n);
  pot_.assign(n, 0.0);
  cond_.resize(n - 1);
  for (int j = 0; j < n; ++j) {
    const double a = lo + j * h, b = lo + (j + 1) * h;
    alpha_[j] = 0.5 * (a + b);
    mass_[j] = integrate_sin_cos_power(a, b, e1, e2);
    if (!N1 && l_ > 0) {
      const double sn = std::sin(alpha_[j]);
      pot_[j] = l_ * (l_ + N - 2.0) * mass_[j] / (sn * sn);
    }
  }
  for (int j = 0; j + 1 < n; ++j)
    cond_[j] = 1.0 / integrate_sin_cos_power(alpha_[j], alpha_[j + 1], -e1, -e2);
  cb_plus_ = 1.0 / integrate_sin_cos_power(alpha_[n - 1], kHalfPi, -e1, -e2);
  if (N1) cb_minus_ = 1.0 / integrate_sin_cos_power(-kHalfPi, alpha_[0], -e1, -e2);
}

void SectorOperator::condensed(double a_minus, double a_plus, std::vector<double>& diag,
                               std::vector<double>& off) const {
  diag.assign(n_, 0.0);
  off.assign(n_ - 1, 0.0);
  for (int j = 0; j < n_; ++j) diag[j] = pot_[j];
  for (int j = 0; j + 1 < n_; ++j) {
    diag[j] += cond_[j];
    diag[j + 1] += cond_[j];
    off[j] = -cond_[j];
  }
  // boundary node g_b eliminated: c(g_b-g)^2 - k g_b^2 -> -c k/(c-k) g^2
  auto robin = [](double c, double k) {
    if (!(c - k > 0.0)) throw std::invalid_argument("angular grid too coarse for the Robin datum");
    return -c * k / (c - k);
  };
  diag[n_ - 1] += robin(cb_plus_, kappa_ * a_plus);
  if (N_ == 1) diag[0] += robin(cb_minus_, kappa_ * a_minus);
}

void SectorOperator::boundary_values(const std::vector<double>& g, double a_minus, double a_plus,
                                     double& gm, double& gp) const {
  gp = cb_plus_ * g.back() / (cb_plus_ - kappa_ * a_plus);
  gm = (N_ == 1) ? cb_minus_ * g.front() / (cb_minus_ - kappa_ * a_minus) : 0.0;
}

std::vector<double> SectorOperator::eigenvalues(double a_minus, double a_plus, int count) const {
  std::vector<double> d, e;
  condensed(a_minus, a_plus, d, e);
  for (int j = 0; j < n_; ++j) d[j] /= mass_[j];
  for (int j = 0; j + 1 < n_; ++j) e[j] /= std::sqrt(mass_[j] * mass_[j + 1]);
  std::vector<double> w(n_);
  std::vector<lapack_int> ifail(n_);
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dstevx(LAPACK_COL_MAJOR, 'N', 'I', n_, d.data(), e.data(), 0.0, 0.0, 1,
                                   count, abstol, &found, w.data(), nullptr, 1, ifail.data());
  if (info != 0 || found != count) throw std::runtime_error("angular: dstevx failed");
  w.resize(count);
  return w;
}

std::vector<AngularEigenpair> SectorOperator::eigenpairs(double a_minus, double a_plus,
                                                         int count) const {
  std::vector<double> d, e;
  condensed(a_minus, a_plus, d, e);
  for (int j = 0; j < n_; ++j) d[j] /= mass_[j];
  for (int j = 0; j + 1 < n_; ++j) e[j] /= std::sqrt(mass_[j] * mass_[j + 1]);
  std::vector<double> w(n_), z(static_cast<std::size_t>(n_) * count);
  std::vector<lapack_int> ifail(n_);
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'I', n_, d.data(), e.data(), 0.0, 0.0, 1,
                                   count, abstol, &found, w.data(), z.data(), n_, ifail.data());
  if (info != 0 || found != count) throw std::runtime_error("angular: dstevx failed");

  std::vector<AngularEigenpair> out(count);
  for (int k = 0; k < count; ++k) {
    AngularEigenpair& ep = out[k];
    ep.sector_l = l_;
    ep.k = k + 1;
    ep.mu = w[k];
    ep.grid_n = n_;
    AngularProfile& pr = ep.profile;
    pr.N = N_;
    pr.s = s_;
    pr.alpha = alpha_;
    pr.mass = mass_;
    pr.g.resize(n_);
    for (int j = 0; j < n_; ++j) pr.g[j] = z[static_cast<std::size_t>(k) * n_ + j] / std::sqrt(mass_[j]);
    // deterministic sign: positive next to alpha = pi/2 unless that value is negligible
    double gmax = 0.0;
    int jmax = 0;
    for (int j = 0; j < n_; ++j)
      if (std::abs(pr.g[j]) > gmax) gmax = std::abs(pr.g[j]), jmax = j;
    const double ref = std::abs(pr.g.back()) > 1e-8 * gmax ? pr.g.back() : pr.g[jmax];
    if (ref < 0.0)
      for (double& v : pr.g) v = -v;
    boundary_values(pr.g, a_minus, a_plus, pr.g_minus, pr.g_plus);

    double norm = 0.0;
    for (int j = 0; j < n_; ++j) norm += mass_[j] * pr.g[j] * pr.g[j];
    ep.norm_certificate = norm;
    // energy without Robin term, boundary nodes included
    double A = 0.0;
    for (int j = 0; j < n_; ++j) A += pot_[j] * pr.g[j] * pr.g[j];
    for (int j = 0; j + 1 < n_; ++j) A += cond_[j] * (pr.g[j + 1] - pr.g[j]) * (pr.g[j + 1] - pr.g[j]);
    A += cb_plus_ * (pr.g_plus - pr.g.back()) * (pr.g_plus - pr.g.back());
    if (N_ == 1) A += cb_minus_ * (pr.g_minus - pr.g.front()) * (pr.g_minus - pr.g.front());
    ep.dirichlet_energy = A;
    ep.boundary_mass = a_plus * pr.g_plus * pr.g_plus + (N_ == 1 ? a_minus * pr.g_minus * pr.g_minus : 0.0);
    fill_exponents(ep, N_, s_);
  }
  return out;
}

double SectorOperator::rayleigh(const std::vector<double>& g, double a_minus, double a_plus) const {
  if (static_cast<int>(g.size()) != n_) throw std::invalid_argument("rayleigh: sample count mismatch");
  if (!(cb_plus_ > kappa_ * a_plus) || (N_ == 1 && !(cb_minus_ > kappa_ * a_minus)))
    throw std::invalid_argument("angular grid too coarse for the Robin datum");
  // difference form keeps constants exact
  double q = 0.0, m = 0.0;
  for (int j = 0; j < n_; ++j) {
    q += pot_[j] * g[j] * g[j];
    m += mass_[j] * g[j] * g[j];
  }
  for (int j = 0; j + 1 < n_; ++j) q += cond_[j] * (g[j + 1] - g[j]) * (g[j + 1] - g[j]);
  q += cb_plus_ * kappa_ * a_plus / (kappa_ * a_plus - cb_plus_) * g.back() * g.back();
  if (N_ == 1) q += cb_minus_ * kappa_ * a_minus / (kappa_ * a_minus - cb_minus_) * g.front() * g.front();
  if (!(m > 0.0)) throw std::invalid_argument("rayleigh: zero denominator");
  return q / m;
}

double SectorOperator::steklov_max(double a_minus, double a_plus, double shift) const {
  // uncondensed SPD system on [g_minus?] g_0..g_{n-1} g_plus
  const int off0 = (N_ == 1) ? 1 : 0;
  const int n = n_ + 1 + off0;
  std::vector<double> diag(n, 0.0), up(n - 1, 0.0);
  for (int j = 0; j < n_; ++j) diag[off0 + j] = pot_[j] + shift * mass_[j];
  for (int j = 0; j + 1 < n_; ++j) {
    diag[off0 + j] += cond_[j];
    diag[off0 + j + 1] += cond_[j];
    up[off0 + j] = -cond_[j];
  }
  diag[off0 + n_ - 1] += cb_plus_;
  diag[n - 1] += cb_plus_;
  up[n - 2] = -cb_plus_;
  if (off0) {
    diag[0] += cb_minus_;
    diag[1] += cb_minus_;
    up[0] = -cb_minus_;
  }
  auto solve_unit = [&](int idx) {
    std::vector<double> rhs(n, 0.0);
    rhs[idx] = 1.0;
    tridiag_solve(up, diag, up, rhs);
    return rhs;
  };
  auto xp = solve_unit(n - 1);
  const double kp = kappa_ * a_plus;
  if (N_ != 1) return std::max(0.0, kp * xp[n - 1]);
  auto xm = solve_unit(0);
  const double km = kappa_ * a_minus;
  // boundary Schur block S = [[xm0, xp0],[xm_last, xp_last]]; eigenvalues of S D
  const double s11 = xm[0], s12 = xp[0], s22 = xp[n - 1];
  const double m11 = s11 * km, m12 = s12 * kp, m21 = s12 * km, m22 = s22 * kp;
  const double tr = m11 + m22, det = m11 * m22 - m12 * m21;
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  return std::max(0.0, 0.5 * (tr + disc));
}

void fill_exponents(AngularEigenpair& e, int N, double s) {
  const double p = 0.5 * (N - 2.0 * s);
  const double disc = p * p + e.mu;
  e.admissible = disc >= 0.0;
  if (e.admissible) {
    e.bessel_nu = std::sqrt(disc);
    // the root with the smaller magnitude comes from mu / (larger root) to avoid cancellation
    if (p > 0.0) {
      e.sigma_minus = -p - e.bessel_nu;
      e.sigma_plus = -e.mu / e.sigma_minus;
    } else {
      e.sigma_plus = -p + e.bessel_nu;
      e.sigma_minus = e.sigma_plus != 0.0 ? -e.mu / e.sigma_plus : -p - e.bessel_nu;
    }
  } else {
    e.bessel_nu = e.sigma_plus = e.sigma_minus = std::numeric_limits<double>::quiet_NaN();
  }
  e.gamma = e.sigma_plus;
}

std::vector<AngularEigenpair> solve_sector(const Params& p, int l, int count, SolveOptions opt) {
  check_potential(p);
  if (count < 1 || count > 16 || count > opt.grid_n / 16)
    throw std::invalid_argument("grid too coarse to resolve the requested eigenpair count");
  const double am = p.potential.a_side(-1), ap = p.potential.a_side(+1);
  SectorOperator op(p.N, p.s, l, opt.grid_n);
  auto pairs = op.eigenpairs(am, ap, count);
  if (opt.richardson) {
    SectorOperator fine(p.N, p.s, l, 2 * opt.grid_n);
    auto mu2 = fine.eigenvalues(am, ap, count);
    for (int k = 0; k < count; ++k) {
      pairs[k].mu = (4.0 * mu2[k] - pairs[k].mu) / 3.0;
      pairs[k].extrapolated = true;
      fill_exponents(pairs[k], p.N, p.s);
    }
  }
  return pairs;
}

std::vector<AngularEigenpair> global_spectrum(const Params& p, int count, int lmax,
                                              SolveOptions opt) {
  check_potential(p);
  if (p.N == 1) return solve_sector(p, 0, count, opt);
  std::vector<AngularEigenpair> all;
  for (int l = 0; l <= lmax; ++l) {
    auto sec = solve_sector(p, l, count, opt);
    all.insert(all.end(), sec.begin(), sec.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const AngularEigenpair& a, const AngularEigenpair& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.sector_l != b.sector_l) return a.sector_l < b.sector_l;
    return a.k < b.k;
  });
  all.resize(count);
  for (int k = 0; k < count; ++k) all[k].k = k + 1;
  return all;
}

Mu1Result mu1(const Params& p, SolveOptions opt) {
  check_potential(p);
  Mu1Result r;
  const int lmax = (p.N == 1) ? 0 : 4;
  for (int l = 0; l <= lmax; ++l) {
    auto e = solve_sector(p, l, 1, opt).front();
    if (l == 0 || e.mu < r.mu1) {
      if (l > 0) r.min_at_l0 = false;
      r.mu1 = e.mu;
      r.eigenpair = e;
    }
  }
  const auto& g = r.eigenpair.profile.g;
  const double gmax = *std::max_element(g.begin(), g.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  for (double v : g)
    if (v * gmax < 0.0 && std::abs(v) > 1e-10 * std::abs(gmax)) r.sign_definite = false;
  return r;
}

double rayleigh_quotient(const Params& p, int l, const std::vector<double>& g, int grid_n) {
  check_potential(p);
  SectorOperator op(p.N, p.s, l, grid_n);
  return op.rayleigh(g, p.potential.a_side(-1), p.potential.a_side(+1));
}

double sharp_constant_root(const Params& templ, double a_lo, double a_hi, SolveOptions opt) {
  check_potential(templ);
  if (!(templ.N > 2.0 * templ.s)) throw std::invalid_argument("sharp_constant_root requires N > 2s");
  const double p2 = templ.half_gap() * templ.half_gap();
  SectorOperator coarse(templ.N, templ.s, 0, opt.grid_n);
  SectorOperator fine(templ.N, templ.s, 0, 2 * opt.grid_n);
  auto f = [&](double a0) {
    const double m1 = coarse.eigenvalues(a0, a0, 1)[0];
    if (!opt.richardson) return m1 + p2;
    const double m2 = fine.eigenvalues(a0, a0, 1)[0];
    return (4.0 * m2 - m1) / 3.0 + p2;
  };
  double flo = f(a_lo), fhi = f(a_hi);
  if (flo * fhi > 0.0) throw std::invalid_argument("sharp_constant_root: no sign change in bracket");
  double lo = a_lo, hi = a_hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= 1e-6 && hi - lo < 1e-10) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14) return 0.5 * (lo + hi);
  }
  return 0.5 * (lo + hi);
}

double hardy_constant(const Params& p, int grid_n) {
  check_potential(p);
  if (!(p.N > 2.0 * p.s)) throw std::invalid_argument("hardy_constant requires N > 2s");
  const double p2 = p.half_gap() * p.half_gap();
  SolveOptions opt;
  opt.grid_n = grid_n;
  const double m1 = mu1(p, opt).mu1;
  if (!(m1 > -p2)) throw std::invalid_argument("inadmissible a: mu1(a) <= -((N-2s)/2)^2");
  const double am = p.potential.a_side(-1), ap = p.potential.a_side(+1);
  const double c1 = 1.0 - SectorOperator(p.N, p.s, 0, grid_n).steklov_max(am, ap, p2);
  const double c2 = 1.0 - SectorOperator(p.N, p.s, 0, 2 * grid_n).steklov_max(am, ap, p2);
  const double c = std::min(1.0, (4.0 * c2 - c1) / 3.0);
  if (!(c > 0.0)) throw std::invalid_argument("inadmissible a: Hardy constant not positive on this grid");
  return c;
}

std::string eigen_table_csv(const std::vector<AngularEigenpair>& pairs) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "k,l,mu,sigma_plus,sigma_minus,nu,grid_n,extrapolated\n";
  for (const auto& e : pairs)
    os << e.k << ',' << e.sector_l << ',' << e.mu << ',' << e.sigma_plus << ',' << e.sigma_minus << ','
       << e.bessel_nu << ',' << e.grid_n << ',' << (e.extrapolated ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace relfrac
