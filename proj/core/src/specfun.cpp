#include "relfrac/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "relfrac/quadrature.hpp"

namespace relfrac {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double gamma_lanczos(double x) {  // x >= 1/2
  x -= 1.0;
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + double(i));
  const double t = x + kLanczosG + 0.5;
  const double p = std::pow(t, 0.5 * (x + 0.5));
  return std::sqrt(2.0 * kPi) * a * (p * std::exp(-t)) * p;
}

// Even Taylor coefficients c_{2}, c_{4}, ... of 1/Gamma(z) = sum c_k z^k.
constexpr std::array<double, 13> kRecipGammaEven = {
    0.57721566490153286061,    -0.042002635034095235529,  -0.042197734555544336748,
    0.0072189432466630995424,  -0.00021524167411495097282, -0.000020134854780788238656,
    1.1330272319816958824e-6,  6.1160951044814158179e-9,  -1.1812745704870201446e-9,
    7.782263439905071254e-12,  5.100370287454475979e-13,  -5.3481225394230179824e-15,
    -1.1812593016974587695e-16};

// gam1 = (1/Gamma(1-x) - 1/Gamma(1+x))/(2x), |x| <= 1/2, free of cancellation.
double temme_gam1(double x) {
  const double x2 = x * x;
  double sum = 0.0, p = 1.0;
  for (double c : kRecipGammaEven) {
    sum += c * p;
    p *= x2;
  }
  return -sum;
}

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;
constexpr int kMaxIt = 100000;

}  // namespace

double gamma(double x) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) throw std::domain_error("gamma: pole at non-positive integer");
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_lanczos(1.0 - x));
  return gamma_lanczos(x);
}

double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 171.0) return 0.0;
  return 1.0 / gamma(x);
}

BesselIK bessel_ik(double nu, double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_ik: r must be > 0");
  if (!(nu >= 0.0)) throw std::domain_error("bessel_ik: nu must be >= 0");

  const int nl = static_cast<int>(nu + 0.5);
  const double xmu = nu - nl, xmu2 = xmu * xmu;
  const double xi = 1.0 / x, xi2 = 2.0 * xi;

  // CF1: I'_nu / I_nu (modified Lentz)
  double h = nu * xi;
  if (h < kFpMin) h = kFpMin;
  double b = xi2 * nu, d = 0.0, c = h;
  int i = 1;
  for (; i <= kMaxIt; ++i) {
    b += xi2;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (i > kMaxIt) throw std::runtime_error("bessel_ik: CF1 did not converge");

  // downward recurrence to order xmu
  double ril = kFpMin, ripl = h * ril;
  const double ril1 = ril, rip1 = ripl;
  double scale_log = 0.0;  // log of factor removed from ril1/rip1 bookkeeping
  double fact = nu * xi;
  for (int l = nl; l >= 1; --l) {
    const double ritemp = fact * ril + ripl;
    fact -= xi;
    ripl = fact * ritemp + ril;
    ril = ritemp;
    if (std::abs(ril) > 1e250) {
      ril *= 1e-250;
      ripl *= 1e-250;
      scale_log += 250.0 * std::log(10.0);
    }
  }
  const double f = ripl / ril;

  double rkmu, rk1;
  if (x < 2.0) {
    // Temme series
    const double x2 = 0.5 * x, pimu = kPi * xmu;
    const double fct = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    d = -std::log(x2);
    double e = xmu * d;
    const double fct2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    const double gampl = rgamma(1.0 + xmu), gammi = rgamma(1.0 - xmu);
    const double gam1 = temme_gam1(xmu), gam2 = 0.5 * (gammi + gampl);
    double ff = fct * (gam1 * std::cosh(e) + gam2 * fct2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (i = 1; i <= kMaxIt; ++i) {
      ff = (i * ff + p + q) / (i * double(i) - xmu2);
      c *= (d / i);
      p /= (i - xmu);
      q /= (i + xmu);
      const double del = c * ff;
      sum += del;
      const double del1 = c * (p - i * ff);
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIt) throw std::runtime_error("bessel_ik: Temme series did not converge");
    rkmu = sum;
    rk1 = sum1 * xi2;
  } else {
    // Steed's CF2
    b = 2.0 * (1.0 + x);
    d = 1.0 / b;
    double delh = d;
    h = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - xmu2;
    double q = a1;
    c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (i = 2; i <= kMaxIt; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIt) throw std::runtime_error("bessel_ik: CF2 did not converge");
    h = a1 * h;
    rkmu = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
  }

  const double rkmup = xmu * xi * rkmu - rk1;
  const double rimu = xi / (f * rkmu - rkmup);

  BesselIK out;
  // I_nu = rimu * ril1/ril with ril carrying an extra factor exp(-scale_log)
  out.i = (rimu * ril1) / ril * std::exp(-scale_log);
  out.di = (rimu * rip1) / ril * std::exp(-scale_log);
  for (i = 1; i <= nl; ++i) {
    const double rktemp = (xmu + i) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = rktemp;
  }
  out.k = rkmu;
  out.dk = nu * xi * rkmu - rk1;
  out.overflow = !std::isfinite(out.k) || !std::isfinite(out.i) || !std::isfinite(out.dk) ||
                 !std::isfinite(out.di);
  return out;
}

double bessel_k(double nu, double r) {
  if (!(r > 0.0)) throw std::domain_error("bessel_k: r must be > 0");
  auto v = bessel_ik(std::abs(nu), r);
  if (!std::isfinite(v.k)) throw std::overflow_error("bessel_k: overflow");
  return v.k;
}

double bessel_k_deriv(double nu, double r) {
  if (!(r > 0.0)) throw std::domain_error("bessel_k_deriv: r must be > 0");
  auto v = bessel_ik(std::abs(nu), r);
  if (!std::isfinite(v.dk)) throw std::overflow_error("bessel_k_deriv: overflow");
  return v.dk;
}

double bessel_i(double nu, double r) {
  if (!(nu >= 0.0)) throw std::domain_error("bessel_i: nu must be >= 0");
  if (r < 0.0) throw std::domain_error("bessel_i: r must be >= 0");
  if (r == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  auto v = bessel_ik(nu, r);
  if (!std::isfinite(v.i)) throw std::overflow_error("bessel_i: overflow");
  return v.i;
}

double bessel_i_deriv(double nu, double r) {
  if (!(nu >= 0.0)) throw std::domain_error("bessel_i_deriv: nu must be >= 0");
  if (r < 0.0) throw std::domain_error("bessel_i_deriv: r must be >= 0");
  if (r == 0.0) {
    if (nu == 0.0) return 0.0;
    if (nu == 1.0) return 0.5;
    if (nu > 1.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  auto v = bessel_ik(nu, r);
  if (!std::isfinite(v.di)) throw std::overflow_error("bessel_i_deriv: overflow");
  return v.di;
}

double theta_profile(double s, double r) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("theta_profile: s must lie in (0,1)");
  if (r < 0.0) throw std::domain_error("theta_profile: r must be >= 0");
  if (r == 0.0) return 1.0;
  if (r > 700.0) return 0.0;
  return 2.0 * rgamma(s) * std::pow(0.5 * r, s) * bessel_k(s, r);
}

double theta_profile_deriv(double s, double r) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("theta_profile_deriv: s must lie in (0,1)");
  if (!(r > 0.0)) throw std::domain_error("theta_profile_deriv: r must be > 0");
  if (r > 700.0) return 0.0;
  return -2.0 * rgamma(s) * std::pow(0.5 * r, s) * bessel_k(1.0 - s, r);
}

double bessel_k_ode_residual(double nu, double r) {
  const double h = 1e-4 * r;
  const double km = bessel_k(nu, r - h), k0 = bessel_k(nu, r), kp = bessel_k(nu, r + h);
  const double d2 = r * r * (kp - 2.0 * k0 + km) / (h * h);
  const double d1 = r * (kp - km) / (2.0 * h);
  const double d0 = (r * r + nu * nu) * k0;
  return std::abs(d2 + d1 - d0) / std::max({std::abs(d2), std::abs(d1), std::abs(d0)});
}

double theta_ode_residual(double s, double r) {
  const double h = 1e-4 * std::max(r, 1.0);
  if (!(r > h)) throw std::domain_error("theta_ode_residual: r must exceed the step");
  const double tm = theta_profile(s, r - h), t0 = theta_profile(s, r), tp = theta_profile(s, r + h);
  const double d2 = (tp - 2.0 * t0 + tm) / (h * h);
  const double d1 = (1.0 - 2.0 * s) / r * (tp - tm) / (2.0 * h);
  return std::abs(d2 + d1 - t0) / std::max({std::abs(d2), std::abs(d1), std::abs(t0)});
}

double kappa(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("kappa: s must lie in (0,1)");
  return std::pow(2.0, 1.0 - 2.0 * s) * gamma(1.0 - s) * rgamma(s);
}

KappaRoutes kappa_from_ode(double s) {
  KappaRoutes out;
  out.closed_form = kappa(s);

  auto integrand = [s](double t) {
    if (t <= 0.0 || t > 700.0) return 0.0;
    const double th = theta_profile(s, t);
    const double w = std::pow(t, 0.5 - s);
    const double a = w * theta_profile_deriv(s, t), b = w * th;
    return a * a + b * b;
  };
  const double inf = std::numeric_limits<double>::infinity();
  // split at t = 1: the t -> 0 end carries the t^{2s-1} singularity
  auto lo = integrate_de(integrand, 0.0, 1.0, 1e-10);
  auto hi = integrate_de(integrand, 1.0, inf, 1e-10);
  out.integral = lo.value + hi.value;
  out.integral_error = lo.error + hi.error;

  // g(t) = -t^{1-2s} theta'(t) = kappa (1 + c1 t^{2-2s} + c2 t^2 + ...);
  // three levels, exact solve for (c0, c1, c2).
  const std::array<double, 3> ts = {1e-3, 1e-4, 1e-5};
  double A[3][3], y[3];
  for (int i = 0; i < 3; ++i) {
    const double t = ts[i];
    y[i] = -std::pow(t, 1.0 - 2.0 * s) * theta_profile_deriv(s, t);
    A[i][0] = 1.0;
    A[i][1] = std::pow(t, 2.0 - 2.0 * s);
    A[i][2] = t * t;
  }
  // Cramer's rule on the 3x3 system
  auto det3 = [](double M[3][3]) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
  };
  double B[3][3];
  for (int i = 0; i < 3; ++i) {
    B[i][0] = y[i];
    B[i][1] = A[i][1];
    B[i][2] = A[i][2];
  }
  out.limit = det3(B) / det3(A);
  return out;
}

double sphere_area(int N) {
  // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
  return 2.0 * std::pow(kPi, 0.5 * N) * rgamma(0.5 * N);
}

double bessel_kernel_constant(int N, double s) {
  if (N < 1) throw std::domain_error("bessel_kernel_constant: N must be >= 1");
  const double nu = 0.5 * (N + 2.0 * s);
  // int_{R^N} |z|^{-nu} K_nu(|z|) dx at t = 1, |z| = sqrt(1 + rho^2)
  auto f = [N, nu](double rho) {
    const double z = std::sqrt(1.0 + rho * rho);
    if (z > 700.0) return 0.0;
    return std::pow(rho, N - 1) * std::pow(z, -nu) * bessel_k(nu, z);
  };
  const double inf = std::numeric_limits<double>::infinity();
  const double I = sphere_area(N) * (integrate_de(f, 0.0, 1.0).value + integrate_de(f, 1.0, inf).value);
  return theta_profile(s, 1.0) / I;
}

Constants constants(int N, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("constants: s must lie in (0,1)");
  if (N < 1) throw std::domain_error("constants: N must be >= 1");
  Constants c;
  c.N = N;
  c.s = s;
  c.kappa_s = kappa(s);
  c.kappa_s_alt = gamma(1.0 - s) / (std::pow(2.0, 2.0 * s - 1.0) * gamma(s));
  const double r = gamma(0.25 * (N + 2.0 * s)) * rgamma(0.25 * (N - 2.0 * s));
  c.Lambda_Ns = std::pow(2.0, 2.0 * s) * r * r;
  const double nu = 0.5 * (N + 2.0 * s);
  const double common = std::pow(2.0, 1.0 - nu) * std::pow(kPi, -0.5 * N) * std::pow(2.0, 2.0 * s);
  c.c_Ns = common * s * (1.0 - s) / gamma(2.0 - s);
  c.c_Ns_alt = std::pow(2.0, 1.0 - nu) / gamma(nu) * std::pow(kPi, -0.5 * N) *
               std::pow(2.0, 2.0 * s) * gamma(nu) / gamma(2.0 - s) * s * (1.0 - s);
  c.Cprime_Ns = bessel_kernel_constant(N, s);
  c.N_s = N + 2.0 - 2.0 * s;
  return c;
}

}  // namespace relfrac
