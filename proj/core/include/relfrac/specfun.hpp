#pragma once

namespace relfrac {

// Lanczos approximation (g = 607/128, 15 terms) with reflection for x < 1/2.
// Throws std::domain_error at non-positive integers.
double gamma(double x);
// 1/Gamma(x); zero at the poles.
double rgamma(double x);

struct BesselIK {
  double i = 0.0, k = 0.0;    // I_nu(r), K_nu(r)
  double di = 0.0, dk = 0.0;  // derivatives in r
  bool overflow = false;      // set when a value left the double range
};

// Temme series for r < 2, Steed continued fraction for r >= 2, I_nu from CF1
// and the Wronskian. nu >= 0, r > 0.
BesselIK bessel_ik(double nu, double r);

// K_nu(r); negative nu is mapped through K_{-nu} = K_nu. Throws
// std::domain_error for r <= 0 and std::overflow_error when K overflows.
double bessel_k(double nu, double r);
double bessel_k_deriv(double nu, double r);
// I_nu(r), nu >= 0, r >= 0. Throws std::overflow_error on overflow.
double bessel_i(double nu, double r);
double bessel_i_deriv(double nu, double r);

// theta(r) = (2/Gamma(s)) (r/2)^s K_s(r), theta(0) = 1.
double theta_profile(double s, double r);
// theta'(r) = -(2/Gamma(s)) (r/2)^s K_{1-s}(r), r > 0.
double theta_profile_deriv(double s, double r);

// Central-difference residuals of r^2K''+rK'-(r^2+nu^2)K = 0 and
// theta''+((1-2s)/r)theta'-theta = 0, relative to the largest term. Steps:
// h = 1e-4 r for K, h = 1e-4 max(r,1) for theta.
double bessel_k_ode_residual(double nu, double r);
double theta_ode_residual(double s, double r);

double kappa(double s);  // 2^{1-2s} Gamma(1-s)/Gamma(s)

struct KappaRoutes {
  double closed_form = 0.0;
  double integral = 0.0;  // int_0^inf t^{1-2s}(theta'^2 + theta^2) dt
  double limit = 0.0;     // -lim_{t->0} t^{1-2s} theta'(t), extrapolated
  double integral_error = 0.0;
};
KappaRoutes kappa_from_ode(double s);

struct Constants {
  int N = 1;
  double s = 0.5;
  double kappa_s = 0.0;      // 2^{1-2s} Gamma(1-s)/Gamma(s)
  double kappa_s_alt = 0.0;  // Gamma(1-s)/(2^{2s-1} Gamma(s))
  double Lambda_Ns = 0.0;    // 2^{2s} Gamma^2((N+2s)/4)/Gamma^2((N-2s)/4)
  double c_Ns = 0.0;         // kernel constant, short display
  double c_Ns_alt = 0.0;     // kernel constant, display with Gamma((N+2s)/2)
  double Cprime_Ns = 0.0;    // Bessel-kernel constant fixed by normalization
  double N_s = 0.0;          // N + 2 - 2s
};
Constants constants(int N, double s);

// C' such that int_{R^N} P_1(1,x) dx = theta(1); radial quadrature.
double bessel_kernel_constant(int N, double s);
// |S^{N-1}|
double sphere_area(int N);

}  // namespace relfrac
