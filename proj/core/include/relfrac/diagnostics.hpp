#pragma once

#include <functional>
#include <string>
#include <vector>

#include "relfrac/angular.hpp"
#include "relfrac/halfdisk.hpp"
#include "relfrac/params.hpp"

namespace relfrac {

// w(r, theta) = phi(r) psi(theta) with psi the eigenpair's angular function.
// power: phi = amplitude r^{sigma_plus} (m = 0, h = 0).
// modified_bessel: phi = amplitude r^{-(N-2s)/2} I_nu(m r) (m > 0, h = 0).
struct SeparableSolution {
  enum class Radial { power, modified_bessel };

  AngularEigenpair eigenpair;
  Radial radial = Radial::power;
  double m = 0.0;
  double amplitude = 1.0;
  double certified_residual = 0.0;  // max relative radial ODE residual

  double gamma() const { return eigenpair.sigma_plus; }
  double phi(double r) const;
  double dphi(double r) const;
  double d2phi(double r) const;
  // For N = 1 the full solution; for N >= 2 the factor multiplying Y_l.
  double value(double r, double alpha) const;
  // phi'' + ((N+1-2s)/r) phi' - (mu/r^2) phi - m^2 phi relative to its largest term
  double ode_residual(double r) const;
};

// Throws std::invalid_argument for an inadmissible eigenpair or m <= 0 with the
// Bessel kind; std::runtime_error if the radial residual certificate exceeds 1e-8.
SeparableSolution make_separable(const AngularEigenpair& pair, SeparableSolution::Radial kind,
                                 double amplitude, double m = 0.0);

struct FrequencyTrace {
  std::vector<double> r_values;  // decreasing
  std::vector<double> H, D, Nfreq;
  std::vector<double> Hprime;           // analytic (separable) or nodal differences (grid)
  std::vector<double> residual_Hprime;  // |H' - 2D/r| / max(|H'|, |2D/r|, H/r)
  std::vector<double> nu1, nu2;
  double gamma_fit = 0.0;               // NaN when the samples do not allow a fit
  bool from_grid = false;

  // columns r,H,D,N,res_Hprime,nu1,nu2
  std::string to_csv() const;
};

// Separable traces use closed-form radial factors; the volume integrals in D
// are closed form for the power kind and double-exponential quadrature for
// the Bessel kind. Params must carry the matching m and h = 0.
FrequencyTrace frequency_trace(const SeparableSolution& sol, const Params& p,
                               const std::vector<double>& r_values);
// Grid traces (N = 1): each r is snapped to the nearest radial node and must
// satisfy 3 rho_min <= r <= R. The excised ball rho < rho_min enters D through
// its flux int t^{1-2s} w d_rho w on the inner arc.
FrequencyTrace frequency_trace(const GridSolution& sol, const Params& p,
                               const std::vector<double>& r_values);

struct HprimeReport {
  std::vector<double> residual;
  double max_residual = 0.0;
};
// Requires at least 4 samples.
HprimeReport check_Hprime(const FrequencyTrace& trace);

struct PohozaevResidual {
  double res1 = 0.0, res2 = 0.0;      // |LHS - RHS| / scale
  double scale1 = 0.0, scale2 = 0.0;  // largest absolute constituent term
};
// Full ball B_r^+. The angular energy is taken as mu |psi|^2 + kappa_s int a psi^2
// so that the stored eigenvalue defines the separable solution exactly.
PohozaevResidual pohozaev_residual(const SeparableSolution& sol, const Params& p, double r);
// Annulus rho_min < |z| < r (r snapped to a node): volume terms over the
// annulus, arc terms at r minus arc terms at rho_min.
PohozaevResidual pohozaev_residual(const GridSolution& sol, const Params& p, double r);

struct BlowupReport {
  std::vector<double> tau;
  std::vector<double> distance;  // weighted L2 distance on B_1^+ to |z|^gamma psi
  double fitted_rate = 0.0;      // slope of log distance vs log tau (0 if any distance is 0)
  bool decreasing = true;        // non-increasing along tau

  // {"tau":[...],"distance":[...],"fitted_rate":x}
  std::string to_json() const;
};
// tau_seq must be strictly decreasing in (0, 1]. Throws std::runtime_error
// when H(tau) <= 0.
BlowupReport rescale_blowup(const SeparableSolution& sol, const Params& p,
                            const std::vector<double>& tau_seq);
// The target profile is the ground eigenpair mu1(p); tau is snapped to the
// nearest radial node and the distance covers rho_min / tau < |z| < 1.
BlowupReport rescale_blowup(const GridSolution& sol, const Params& p,
                            const std::vector<double>& tau_seq);

struct GammaEstimate {
  double gamma = 0.0;
  double ci = 0.0;        // half-width of the 95% Student-t interval of the slope
  int window = 0;         // samples in the fit window
  double window_lo = 0.0, window_hi = 0.0;
  bool cross_check = true;  // smallest-r N within max(3 ci, 1e-8) of gamma
};
// Least-squares slope of log H against 2 log r over the smallest decade.
// Throws std::invalid_argument with fewer than 6 samples in that decade or a
// sample range shorter than a decade; std::runtime_error if H is not monotone
// in the window.
GammaEstimate gamma_extract(const FrequencyTrace& trace);

// beta_i for each entry of `pairs`. Angular projections use the discrete
// weighted inner product of the eigen solver's cells.
std::vector<double> beta_coefficients(const SeparableSolution& sol, const Params& p,
                                      const std::vector<AngularEigenpair>& pairs, double R);
// Grid version (N = 1); R is snapped to a radial node in (rho_min, grid R].
// Below rho_min the solution is continued by (rho/rho_min)^{gamma_i}.
std::vector<double> beta_coefficients(const GridSolution& sol, const Params& p,
                                      const std::vector<AngularEigenpair>& pairs, double R);
// tau^{-gamma} phi_k(tau) with phi_k the projection on pair k at radius tau.
double projected_coefficient(const SeparableSolution& sol, const AngularEigenpair& pair, double tau);

struct HardyMargin {
  double lhs = 0.0;  // energy - kappa_s int a|x|^{-2s} w^2 + (N-2s)/(2r) int_{S_r} t^{1-2s} w^2
  double rhs = 0.0;  // (mu1 + ((N-2s)/2)^2) int t^{1-2s} w^2 / |z|^2
  double margin = 0.0;
};
HardyMargin hardy_boundary_check(const SeparableSolution& sol, const Params& p, double r);

// A function on the half-disk for N = 1 given with its polar derivatives.
struct PolarFunction {
  std::function<double(double rho, double alpha)> w, w_rho, w_alpha;
};
HardyMargin hardy_boundary_check(const PolarFunction& w, const Params& p, double r);

struct PipelineOptions {
  double R = 1.0;
  double rho_min = 1e-3;
  int n_rho = 512;
  int n_alpha = 512;
  std::vector<double> r_values;  // default: 48 log-spaced radii in [3 rho_min, R]
  std::vector<double> tau = {0.4, 0.2, 0.1, 0.05, 0.025};
  double pohozaev_radius = 0.5;
};

struct PipelineResult {
  Mu1Result angular;
  double gamma_pred = 0.0;    // -(N-2s)/2 + sqrt(((N-2s)/2)^2 + mu1)
  double bootstrap_c = 0.0;   // inner data c rho^gamma psi_1 from the coarse pass
  GridSolution solution;
  FrequencyTrace trace;
  GammaEstimate gamma;
  BlowupReport blowup;
  PohozaevResidual pohozaev;
  double min_frequency_margin = 0.0;  // min over samples of N(r) + (N-2s)/2
};

// Outer data psi_1 on |z| = R. A coarse pass with the homogeneous inner
// condition fixes c; the final pass uses Dirichlet data c rho_min^gamma psi_1.
PipelineResult halfdisk_pipeline(const Params& p, const PipelineOptions& opt = {});

}  // namespace relfrac
