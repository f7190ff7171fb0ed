#pragma once

#include <string>
#include <vector>

#include "relfrac/params.hpp"
#include "relfrac/spectral_field.hpp"

namespace relfrac {

// Multiply coefficients by (|xi|^2 + m^2)^s.
SpectralField apply_symbol(const SpectralField& u, double s, double m);

// Same operator through the singular-integral representation
//   c_{1,s} m^nu PV int (u(x) - u(y)) |x-y|^{-nu} K_nu(m|x-y|) dy + m^{2s} u(x),
// nu = (1+2s)/2, for dim 1 and m > 0. Pairs z = |x-y| >= eps are summed on the
// grid with Gregory end corrections, eps = round(cutoff/h) h; the ball z < eps
// uses the Taylor expansion 2u(x) - u(x+z) - u(x-z) = -u'' z^2 - u'''' z^4/12
// with moments int_0^eps z^p k(z) dz from double-exponential quadrature and
// derivatives from centred finite differences. Periodic images are summed up
// to z = 45/m. Throws std::invalid_argument unless 0 < cutoff < 10 h and
// cutoff/h rounds to at least 1.
SpectralField apply_kernel_pv(const SpectralField& u, double s, double m, double cutoff);

// Default cutoff for apply_kernel_pv: 2 grid spacings.
double default_pv_cutoff(const SpectralField& u);

// P_m(t, x) samples. For N = 1 offsets are signed x; for N >= 2 they are radii
// |x| and weights carry the |S^{N-1}| r^{N-1} Jacobian.
struct KernelSample {
  int N = 1;
  double t = 0.0;
  std::vector<double> offsets;
  std::vector<double> weights;
  std::vector<double> values;

  double integral() const;
};

// P_m(t,x) = C'_{N,s} t^{2s} m^{(N+2s)/2} |z|^{-(N+2s)/2} K_{(N+2s)/2}(m|z|),
// |z| = sqrt(t^2 + |x|^2). Weights are trapezoid weights for the given
// (sorted, uniformly spaced) offsets, or zero when the spacing is not uniform.
KernelSample kernel_eval(const Params& p, double t, const std::vector<double>& offsets);
// Conjugate kernel: s replaced by 1-s in the exponents and in C'.
KernelSample conjugate_kernel_eval(const Params& p, double t, const std::vector<double>& offsets);

// Kernel on nodes x = t sinh(y) (N = 1) or r = t sinh(y) (N >= 2) with
// trapezoid weights in y; integral() converges to theta_s(mt).
KernelSample kernel_quadrature(const Params& p, double t, bool conjugate = false, double step = 0.02);

// CSV with columns t,x,P_m.
std::string kernel_csv(const std::vector<KernelSample>& samples);

// w(t_j,.) with coefficients c(xi) theta_s(sqrt(|xi|^2+m^2) t_j).
std::vector<SpectralField> extend(const SpectralField& u, const Params& p, const std::vector<double>& t_levels);

// Coefficients kappa_s (|xi|^2+m^2)^s c(xi).
SpectralField neumann_trace(const SpectralField& u, const Params& p);

// Finite-t check of the Neumann trace. For each mode with lambda =
// sqrt(|xi|^2+m^2) > 0 the quantity -t^{1-2s} d/dt theta(lambda t) is sampled
// at lambda t in {1e-2, 1e-3, 1e-4} and extrapolated with the basis
// {1, (lambda t)^{2-2s}, (lambda t)^2}.
struct TraceCheck {
  double max_rel_error = 0.0;  // over modes, relative to kappa_s lambda^{2s}
  double worst_lambda = 0.0;
  int modes_checked = 0;
};
TraceCheck neumann_trace_check(const SpectralField& u, const Params& p);

// Convolution of u with P_m(t,.) through kernel_quadrature and periodic linear
// interpolation of the samples (dim 1).
SpectralField kernel_convolve(const SpectralField& u, const Params& p, double t, double step = 0.02);

struct DirichletFormResult {
  double lhs = 0.0;  // sum ((xi^2+m^2)^s - m^{2s}) |u^|^2
  double rhs = 0.0;  // (c_{N,s}/2) m^nu double integral of the kernel form
  double rel_gap = 0.0;
};
// dim 1, m > 0. Throws std::invalid_argument if |u| at the box edge exceeds
// 1e-12 max|u|.
DirichletFormResult dirichlet_form_identity(const SpectralField& u, const Params& p);

struct KernelLimitReport {
  std::vector<double> t;
  std::vector<double> sup_error;  // max_j |P_m(t,.)*u - u| on the grid
  double fitted_rate = 0.0;       // slope of log error vs log t
  bool decreasing = true;
};
KernelLimitReport pointwise_kernel_limit(const SpectralField& u, const Params& p, const std::vector<double>& t_seq);

// kappa_s ||u||^2_{H^s_m} against the weighted energy
// int_0^inf int t^{1-2s} (|w_t|^2 + |grad w|^2 + m^2 w^2) of the extension,
// optionally perturbed to w + eps t e^{-t} u (same trace). Mode-wise
// double-exponential quadrature in t.
struct TraceEnergy {
  double trace_side = 0.0;
  double extension_energy = 0.0;
  double rel_gap = 0.0;
};
TraceEnergy trace_energy(const SpectralField& u, const Params& p, double perturbation = 0.0);

}  // namespace relfrac
