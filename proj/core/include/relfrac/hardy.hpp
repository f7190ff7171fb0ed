#pragma once

#include <random>
#include <vector>

namespace relfrac {

// u(x) = sum_i amp_i exp(-width_i |x - center_i|^2). Centres are used for
// N = 1 only; for N >= 2 every term is centred at the origin.
struct GaussianMixture {
  int N = 1;
  std::vector<double> amp, width, center;
};

// Terms of the inequality Lambda_{N,s} int u^2/|x|^{2s} <= int |xi|^{2s} |u^|^2
// with the unitary Fourier transform.
struct HerbstTerms {
  double kinetic = 0.0;   // int |xi|^{2s} |u^|^2
  double weighted = 0.0;  // int u^2 / |x|^{2s}
  double ratio = 0.0;     // kinetic / weighted
  double margin = 0.0;    // kinetic - Lambda_{N,s} weighted
};

// N = 1: both integrals by double-exponential quadrature (split at 0).
// N >= 2: closed-form Gamma integrals for centred mixtures. Requires N > 2s.
HerbstTerms herbst_gaussian_mixture(const GaussianMixture& u, double s);

// 2-4 terms, amplitudes in [-1, 1] (first term positive), widths in [0.2, 5],
// centres in [-2, 2] (N = 1).
GaussianMixture random_mixture(int N, std::mt19937_64& rng);

// u_eps(x) = |x|^{-(N-2s)/2 + eps} e^{-|x|}, N in {1, 3}. The transform is
// explicit and the kinetic integral is taken in theta = arctan(|xi|).
HerbstTerms herbst_near_optimizer(int N, double s, double eps);

}  // namespace relfrac
