#pragma once

#include <string>
#include <vector>

#include "relfrac/params.hpp"

namespace relfrac {

// g(alpha) sampled at cell centres of the finite-volume grid. For N >= 2 the
// grid covers (0, pi/2) and psi(theta) = g(alpha) Y_l(omega) with Y_l
// L2-normalized on S^{N-1}; for N = 1 it covers (-pi/2, pi/2).
struct AngularProfile {
  int N = 1;
  double s = 0.5;
  std::vector<double> alpha;
  std::vector<double> mass;  // int_cell sin^{N-1} cos^{1-2s}
  std::vector<double> g;
  double g_plus = 0.0;   // value at alpha = pi/2 (x > 0 side for N = 1)
  double g_minus = 0.0;  // N = 1: value at alpha = -pi/2

  double lo() const;
  double hi() const;
  // linear in (distance to the nearest boundary ray)^{2s} between samples
  double value_at(double a) const;
};

struct AngularEigenpair {
  int sector_l = 0;
  int k = 1;
  double mu = 0.0;
  double sigma_plus = 0.0, sigma_minus = 0.0, gamma = 0.0, bessel_nu = 0.0;
  bool admissible = true;     // mu >= -((N-2s)/2)^2
  bool extrapolated = false;  // mu from Richardson (n, 2n)
  int grid_n = 0;
  AngularProfile profile;
  double norm_certificate = 0.0;  // int theta_1^{1-2s} psi^2
  double dirichlet_energy = 0.0;  // int theta_1^{1-2s} |grad_S psi|^2
  double boundary_mass = 0.0;     // int_{S^{N-1}} a psi(0,.)^2
};

// Finite-volume assembly of one sector, independent of a. Conductances are
// exact harmonic means 1/int(1/W) and cell masses exact integrals of W, so the
// degenerate weight at alpha = pi/2 is absorbed into the coefficients.
class SectorOperator {
 public:
  SectorOperator(int N, double s, int l, int n);

  int N() const { return N_; }
  double s() const { return s_; }
  int l() const { return l_; }
  int n() const { return n_; }
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& mass() const { return mass_; }

  // Lowest `count` eigenpairs for boundary data a_minus (N=1 only), a_plus.
  std::vector<AngularEigenpair> eigenpairs(double a_minus, double a_plus, int count) const;
  std::vector<double> eigenvalues(double a_minus, double a_plus, int count) const;

  // Condensed quadratic form / weighted mass of cell values g.
  double rayleigh(const std::vector<double>& g, double a_minus, double a_plus) const;

  // Largest ratio kappa_s sum a psi(boundary)^2 / (int W|grad psi|^2 + shift int W psi^2).
  double steklov_max(double a_minus, double a_plus, double shift) const;

 private:
  void condensed(double a_minus, double a_plus, std::vector<double>& diag,
                 std::vector<double>& off) const;
  void boundary_values(const std::vector<double>& g, double a_minus, double a_plus,
                       double& gm, double& gp) const;

  int N_, l_, n_;
  double s_, kappa_;
  std::vector<double> alpha_, mass_, pot_, cond_;  // cond_[j]: face between j and j+1
  double cb_plus_ = 0.0, cb_minus_ = 0.0;         // half-cell conductances to boundary nodes
};

struct SolveOptions {
  int grid_n = 2048;
  bool richardson = true;
};

// Lowest `count` eigenpairs of sector l (N >= 2) or of the full problem (N=1,
// l ignored). Throws std::invalid_argument for unsupported potentials or a
// grid too coarse for `count`.
std::vector<AngularEigenpair> solve_sector(const Params& p, int l, int count,
                                           SolveOptions opt = {});

struct Mu1Result {
  double mu1 = 0.0;
  AngularEigenpair eigenpair;
  bool min_at_l0 = true;      // N >= 2: sector minimum found at l = 0
  bool sign_definite = true;  // ground profile has no sign change
};
Mu1Result mu1(const Params& p, SolveOptions opt = {});

// Q(psi)/int W psi^2 of samples on the grid of solve_sector(p, l, ., n).
double rayleigh_quotient(const Params& p, int l, const std::vector<double>& g, int grid_n);

// Lowest `count` eigenpairs over sectors l <= lmax (N >= 2), ordered by
// (mu, l, intra-sector index) and renumbered k = 1..count. One entry per
// sector eigenvalue; the harmonic multiplicity is not expanded. For N = 1 this
// is solve_sector(p, 0, count).
std::vector<AngularEigenpair> global_spectrum(const Params& p, int count, int lmax = 4,
                                              SolveOptions opt = {});

// Root of mu1(a0) + ((N-2s)/2)^2 over constant a0 in [a_lo, a_hi].
double sharp_constant_root(const Params& templ, double a_lo, double a_hi, SolveOptions opt = {});

// C_{a,N,s} = 1 - max Steklov ratio; requires mu1 > -((N-2s)/2)^2.
double hardy_constant(const Params& p, int grid_n = 2048);

void fill_exponents(AngularEigenpair& e, int N, double s);

// CSV with columns k,l,mu,sigma_plus,sigma_minus,nu,grid_n,extrapolated
std::string eigen_table_csv(const std::vector<AngularEigenpair>& pairs);

}  // namespace relfrac
