#pragma once

#include <functional>
#include <string>
#include <vector>

#include "relfrac/params.hpp"

namespace relfrac {

// Polar grid on the half-disk {rho_min < rho < R, -pi/2 < alpha < pi/2} for
// N = 1, where t = rho cos(alpha) and x = rho sin(alpha). Radial nodes are
// geometric; angular unknowns sit at uniform cell centres plus one node on
// each boundary ray alpha = -pi/2 (x < 0) and alpha = +pi/2 (x > 0).
struct PolarGrid {
  double s = 0.5, m = 0.0, R = 1.0, rho_min = 1e-3, q = 1.03;
  std::vector<double> rho;    // rho[0] = rho_min, rho.back() = R
  std::vector<double> alpha;  // n_alpha + 2 entries: -pi/2, cell centres, +pi/2
  std::vector<double> alpha_mass;  // int_cell cos^{1-2s}, zero on the rays
  std::vector<double> rho_mass;    // int_dual rho^{2-2s}, per radial node

  int n_rho() const { return static_cast<int>(rho.size()); }
  int n_alpha() const { return static_cast<int>(alpha.size()) - 2; }
  int columns() const { return static_cast<int>(alpha.size()); }
};

// n_rho intervals between rho_min and R (ratio (R/rho_min)^{1/n_rho}) and
// n_alpha cells. Throws std::invalid_argument unless 0 < rho_min < R,
// ratio in (1, 1.1] and n_alpha >= 8.
PolarGrid make_polar_grid(double s, double m, double R, double rho_min, int n_rho, int n_alpha);
// Same with a requested ratio; the interval count is rounded up.
PolarGrid make_polar_grid_ratio(double s, double m, double R, double rho_min, double q, int n_alpha);

// Inner arc condition: Dirichlet data, or w(rho_0) = (rho_0/rho_1)^gamma w(rho_1)
// substituted into the first interior ring (homogeneous extrapolation).
struct InnerCondition {
  enum class Kind { dirichlet, homogeneous };
  Kind kind = Kind::dirichlet;
  std::function<double(double alpha)> data;
  double gamma = 0.0;
};

struct BoundaryData {
  std::function<double(double alpha)> outer;  // w(R, alpha)
  InnerCondition inner;
  std::string source = "user";
};

struct GridSolution {
  PolarGrid grid;
  std::vector<double> values;  // row-major, rho index major, grid.columns() per row
  std::string boundary_data_source;
  double residual_norm = 0.0;         // ||K_UU w_U - f|| / ||f||
  std::vector<double> residual_history;  // after the direct solve and each refinement step
  double energy = 0.0;                // discrete quadratic form of w
  double flux_pairing = 0.0;          // sum over both arcs of w (K w)
  bool used_fallback = false;         // LU instead of LDLT

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.columns() + j]; }
  // bilinear in (log rho, alpha) on the node set
  double value_at(double rho, double alpha) const;
  // CSV with columns rho,alpha,w
  std::string to_csv() const;
};

// Conservative finite volumes for
//   (1/rho) d_rho(rho^{2-2s} c d_rho w) + rho^{-2s} d_alpha(c d_alpha w) = m^2 rho^{1-2s} c w,
// c = cos^{1-2s}(alpha), with the boundary energy -kappa_s int (a_+- rho^{-2s} + h(rho)) w^2
// on the rays. Radial conductances are exact in rho, angular ones exact in
// alpha. The linear system is solved with a sparse LDLT (LU fallback) and
// iterative refinement to residual <= 1e-10.
// Throws std::invalid_argument for N != 1, N <= 2s, inadmissible a, or
// 2 gamma - 2s + chi <= -1; std::runtime_error when the residual target is
// missed (message carries the residual history).
GridSolution solve_halfdisk(const Params& p, const PolarGrid& grid, const BoundaryData& bc);

struct RefineStudy {
  std::vector<int> n_alpha;
  std::vector<double> error;  // vs oracle, or Cauchy differences to the next grid
  double observed_order = 0.0;
  bool monotone = true;
};

// Three nested grids (n_rho, n_alpha) x {1, 2, 4}. With an oracle, error is
// the max nodal error relative to max |oracle|; without, error[k] is the max
// difference between grid k and grid k+1 on grid k's nodes (two entries).
RefineStudy refine_study(const Params& p, double R, double rho_min, int n_rho, int n_alpha,
                         const BoundaryData& bc,
                         const std::function<double(double rho, double alpha)>& oracle = nullptr);

// Integrals of the sampled solution over the annulus rho_min < rho < rho[k],
// taken with the coefficients of the finite-volume form (row k contributes the
// inner half of its dual cell).
struct AnnulusIntegrals {
  double gradient = 0.0;    // int t^{1-2s} |grad w|^2
  double mass = 0.0;        // int t^{1-2s} w^2
  double boundary_a = 0.0;  // int a(x/|x|) |x|^{-2s} w^2 over rho_min < |x| < rho[k]
  double boundary_h = 0.0;  // int h w^2 over the same set
};
AnnulusIntegrals annulus_integrals(const Params& p, const GridSolution& sol, int k);

// Angular integrals on the arc rho = rho[k] with weight cos^{1-2s}(alpha).
// d_rho w uses three-point differences (one-sided on the first and last row).
struct ArcIntegrals {
  double w2 = 0.0;         // int c w^2
  double w_dr = 0.0;       // int c w d_rho w
  double dr2 = 0.0;        // int c (d_rho w)^2
  double dalpha2 = 0.0;    // int c (d_alpha w)^2, exact harmonic face weights
};
ArcIntegrals arc_integrals(const GridSolution& sol, int k);

// Max nodal error against an oracle relative to max |oracle| over nodes with
// rho >= rho_from.
double oracle_error(const GridSolution& sol, const std::function<double(double, double)>& oracle,
                    double rho_from = 0.0);

}  // namespace relfrac
