#include "relfrac/halfdisk.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "relfrac/angular.hpp"
#include "relfrac/quadrature.hpp"
#include "relfrac/specfun.hpp"

namespace relfrac {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// int_a^b r^k dr
double power_integral(double a, double b, double k) {
  if (std::abs(k + 1.0) < 1e-14) return std::log(b / a);
  return (std::pow(b, k + 1.0) - std::pow(a, k + 1.0)) / (k + 1.0);
}

PolarGrid build_grid(double s, double m, double R, double rho_min, int n_rho, int n_alpha) {
  if (!(rho_min > 0.0 && rho_min < R)) throw std::invalid_argument("polar grid: need 0 < rho_min < R");
  if (n_rho < 2) throw std::invalid_argument("polar grid: need at least 2 radial intervals");
  if (n_alpha < 8) throw std::invalid_argument("polar grid: need at least 8 angular cells");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("polar grid: s must lie in (0,1)");
  const double q = std::pow(R / rho_min, 1.0 / n_rho);
  if (!(q > 1.0 && q <= 1.1 + 1e-12)) throw std::invalid_argument("polar grid: ratio must lie in (1, 1.1]");
  PolarGrid g;
  g.s = s;
  g.m = m;
  g.R = R;
  g.rho_min = rho_min;
  g.q = q;
  g.rho.resize(n_rho + 1);
  for (int i = 0; i <= n_rho; ++i) g.rho[i] = rho_min * std::pow(q, i);
  g.rho.back() = R;
  const double h = 2.0 * kHalfPi / n_alpha;
  g.alpha.assign(n_alpha + 2, 0.0);
  g.alpha_mass.assign(n_alpha + 2, 0.0);
  g.alpha.front() = -kHalfPi;
  g.alpha.back() = kHalfPi;
  for (int j = 1; j <= n_alpha; ++j) {
    const double a = -kHalfPi + (j - 1) * h, b = a + h;
    g.alpha[j] = 0.5 * (a + b);
    g.alpha_mass[j] = integrate_sin_cos_power(a, b, 0.0, 1.0 - 2.0 * s);
  }
  g.rho_mass.resize(n_rho + 1);
  for (int i = 0; i <= n_rho; ++i) {
    const double lo = i == 0 ? g.rho[0] : std::sqrt(g.rho[i - 1] * g.rho[i]);
    const double hi = i == n_rho ? g.rho[i] : std::sqrt(g.rho[i] * g.rho[i + 1]);
    g.rho_mass[i] = power_integral(lo, hi, 2.0 - 2.0 * s);
  }
  return g;
}

SpMat assemble(const Params& p, const PolarGrid& g) {
  const double s = g.s, kap = kappa(s);
  const int M = g.n_rho() - 1, n = g.n_alpha(), C = g.columns();
  const double am = p.potential.a_side(-1), ap = p.potential.a_side(+1);
  const bool has_h = p.potential.h_kind == PotentialSpec::HKind::power;
  const double ch = has_h ? p.potential.c_h : 0.0, chi = p.potential.chi;

  std::vector<double> face_alpha(n + 1);  // between columns j and j+1
  for (int j = 0; j <= n; ++j)
    face_alpha[j] = 1.0 / integrate_sin_cos_power(g.alpha[j], g.alpha[j + 1], 0.0, 2.0 * s - 1.0);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(M + 1) * C * 5);
  auto idx = [C](int i, int j) { return i * C + j; };
  auto link = [&](int a, int b, double c) {
    trip.emplace_back(a, a, c);
    trip.emplace_back(b, b, c);
    trip.emplace_back(a, b, -c);
    trip.emplace_back(b, a, -c);
  };
  for (int i = 0; i <= M; ++i) {
    const double lo = i == 0 ? g.rho[0] : std::sqrt(g.rho[i - 1] * g.rho[i]);
    const double hi = i == M ? g.rho[i] : std::sqrt(g.rho[i] * g.rho[i + 1]);
    const double r_ang = power_integral(lo, hi, -2.0 * s);
    for (int j = 0; j <= n; ++j) link(idx(i, j), idx(i, j + 1), r_ang * face_alpha[j]);
    if (g.m > 0.0)
      for (int j = 1; j <= n; ++j) trip.emplace_back(idx(i, j), idx(i, j), g.m * g.m * g.rho_mass[i] * g.alpha_mass[j]);
    const double rh = has_h ? power_integral(lo, hi, -2.0 * s + chi) : 0.0;
    trip.emplace_back(idx(i, 0), idx(i, 0), -kap * (am * r_ang + ch * rh));
    trip.emplace_back(idx(i, n + 1), idx(i, n + 1), -kap * (ap * r_ang + ch * rh));
    if (i < M) {
      const double r_face = 1.0 / power_integral(g.rho[i], g.rho[i + 1], 2.0 * s - 2.0);
      for (int j = 1; j <= n; ++j) link(idx(i, j), idx(i + 1, j), g.alpha_mass[j] * r_face);
    }
  }
  SpMat K((M + 1) * C, (M + 1) * C);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

void check_admissible(const Params& p) {
  p.validate();
  if (p.N != 1) throw std::invalid_argument("half-disk solver: unsupported dimension (N must be 1)");
  if (!(p.N > 2.0 * p.s)) throw std::invalid_argument("half-disk solver requires N > 2s");
  SolveOptions opt;
  opt.grid_n = 512;
  const Mu1Result r = mu1(p, opt);
  const double gap = p.half_gap();
  if (!(r.mu1 > -gap * gap)) throw std::invalid_argument("inadmissible a: mu1(a) <= -((N-2s)/2)^2");
  if (p.potential.h_kind == PotentialSpec::HKind::power) {
    const double gamma = r.eigenpair.sigma_plus;
    if (!(2.0 * gamma - 2.0 * p.s + p.potential.chi > -1.0))
      throw std::invalid_argument("h singularity not integrable against w^2 (2 gamma - 2s + chi <= -1)");
  }
}

}  // namespace

PolarGrid make_polar_grid(double s, double m, double R, double rho_min, int n_rho, int n_alpha) {
  return build_grid(s, m, R, rho_min, n_rho, n_alpha);
}

PolarGrid make_polar_grid_ratio(double s, double m, double R, double rho_min, double q, int n_alpha) {
  if (!(q > 1.0 && q <= 1.1)) throw std::invalid_argument("polar grid: ratio must lie in (1, 1.1]");
  if (!(rho_min > 0.0 && rho_min < R)) throw std::invalid_argument("polar grid: need 0 < rho_min < R");
  const int n_rho = std::max(2, static_cast<int>(std::ceil(std::log(R / rho_min) / std::log(q) - 1e-9)));
  return build_grid(s, m, R, rho_min, n_rho, n_alpha);
}

double GridSolution::value_at(double rho, double alpha) const {
  const auto& r = grid.rho;
  const auto& a = grid.alpha;
  rho = std::clamp(rho, r.front(), r.back());
  alpha = std::clamp(alpha, a.front(), a.back());
  int i = static_cast<int>(std::log(rho / r.front()) / std::log(grid.q));
  i = std::clamp(i, 0, static_cast<int>(r.size()) - 2);
  while (i > 0 && rho < r[i]) --i;
  while (i + 2 < static_cast<int>(r.size()) && rho > r[i + 1]) ++i;
  const int j = std::clamp(static_cast<int>(std::upper_bound(a.begin(), a.end(), alpha) - a.begin()) - 1, 0,
                           static_cast<int>(a.size()) - 2);
  const double u = std::log(rho / r[i]) / std::log(r[i + 1] / r[i]);
  const double v = (alpha - a[j]) / (a[j + 1] - a[j]);
  return (1 - u) * ((1 - v) * at(i, j) + v * at(i, j + 1)) + u * ((1 - v) * at(i + 1, j) + v * at(i + 1, j + 1));
}

std::string GridSolution::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17) << "rho,alpha,w\n";
  for (int i = 0; i < grid.n_rho(); ++i)
    for (int j = 0; j < grid.columns(); ++j) os << grid.rho[i] << ',' << grid.alpha[j] << ',' << at(i, j) << '\n';
  return os.str();
}

GridSolution solve_halfdisk(const Params& p, const PolarGrid& grid, const BoundaryData& bc) {
  check_admissible(p);
  if (std::abs(grid.s - p.s) > 0.0 || std::abs(grid.m - p.m) > 0.0)
    throw std::invalid_argument("half-disk solver: grid built for different s or m");
  if (!bc.outer) throw std::invalid_argument("half-disk solver: outer data missing");
  const bool homogeneous = bc.inner.kind == InnerCondition::Kind::homogeneous;
  if (!homogeneous && !bc.inner.data) throw std::invalid_argument("half-disk solver: inner data missing");

  const int M = grid.n_rho() - 1, C = grid.columns();
  const int total = (M + 1) * C;
  const SpMat K = assemble(p, grid);

  // full vector = P wU + wD, plus the slaved inner row for the homogeneous case
  Vec wD = Vec::Zero(total);
  for (int j = 0; j < C; ++j) {
    wD[M * C + j] = bc.outer(grid.alpha[j]);
    if (!homogeneous) wD[j] = bc.inner.data(grid.alpha[j]);
  }
  const int nU = (M - 1) * C;
  std::vector<Eigen::Triplet<double>> pt;
  for (int k = 0; k < nU; ++k) pt.emplace_back(C + k, k, 1.0);
  SpMat P(total, nU);
  P.setFromTriplets(pt.begin(), pt.end());
  SpMat A = SpMat(P.transpose() * K * P);
  const double lam = homogeneous ? std::pow(grid.rho[0] / grid.rho[1], bc.inner.gamma) : 0.0;
  if (homogeneous) {
    // w(rho_0) = lam w(rho_1) substituted into the rho_1 equations; the
    // coupling is radial only, so the change is diagonal
    for (int j = 0; j < C; ++j) A.coeffRef(j, j) += lam * K.coeff(C + j, j);
  }
  const Vec f = -(P.transpose() * (K * wD));

  GridSolution sol;
  sol.grid = grid;
  sol.boundary_data_source = bc.source;
  const double fn = std::max(f.norm(), 1e-300);
  Vec x;
  auto refine = [&](auto& solver) {
    x = solver.solve(f);
    sol.residual_history.push_back((A * x - f).norm() / fn);
    for (int it = 0; it < 3 && sol.residual_history.back() > 1e-12; ++it) {
      x += solver.solve(f - A * x);
      sol.residual_history.push_back((A * x - f).norm() / fn);
    }
  };
  {
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() == Eigen::Success) refine(ldlt);
  }
  if (sol.residual_history.empty() || !(sol.residual_history.back() <= 1e-10)) {
    sol.used_fallback = true;
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() == Eigen::Success) refine(lu);
  }
  sol.residual_norm = sol.residual_history.empty() ? INFINITY : sol.residual_history.back();
  if (!(sol.residual_norm <= 1e-10)) {
    std::ostringstream os;
    os << "half-disk solve did not reach residual 1e-10; history:";
    for (double r : sol.residual_history) os << ' ' << r;
    throw std::runtime_error(os.str());
  }
  Vec w = P * x + wD;
  if (homogeneous)
    for (int j = 0; j < C; ++j) w[j] = lam * w[C + j];
  for (int k = 0; k < total; ++k)
    if (!std::isfinite(w[k])) throw std::runtime_error("half-disk solve produced non-finite values");
  sol.values.assign(w.data(), w.data() + total);
  const Vec Kw = K * w;
  sol.energy = w.dot(Kw);
  double pair = 0.0;
  for (int j = 0; j < C; ++j) {
    pair += w[M * C + j] * Kw[M * C + j] + w[j] * Kw[j];
  }
  sol.flux_pairing = pair;
  return sol;
}

AnnulusIntegrals annulus_integrals(const Params& p, const GridSolution& sol, int k) {
  const PolarGrid& g = sol.grid;
  if (k < 0 || k >= g.n_rho()) throw std::invalid_argument("annulus_integrals: row index out of range");
  const double s = g.s;
  const int n = g.n_alpha();
  const bool has_h = p.potential.h_kind == PotentialSpec::HKind::power;
  const double ch = has_h ? p.potential.c_h : 0.0, chi = p.potential.chi;
  const double am = p.potential.a_side(-1), ap = p.potential.a_side(+1);
  std::vector<double> face_alpha(n + 1);
  for (int j = 0; j <= n; ++j)
    face_alpha[j] = 1.0 / integrate_sin_cos_power(g.alpha[j], g.alpha[j + 1], 0.0, 2.0 * s - 1.0);
  AnnulusIntegrals out;
  for (int i = 0; i <= k; ++i) {
    const double lo = i == 0 ? g.rho[0] : std::sqrt(g.rho[i - 1] * g.rho[i]);
    const double hi = i == k ? g.rho[i] : std::sqrt(g.rho[i] * g.rho[i + 1]);
    const double r_ang = power_integral(lo, hi, -2.0 * s);
    const double r_mass = power_integral(lo, hi, 2.0 - 2.0 * s);
    for (int j = 0; j <= n; ++j) {
      const double d = sol.at(i, j + 1) - sol.at(i, j);
      out.gradient += r_ang * face_alpha[j] * d * d;
    }
    for (int j = 1; j <= n; ++j) out.mass += r_mass * g.alpha_mass[j] * sol.at(i, j) * sol.at(i, j);
    const double wm = sol.at(i, 0), wp = sol.at(i, n + 1);
    out.boundary_a += r_ang * (am * wm * wm + ap * wp * wp);
    if (has_h) out.boundary_h += ch * power_integral(lo, hi, -2.0 * s + chi) * (wm * wm + wp * wp);
    if (i < k) {
      const double r_face = 1.0 / power_integral(g.rho[i], g.rho[i + 1], 2.0 * s - 2.0);
      for (int j = 1; j <= n; ++j) {
        const double d = sol.at(i + 1, j) - sol.at(i, j);
        out.gradient += g.alpha_mass[j] * r_face * d * d;
      }
    }
  }
  return out;
}

ArcIntegrals arc_integrals(const GridSolution& sol, int k) {
  const PolarGrid& g = sol.grid;
  const int M = g.n_rho() - 1, n = g.n_alpha();
  if (k < 0 || k > M) throw std::invalid_argument("arc_integrals: row index out of range");
  // three-point derivative weights on the nodes (i0, i0+1, i0+2) at rho[k]
  const int i0 = std::clamp(k - 1, 0, M - 2);
  const double x0 = g.rho[i0], x1 = g.rho[i0 + 1], x2 = g.rho[i0 + 2], x = g.rho[k];
  const double c0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
  const double c1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
  const double c2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
  ArcIntegrals out;
  for (int j = 1; j <= n; ++j) {
    const double w = sol.at(k, j);
    const double dr = c0 * sol.at(i0, j) + c1 * sol.at(i0 + 1, j) + c2 * sol.at(i0 + 2, j);
    out.w2 += g.alpha_mass[j] * w * w;
    out.w_dr += g.alpha_mass[j] * w * dr;
    out.dr2 += g.alpha_mass[j] * dr * dr;
  }
  for (int j = 0; j <= n; ++j) {
    const double d = sol.at(k, j + 1) - sol.at(k, j);
    out.dalpha2 += d * d / integrate_sin_cos_power(g.alpha[j], g.alpha[j + 1], 0.0, 2.0 * g.s - 1.0);
  }
  return out;
}

double oracle_error(const GridSolution& sol, const std::function<double(double, double)>& oracle, double rho_from) {
  double e = 0.0, mx = 0.0;
  const auto& g = sol.grid;
  for (int i = 0; i < g.n_rho(); ++i) {
    if (g.rho[i] < rho_from) continue;
    for (int j = 0; j < g.columns(); ++j) {
      const double o = oracle(g.rho[i], g.alpha[j]);
      e = std::max(e, std::abs(sol.at(i, j) - o));
      mx = std::max(mx, std::abs(o));
    }
  }
  return mx > 0.0 ? e / mx : e;
}

RefineStudy refine_study(const Params& p, double R, double rho_min, int n_rho, int n_alpha, const BoundaryData& bc,
                         const std::function<double(double, double)>& oracle) {
  RefineStudy st;
  std::vector<GridSolution> sols;
  for (int k = 0; k < 3; ++k) {
    const int f = 1 << k;
    const PolarGrid g = make_polar_grid(p.s, p.m, R, rho_min, n_rho * f, n_alpha * f);
    sols.push_back(solve_halfdisk(p, g, bc));
    st.n_alpha.push_back(n_alpha * f);
  }
  if (oracle) {
    for (const auto& s : sols) st.error.push_back(oracle_error(s, oracle));
  } else {
    for (int k = 0; k < 2; ++k) {
      double d = 0.0;
      const auto& g = sols[k].grid;
      for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.columns(); ++j)
          d = std::max(d, std::abs(sols[k].at(i, j) - sols[k + 1].value_at(g.rho[i], g.alpha[j])));
      st.error.push_back(d);
    }
  }
  for (std::size_t k = 1; k < st.error.size(); ++k)
    if (!(st.error[k] < st.error[k - 1])) st.monotone = false;
  const std::size_t last = st.error.size() - 1;
  if (st.error[last] > 0.0 && st.error[0] > 0.0)
    st.observed_order = std::log2(st.error[0] / st.error[last]) / static_cast<double>(last);
  return st;
}

}  // namespace relfrac
