#include "relfrac/extension.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "relfrac/quadrature.hpp"
#include "relfrac/specfun.hpp"

namespace relfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Centred periodic stencils (offsets -4..4); orders 8, 6, 8, 6.
constexpr double kD2[9] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                           8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
constexpr double kD4[9] = {7.0 / 240, -2.0 / 5, 169.0 / 60, -122.0 / 15, 91.0 / 8,
                           -122.0 / 15, 169.0 / 60, -2.0 / 5, 7.0 / 240};
constexpr double kD1[9] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                           4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
constexpr double kD3[9] = {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0.0,
                           -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};

double stencil(const std::vector<double>& u, int i, const double (&c)[9]) {
  const int n = static_cast<int>(u.size());
  double acc = 0.0;
  for (int q = -4; q <= 4; ++q) acc += c[q + 4] * u[((i + q) % n + n) % n];
  return acc;
}

// Periodic 6-point Lagrange interpolation at x (grid x_j = x0 + j h).
double interp6(const std::vector<double>& u, double x0, double h, double x) {
  const int n = static_cast<int>(u.size());
  const double pos = (x - x0) / h;
  const double fl = std::floor(pos);
  const double f = pos - fl;
  const long base = static_cast<long>(fl);
  if (f == 0.0) return u[((base % n) + n) % n];
  double acc = 0.0;
  for (int a = -2; a <= 3; ++a) {
    double w = 1.0;
    for (int b = -2; b <= 3; ++b)
      if (b != a) w *= (f - b) / static_cast<double>(a - b);
    acc += w * u[(((base + a) % n) + n) % n];
  }
  return acc;
}

void require_order(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("order s must lie in (0,1)");
}

void require_dim1(const SpectralField& u, const char* what) {
  if (u.dim() != 1) throw std::invalid_argument(std::string(what) + ": unsupported for dim 2");
}

// One-dimensional kernel k(z) = c_{1,s} m^nu z^{-nu} K_nu(m z), nu = (1+2s)/2.
struct LineKernel {
  double c, m, nu;
  LineKernel(double s, double m_) : c(constants(1, s).c_Ns), m(m_), nu(0.5 + s) {}
  double operator()(double z) const {
    const double mz = m * z;
    if (mz > 700.0) return 0.0;
    return c * std::pow(m, nu) * std::pow(z, -nu) * bessel_k(nu, mz);
  }
  double moment(int p, double eps) const {
    // z^{p-nu} K_nu(m z) ~ z^{p-1-2s}; the piece below 1e-100 is negligible
    auto f = [this, p](double z) {
      if (z < 1e-100) return 0.0;
      return c * std::pow(m, nu) * std::pow(z, p - nu) * bessel_k(nu, m * z);
    };
    return integrate_de(f, 0.0, eps).value;
  }
};

// h-weighted sum over j = J..Jmax of g(j) approximating int_{Jh}^inf, with
// Gregory corrections at the left end.
template <class G>
double gregory_tail(G g, int J, int Jmax, double h) {
  double f[5];
  for (int q = 0; q < 5; ++q) f[q] = g(J + q);
  double acc = 0.5 * f[0];
  for (int q = 1; q < 5; ++q) acc += f[q];
  for (int j = J + 5; j <= Jmax; ++j) acc += g(j);
  const double d1 = f[1] - f[0];
  const double d2 = f[2] - 2 * f[1] + f[0];
  const double d3 = f[3] - 3 * f[2] + 3 * f[1] - f[0];
  const double d4 = f[4] - 4 * f[3] + 6 * f[2] - 4 * f[1] + f[0];
  acc += d1 / 12.0 - d2 / 24.0 + 19.0 * d3 / 720.0 - 3.0 * d4 / 160.0;
  return h * acc;
}

struct PvSetup {
  int J, Jmax;
  double eps;
  std::vector<double> k;  // k[j] = kernel at j h, j <= Jmax
};

PvSetup pv_setup(const SpectralField& u, const LineKernel& ker, double cutoff) {
  const double h = u.spacing();
  if (!(cutoff > 0.0 && cutoff < 10.0 * h))
    throw std::invalid_argument("pv cutoff must lie in (0, 10 h)");
  PvSetup st;
  st.J = static_cast<int>(std::lround(cutoff / h));
  if (st.J < 1) throw std::invalid_argument("pv cutoff rounds to zero grid spacings");
  st.eps = st.J * h;
  st.Jmax = std::max(st.J + 8, static_cast<int>(std::ceil(45.0 / (ker.m * h))));
  st.k.assign(st.Jmax + 1, 0.0);
  for (int j = st.J; j <= st.Jmax; ++j) st.k[j] = ker(j * h);
  return st;
}

double theta_scaled_flux(double s, double tau) {
  // -tau^{1-2s} theta'(tau)
  return -std::pow(tau, 1.0 - 2.0 * s) * theta_profile_deriv(s, tau);
}

KernelSample kernel_eval_impl(const Params& p, double t, const std::vector<double>& offsets, bool conj) {
  p.validate(false);
  if (!(t > 0.0)) throw std::invalid_argument("kernel: t must be positive");
  if (!(p.m > 0.0)) throw std::invalid_argument("kernel: m must be positive");
  const double se = conj ? 1.0 - p.s : p.s;
  const double nu = 0.5 * (p.N + 2.0 * se);
  const double Cp = bessel_kernel_constant(p.N, se);
  KernelSample ks;
  ks.N = p.N;
  ks.t = t;
  ks.offsets = offsets;
  ks.values.resize(offsets.size());
  const double pref = Cp * std::pow(t, 2.0 * se) * std::pow(p.m, 2.0 * nu);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double mz = p.m * std::hypot(t, offsets[i]);
    ks.values[i] = mz > 700.0 ? 0.0 : pref * std::pow(mz, -nu) * bessel_k(nu, mz);
  }
  ks.weights.assign(offsets.size(), 0.0);
  if (offsets.size() >= 2) {
    const double d = offsets[1] - offsets[0];
    bool uniform = d > 0.0;
    for (std::size_t i = 1; i < offsets.size() && uniform; ++i)
      uniform = std::abs(offsets[i] - offsets[i - 1] - d) <= 1e-9 * d;
    if (uniform) {
      for (std::size_t i = 0; i < offsets.size(); ++i) {
        double w = (i == 0 || i + 1 == offsets.size()) ? 0.5 * d : d;
        if (p.N >= 2) w *= sphere_area(p.N) * std::pow(offsets[i], p.N - 1);
        ks.weights[i] = w;
      }
    }
  }
  return ks;
}

}  // namespace

SpectralField apply_symbol(const SpectralField& u, double s, double m) {
  require_order(s);
  if (!(m >= 0.0)) throw std::invalid_argument("mass must be >= 0");
  return u.map_modes([s, m](double x2) {
    const double l2 = x2 + m * m;
    return l2 > 0.0 ? std::pow(l2, s) : 0.0;
  });
}

double default_pv_cutoff(const SpectralField& u) { return 2.0 * u.spacing(); }

SpectralField apply_kernel_pv(const SpectralField& u, double s, double m, double cutoff) {
  require_order(s);
  require_dim1(u, "apply_kernel_pv");
  if (!(m > 0.0)) throw std::invalid_argument("apply_kernel_pv requires m > 0");
  const LineKernel ker(s, m);
  const PvSetup st = pv_setup(u, ker, cutoff);
  const double h = u.spacing();
  const double M2 = ker.moment(2, st.eps), M4 = ker.moment(4, st.eps);
  const auto& v = u.values();
  const int n = static_cast<int>(v.size());
  const double m2s = std::pow(m, 2.0 * s);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    auto g = [&](int j) { return (2.0 * v[i] - v[(i + j) % n] - v[((i - j) % n + n) % n]) * st.k[j]; };
    const double outer = gregory_tail(g, st.J, st.Jmax, h);
    const double d2 = stencil(v, i, kD2) / (h * h);
    const double d4 = stencil(v, i, kD4) / (h * h * h * h);
    out[i] = outer - d2 * M2 - d4 * M4 / 12.0 + m2s * v[i];
  }
  return SpectralField::from_values(1, u.box_length(), u.grid_n(), std::move(out));
}

double KernelSample::integral() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
  return acc;
}

KernelSample kernel_eval(const Params& p, double t, const std::vector<double>& offsets) {
  return kernel_eval_impl(p, t, offsets, false);
}

KernelSample conjugate_kernel_eval(const Params& p, double t, const std::vector<double>& offsets) {
  return kernel_eval_impl(p, t, offsets, true);
}

KernelSample kernel_quadrature(const Params& p, double t, bool conjugate, double step) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel: t must be positive");
  if (!(p.m > 0.0)) throw std::invalid_argument("kernel: m must be positive");
  if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("kernel_quadrature: step must lie in (0, 0.5]");
  std::vector<double> nodes, jac;
  const double X = 50.0 / p.m;
  if (p.N == 1) {
    const int K = static_cast<int>(std::ceil(std::asinh(X / t) / step));
    for (int q = -K; q <= K; ++q) {
      const double y = q * step;
      nodes.push_back(t * std::sinh(y));
      jac.push_back(step * t * std::cosh(y));
    }
  } else {
    // r = t e^y; the integrand carries r^N and decays at both ends
    const int Klo = static_cast<int>(std::ceil(40.0 / p.N / step));
    const int Khi = static_cast<int>(std::ceil(std::log(X / t) / step));
    for (int q = -Klo; q <= Khi; ++q) {
      const double r = t * std::exp(q * step);
      nodes.push_back(r);
      jac.push_back(step * r * sphere_area(p.N) * std::pow(r, p.N - 1));
    }
  }
  KernelSample ks = kernel_eval_impl(p, t, nodes, conjugate);
  ks.weights = std::move(jac);
  return ks;
}

std::string kernel_csv(const std::vector<KernelSample>& samples) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,x,P_m\n";
  for (const auto& ks : samples)
    for (std::size_t i = 0; i < ks.values.size(); ++i) os << ks.t << ',' << ks.offsets[i] << ',' << ks.values[i] << '\n';
  return os.str();
}

std::vector<SpectralField> extend(const SpectralField& u, const Params& p, const std::vector<double>& t_levels) {
  p.validate(false);
  if (!std::is_sorted(t_levels.begin(), t_levels.end())) throw std::invalid_argument("extend: t_levels must be sorted");
  std::vector<SpectralField> out;
  out.reserve(t_levels.size());
  for (double t : t_levels) {
    if (!(t >= 0.0)) throw std::invalid_argument("extend: t must be >= 0");
    if (t == 0.0) {
      out.push_back(u);
      continue;
    }
    out.push_back(u.map_modes([&](double x2) { return theta_profile(p.s, std::sqrt(x2 + p.m * p.m) * t); }));
  }
  return out;
}

SpectralField neumann_trace(const SpectralField& u, const Params& p) {
  p.validate(false);
  const double k = kappa(p.s);
  return u.map_modes([&](double x2) {
    const double l2 = x2 + p.m * p.m;
    return l2 > 0.0 ? k * std::pow(l2, p.s) : 0.0;
  });
}

TraceCheck neumann_trace_check(const SpectralField& u, const Params& p) {
  p.validate(false);
  const double s = p.s, k = kappa(s);
  const auto& c = u.modal();
  double cmax = 0.0;
  for (const auto& z : c) cmax = std::max(cmax, std::abs(z));
  TraceCheck tc;
  const double base[3] = {1e-2, 1e-3, 1e-4};
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(std::abs(c[i]) > 1e-13 * cmax)) continue;
    const double lam = std::sqrt(u.xi_squared(i) + p.m * p.m);
    if (lam == 0.0) continue;
    const double scale = std::min(1.0, 1.0 / lam);
    double A[3][3], b[3];
    for (int r = 0; r < 3; ++r) {
      const double t = base[r] * scale, tau = lam * t;
      // -t^{1-2s} d/dt theta(lam t) = lam^{2s} (-tau^{1-2s} theta'(tau))
      b[r] = std::pow(lam, 2.0 * s) * theta_scaled_flux(s, tau);
      A[r][0] = 1.0;
      A[r][1] = std::pow(tau, 2.0 - 2.0 * s);
      A[r][2] = tau * tau;
    }
    // Cramer's rule for the constant term
    auto det3 = [](double M[3][3]) {
      return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
             M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    double B[3][3];
    for (int r = 0; r < 3; ++r) {
      B[r][0] = b[r];
      B[r][1] = A[r][1];
      B[r][2] = A[r][2];
    }
    const double limit = det3(B) / det3(A);
    const double exact = k * std::pow(lam, 2.0 * s);
    const double err = std::abs(limit - exact) / exact;
    ++tc.modes_checked;
    if (err > tc.max_rel_error) {
      tc.max_rel_error = err;
      tc.worst_lambda = lam;
    }
  }
  return tc;
}

SpectralField kernel_convolve(const SpectralField& u, const Params& p, double t, double step) {
  require_dim1(u, "kernel_convolve");
  if (p.N != 1) throw std::invalid_argument("kernel_convolve: field dimension must equal N");
  const KernelSample ks = kernel_quadrature(p, t, false, step);
  const auto& v = u.values();
  const int n = static_cast<int>(v.size());
  const double h = u.spacing(), x0 = u.coordinate(0);
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double x = u.coordinate(i);
    double acc = 0.0;
    for (std::size_t q = 0; q < ks.values.size(); ++q) {
      const double w = ks.weights[q] * ks.values[q];
      if (w == 0.0) continue;
      acc += w * interp6(v, x0, h, x - ks.offsets[q]);
    }
    out[i] = acc;
  }
  return SpectralField::from_values(1, u.box_length(), u.grid_n(), std::move(out));
}

DirichletFormResult dirichlet_form_identity(const SpectralField& u, const Params& p) {
  p.validate(false);
  require_dim1(u, "dirichlet_form_identity");
  if (p.N != 1) throw std::invalid_argument("dirichlet_form_identity: field dimension must equal N");
  if (!(p.m > 0.0)) throw std::invalid_argument("dirichlet_form_identity requires m > 0");
  const auto& v = u.values();
  const int n = static_cast<int>(v.size());
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  DirichletFormResult r;
  if (vmax == 0.0) return r;
  if (std::max(std::abs(v.front()), std::abs(v.back())) > 1e-12 * vmax)
    throw std::invalid_argument("dirichlet_form_identity: u does not decay inside the box");

  const double s = p.s, m = p.m, m2s = std::pow(m, 2.0 * s);
  const double L = u.box_length();
  const auto& c = u.modal();
  for (std::size_t i = 0; i < c.size(); ++i)
    r.lhs += (std::pow(u.xi_squared(i) + m * m, s) - m2s) * std::norm(c[i]) * L;

  const LineKernel ker(s, m);
  const PvSetup st = pv_setup(u, ker, default_pv_cutoff(u));
  const double h = u.spacing();
  const double M2 = ker.moment(2, st.eps), M4 = ker.moment(4, st.eps);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    auto g = [&](int j) {
      const double dp = v[(i + j) % n] - v[i], dm = v[((i - j) % n + n) % n] - v[i];
      return (dp * dp + dm * dm) * st.k[j];
    };
    const double outer = gregory_tail(g, st.J, st.Jmax, h);
    const double d1 = stencil(v, i, kD1) / h;
    const double d2 = stencil(v, i, kD2) / (h * h);
    const double d3 = stencil(v, i, kD3) / (h * h * h);
    const double inner = 2.0 * d1 * d1 * M2 + 2.0 * (0.25 * d2 * d2 + d1 * d3 / 3.0) * M4;
    acc += outer + inner;
  }
  r.rhs = 0.5 * h * acc;
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.rel_gap = scale > 0.0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
  return r;
}

KernelLimitReport pointwise_kernel_limit(const SpectralField& u, const Params& p, const std::vector<double>& t_seq) {
  KernelLimitReport rep;
  const auto& v = u.values();
  for (double t : t_seq) {
    const SpectralField w = kernel_convolve(u, p, t);
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) e = std::max(e, std::abs(w.values()[i] - v[i]));
    if (!rep.sup_error.empty() && e > rep.sup_error.back()) rep.decreasing = false;
    rep.t.push_back(t);
    rep.sup_error.push_back(e);
  }
  // least-squares slope of log(error) against log(t)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    if (!(rep.sup_error[i] > 0.0)) continue;
    const double x = std::log(rep.t[i]), y = std::log(rep.sup_error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) rep.fitted_rate = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return rep;
}

TraceEnergy trace_energy(const SpectralField& u, const Params& p, double perturbation) {
  p.validate(false);
  const double s = p.s, k = kappa(s);
  const double vol = std::pow(u.box_length(), u.dim());
  const auto& c = u.modal();
  double c2max = 0.0;
  for (const auto& z : c) c2max = std::max(c2max, std::norm(z));
  TraceEnergy te;
  const double eps = perturbation;
  const double half = 0.5 - s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double c2 = std::norm(c[i]);
    if (c2 == 0.0) continue;
    const double lam = std::sqrt(u.xi_squared(i) + p.m * p.m);
    te.trace_side += k * (lam > 0.0 ? std::pow(lam, 2.0 * s) : 0.0) * c2 * vol;
    if (c2 < 1e-30 * c2max) continue;
    auto f = [&](double t) {
      // t^{1-2s} (f'^2 + lam^2 f^2), f = theta(lam t) + eps t e^{-t}
      const double th = lam > 0.0 ? theta_profile(s, lam * t) : 1.0;
      const double dth = lam > 0.0 ? lam * theta_profile_deriv(s, lam * t) : 0.0;
      const double th_w = std::pow(t, half) * th + eps * std::pow(t, half + 1.0) * std::exp(-t);
      const double d_w = std::pow(t, half) * dth + eps * std::pow(t, half) * (1.0 - t) * std::exp(-t);
      return d_w * d_w + lam * lam * th_w * th_w;
    };
    const double split = 1.0 / std::max(lam, 1.0);
    const double E = integrate_de(f, 0.0, split).value + integrate_de(f, split, kInf).value;
    te.extension_energy += E * c2 * vol;
  }
  const double scale = std::max(std::abs(te.trace_side), std::abs(te.extension_energy));
  te.rel_gap = scale > 0.0 ? (te.extension_energy - te.trace_side) / scale : 0.0;
  return te;
}

}  // namespace relfrac
