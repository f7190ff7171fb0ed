#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "relfrac/angular.hpp"
#include "relfrac/diagnostics.hpp"
#include "relfrac/extension.hpp"
#include "relfrac/hardy.hpp"
#include "relfrac/specfun.hpp"
#include "relfrac/spectral_field.hpp"

namespace relfrac::cli {

namespace {

using Radial = SeparableSolution::Radial;

class Context {
 public:
  Context(const ScenarioConfig& cfg, std::string out_dir) : cfg_(cfg), out_(std::move(out_dir)) {
    report_.scenario = cfg.scenario;
    report_.params = cfg.params_json;
  }

  const Params& params() const { return cfg_.params; }

  double number(const char* key, double fallback) {
    const double v = cfg_.numerics.contains(key) ? cfg_.numerics[key].get<double>() : fallback;
    report_.numerics[key] = v;
    return v;
  }
  int integer(const char* key, int fallback) {
    const int v = cfg_.numerics.contains(key) ? cfg_.numerics[key].get<int>() : fallback;
    report_.numerics[key] = v;
    return v;
  }
  std::vector<double> list(const char* key, std::vector<double> fallback) {
    std::vector<double> v = cfg_.numerics.contains(key) ? cfg_.numerics[key].get<std::vector<double>>()
                                                         : std::move(fallback);
    report_.numerics[key] = v;
    return v;
  }

  void check(const std::string& name, double value, Json data = Json::object(), const std::string& kind = "max") {
    Check c;
    c.name = name;
    c.value = value;
    c.tolerance = cfg_.tolerances.at(name);
    c.kind = kind;
    c.data = std::move(data);
    report_.checks.push_back(std::move(c));
  }

  void artifact(const std::string& name, const std::string& text) {
    std::ofstream f(std::filesystem::path(out_) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name + " in " + out_);
    f << text;
    report_.artifacts.push_back(name);
  }

  Report finish() {
    Json tol = Json::object();
    for (const auto& [k, v] : cfg_.tolerances) tol[k] = v;
    report_.numerics["tolerances"] = tol;
    return report_;
  }

 private:
  const ScenarioConfig& cfg_;
  std::string out_;
  Report report_;
};

std::vector<double> log_radii(double lo, double hi, int n) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  return r;
}

double max_abs(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e = std::max(e, std::abs(x));
  return e;
}

double max_increase(const std::vector<double>& d) {
  double inc = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) inc = std::max(inc, (d[i] - d[i - 1]) / std::max(d[0], 1e-300));
  return inc;
}

SeparableSolution ground_separable(const Params& p, double amplitude) {
  const AngularEigenpair e = mu1(p).eigenpair;
  return p.m > 0.0 ? make_separable(e, Radial::modified_bessel, amplitude, p.m)
                   : make_separable(e, Radial::power, amplitude);
}

Json separable_data(const SeparableSolution& w) {
  Json d;
  d["radial"] = w.radial == Radial::power ? "power" : "modified_bessel";
  d["mu"] = w.eigenpair.mu;
  d["gamma"] = w.gamma();
  d["bessel_nu"] = w.eigenpair.bessel_nu;
  d["amplitude"] = w.amplitude;
  d["certified_residual"] = w.certified_residual;
  return d;
}

void run_constants(Context& ctx) {
  const Params& p = ctx.params();
  const Constants c = constants(p.N, p.s);
  const KappaRoutes k = kappa_from_ode(p.s);
  Json d;
  d["kappa_s"] = c.kappa_s;
  d["kappa_integral"] = k.integral;
  d["kappa_limit"] = k.limit;
  d["N_s"] = c.N_s;
  if (p.N > 2.0 * p.s) d["Lambda_Ns"] = c.Lambda_Ns;
  ctx.check("kappa_integral_gap", std::abs(k.integral - c.kappa_s) / c.kappa_s, d);
  ctx.check("kappa_limit_gap", std::abs(k.limit - c.kappa_s) / c.kappa_s, {{"kappa_limit", k.limit}});
  ctx.check("kappa_alt_gap", std::abs(c.kappa_s_alt - c.kappa_s) / c.kappa_s, {{"kappa_s_alt", c.kappa_s_alt}});
  if (p.s == 0.5) ctx.check("kappa_half_exact", std::abs(c.kappa_s - 1.0), {{"kappa_s", c.kappa_s}});
  ctx.check("kernel_constant_alt_gap", std::abs(c.c_Ns_alt - c.c_Ns) / std::abs(c.c_Ns),
            {{"c_Ns", c.c_Ns}, {"c_Ns_alt", c.c_Ns_alt}, {"Cprime_Ns", c.Cprime_Ns}});
}

void run_angular(Context& ctx) {
  const Params& p = ctx.params();
  const int n = ctx.integer("grid_n", 2048);
  const int count = ctx.integer("count", 6);
  const SolveOptions opt{n, true};
  const auto pairs = global_spectrum(p, count, 4, opt);
  ctx.artifact("eigen_table.csv", eigen_table_csv(pairs));
  const Mu1Result g = mu1(p, opt);
  const double gap = p.half_gap();
  Json eig = Json::array();
  for (const auto& e : pairs) eig.push_back(e.mu);
  ctx.check("admissibility_margin", g.mu1 + gap * gap,
            {{"mu1", g.mu1}, {"gamma", g.eigenpair.gamma}, {"eigenvalues", eig},
             {"sign_definite", g.sign_definite}, {"min_at_l0", g.min_at_l0}},
            "min");
  if (p.potential.a_kind != PotentialSpec::AKind::zero) return;
  // a = 0: the lowest eigenvalue of degree-l harmonics is l(l+N-2s).
  double err = 0.0;
  Json table = Json::array();
  for (int l = 0; l <= 4; ++l) {
    const double mu = p.N == 1 ? solve_sector(p, 0, 5, opt)[l].mu : solve_sector(p, l, 1, opt)[0].mu;
    const double exact = l * (l + p.N - 2.0 * p.s);
    err = std::max(err, std::abs(mu - exact) / std::max(1.0, exact));
    table.push_back({{"l", l}, {"mu", mu}, {"exact", exact}});
  }
  ctx.check("oracle_max_error", err, {{"table", table}});
}

void run_hardy(Context& ctx) {
  const Params& p = ctx.params();
  const double Lambda = constants(p.N, p.s).Lambda_Ns;
  std::mt19937_64 rng(static_cast<std::uint64_t>(ctx.integer("seed", 20240917)));
  double worst = INFINITY;
  for (int i = 0; i < 20; ++i) {
    const HerbstTerms t = herbst_gaussian_mixture(random_mixture(p.N, rng), p.s);
    worst = std::min(worst, t.margin / t.kinetic);
  }
  ctx.check("herbst_min_margin", worst, {{"Lambda_Ns", Lambda}, {"functions", 20}}, "min");
  if (p.N == 1 || p.N == 3) {
    const HerbstTerms t = herbst_near_optimizer(p.N, p.s, 1e-3);
    ctx.check("near_optimizer_gap", std::abs(t.ratio / Lambda - 1.0), {{"eps", 1e-3}, {"ratio", t.ratio}});
  }
  Params q = p;
  q.m = 0.0;
  q.potential.h_kind = PotentialSpec::HKind::zero;
  const SeparableSolution w = make_separable(mu1(q).eigenpair, Radial::power, 1.0);
  double margin = hardy_boundary_check(w, q, 1.0).margin;
  int checked = 1;
  if (p.N == 1) {
    std::mt19937_64 prng(static_cast<std::uint64_t>(ctx.integer("seed", 20240917)) + 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      const double c0 = u(prng), c1 = u(prng), c2 = u(prng);
      // w = c0 + c1 x + c2 (t^2 - x^2), t = rho cos(alpha), x = rho sin(alpha)
      const PolarFunction f{
          [=](double r, double a) { return c0 + c1 * r * std::sin(a) + c2 * r * r * std::cos(2.0 * a); },
          [=](double r, double a) { return c1 * std::sin(a) + 2.0 * c2 * r * std::cos(2.0 * a); },
          [=](double r, double a) { return c1 * r * std::cos(a) - 2.0 * c2 * r * r * std::sin(2.0 * a); }};
      for (double r : {0.5, 2.0}) {
        margin = std::min(margin, hardy_boundary_check(f, q, r).margin);
        ++checked;
      }
    }
  }
  ctx.check("boundary_min_margin", margin, {{"functions_checked", checked}, {"C_aNs", hardy_constant(q)}}, "min");
}

void run_extension(Context& ctx) {
  const Params& p = ctx.params();
  const double L = ctx.number("box_length", 40.0);
  const int n = ctx.integer("grid_n", 256);
  const auto gauss = SpectralField::from_function(1, L, n, [](const double* x) { return std::exp(-x[0] * x[0]); });
  const double k0 = 2.0 * std::numbers::pi * 3.0 / L;
  const auto mode = SpectralField::from_function(1, L, n, [=](const double* x) { return std::cos(k0 * x[0]); });
  const TraceCheck a = neumann_trace_check(gauss, p), b = neumann_trace_check(mode, p);
  ctx.check("trace_max_error", std::max(a.max_rel_error, b.max_rel_error),
            {{"gaussian_error", a.max_rel_error}, {"mode_error", b.max_rel_error},
             {"modes_checked", a.modes_checked + b.modes_checked}});
  ctx.artifact("neumann_trace.csv", neumann_trace(gauss, p).to_csv());
  const TraceEnergy te = trace_energy(gauss, p);
  ctx.check("trace_energy_gap", std::abs(te.rel_gap),
            {{"trace_side", te.trace_side}, {"extension_energy", te.extension_energy}});
  if (p.m > 0.0) {
    const DirichletFormResult r = dirichlet_form_identity(gauss, p);
    ctx.check("dirichlet_form_gap", r.rel_gap, {{"lhs", r.lhs}, {"rhs", r.rhs}});
  }
}

void run_kernel(Context& ctx) {
  const Params& p = ctx.params();
  const auto ts = ctx.list("t_values", {0.1, 1.0});
  double worst = 0.0;
  Json rows = Json::array();
  std::vector<KernelSample> samples;
  for (double t : ts) {
    const KernelSample k = kernel_quadrature(p, t);
    const double target = theta_profile(p.s, p.m * t);
    worst = std::max(worst, std::abs(k.integral() - target));
    rows.push_back({{"t", t}, {"integral", k.integral()}, {"theta", target}});
    samples.push_back(k);
  }
  ctx.check("kernel_normalization_gap", worst, {{"rows", rows}});
  ctx.artifact("kernel.csv", kernel_csv(samples));
  if (p.N == 1 && p.m > 0.0) {
    const double L = ctx.number("box_length", 40.0);
    const int n = ctx.integer("grid_n", 256);
    const auto u = SpectralField::from_function(1, L, n, [](const double* x) { return std::exp(-x[0] * x[0]); });
    const auto sym = apply_symbol(u, p.s, p.m), pv = apply_kernel_pv(u, p.s, p.m, default_pv_cutoff(u));
    double diff = 0.0;
    for (std::size_t j = 0; j < sym.size(); ++j) diff = std::max(diff, std::abs(sym.values()[j] - pv.values()[j]));
    ctx.check("pv_symbol_gap", diff / max_abs(sym.values()), {{"cutoff", default_pv_cutoff(u)}});
  }
}

void run_separable_frequency(Context& ctx) {
  const Params& p = ctx.params();
  const SeparableSolution w = ground_separable(p, ctx.number("amplitude", 1.0));
  const auto rs = ctx.list("r_values", log_radii(1e-3, 1.0, 31));
  const FrequencyTrace t = frequency_trace(w, p, rs);
  ctx.artifact("frequency.csv", t.to_csv());
  const bool power = w.radial == Radial::power;
  const double gap = p.half_gap();
  const double hp = check_Hprime(t).max_residual;
  Json info = separable_data(w);
  if (power) {
    double dev = 0.0;
    for (double v : t.Nfreq) dev = std::max(dev, std::abs(v - w.gamma()));
    ctx.check("frequency_rigidity", dev, info);
    ctx.check("hprime_residual", hp);
  } else {
    const double n01 = frequency_trace(w, p, {0.01}).Nfreq[0];
    ctx.check("frequency_at_0.01", std::abs(n01 - w.gamma()), {{"N", n01}, {"gamma", w.gamma()}});
    const GammaEstimate g = gamma_extract(t);
    ctx.check("gamma_extract_gap", std::abs(g.gamma - w.gamma()),
              {{"gamma_fit", g.gamma}, {"ci", g.ci}, {"window", g.window}, {"cross_check", g.cross_check}});
    ctx.check("hprime_residual_bessel", hp, info);
  }
  double margin = INFINITY, cmin = INFINITY, cmax = 0.0;
  for (std::size_t i = 0; i < t.r_values.size(); ++i) {
    margin = std::min(margin, t.Nfreq[i] + gap);
    if (t.r_values[i] <= 10.0 * t.r_values.back() * (1.0 + 1e-12) && t.Nfreq[i] + gap > 0.0) {
      const double c = std::abs(t.nu2[i]) / ((t.Nfreq[i] + gap) * t.r_values[i]);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
  }
  Json shape;
  shape["nu2_bound_constant_min"] = cmin;
  shape["nu2_bound_constant_max"] = cmax;
  shape["nu1_max_abs"] = max_abs(t.nu1);
  ctx.check("frequency_lower_margin", margin, shape, "min");
  const double pr = ctx.number("pohozaev_radius", 0.5);
  const PohozaevResidual po = pohozaev_residual(w, p, pr);
  ctx.check(power ? "pohozaev_residual" : "pohozaev_residual_bessel", std::max(po.res1, po.res2),
            {{"res1", po.res1}, {"res2", po.res2}, {"scale1", po.scale1}, {"scale2", po.scale2}});
}

void run_pipeline(Context& ctx) {
  const Params& p = ctx.params();
  PipelineOptions opt;
  opt.n_rho = opt.n_alpha = ctx.integer("grid_n", 512);
  opt.R = ctx.number("R", 1.0);
  opt.rho_min = ctx.number("rho_min", 1e-3);
  opt.r_values = ctx.list("r_values", log_radii(3.0 * opt.rho_min, opt.R, 48));
  opt.tau = ctx.list("tau_seq", opt.tau);
  opt.pohozaev_radius = ctx.number("pohozaev_radius", 0.5);
  const PipelineResult r = halfdisk_pipeline(p, opt);
  ctx.artifact("frequency.csv", r.trace.to_csv());
  ctx.artifact("blowup.json", r.blowup.to_json() + "\n");
  ctx.check("gamma_relative_gap", std::abs(r.gamma.gamma - r.gamma_pred) / std::abs(r.gamma_pred),
            {{"gamma_fit", r.gamma.gamma}, {"gamma_pred", r.gamma_pred}, {"ci", r.gamma.ci},
             {"mu1", r.angular.mu1}, {"bootstrap_c", r.bootstrap_c},
             {"solver_residual", r.solution.residual_norm}});
  if (p.potential.h_kind == PotentialSpec::HKind::power) {
    const double chi = p.potential.chi;
    ctx.check("blowup_rate_relative_gap", std::abs(r.blowup.fitted_rate - chi) / chi,
              {{"fitted_rate", r.blowup.fitted_rate}, {"chi", chi}});
  }
  ctx.check("blowup_max_increase", max_increase(r.blowup.distance), {{"decreasing", r.blowup.decreasing}});
  ctx.check("frequency_lower_margin", r.min_frequency_margin, Json::object(), "min");
  ctx.check("pohozaev_residual", std::max(r.pohozaev.res1, r.pohozaev.res2),
            {{"res1", r.pohozaev.res1}, {"res2", r.pohozaev.res2}});
  ctx.check("hprime_residual", check_Hprime(r.trace).max_residual);
}

void run_blowup(Context& ctx) {
  const Params& p = ctx.params();
  const SeparableSolution w = ground_separable(p, ctx.number("amplitude", 1.0));
  const BlowupReport b = rescale_blowup(w, p, ctx.list("tau_seq", {}));
  ctx.artifact("blowup.json", b.to_json() + "\n");
  if (w.radial == Radial::power) {
    ctx.check("blowup_distance", max_abs(b.distance), separable_data(w));
    return;
  }
  // I_nu has a series in (m r)^2, so the distance decays like tau^2.
  ctx.check("blowup_rate_relative_gap", std::abs(b.fitted_rate - 2.0) / 2.0,
            {{"fitted_rate", b.fitted_rate}, {"expected_rate", 2.0}});
  ctx.check("blowup_max_increase", max_increase(b.distance), {{"decreasing", b.decreasing}});
}

void run_beta(Context& ctx) {
  const Params& p = ctx.params();
  const int count = ctx.integer("count", 3);
  const auto pairs = p.N == 1 ? solve_sector(p, 0, count) : global_spectrum(p, count, 2);
  const double A = ctx.number("amplitude", 1.0);
  const SeparableSolution w = p.m > 0.0 ? make_separable(pairs[0], Radial::modified_bessel, A, p.m)
                                        : make_separable(pairs[0], Radial::power, A);
  const double R = ctx.number("R", 1.0);
  const auto beta = beta_coefficients(w, p, pairs, R);
  const double nu = pairs[0].bessel_nu;
  const double expected = p.m > 0.0 ? A * std::pow(0.5 * p.m, nu) / std::tgamma(nu + 1.0)
                                    : A * pairs[0].norm_certificate;
  ctx.check("beta_leading_gap", std::abs(beta[0] - expected), {{"beta", beta}, {"expected", expected}});
  double ortho = 0.0;
  for (std::size_t i = 1; i < beta.size(); ++i) ortho = std::max(ortho, std::abs(beta[i]));
  ctx.check("beta_orthogonality", ortho);
}

}  // namespace

Report run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  Context ctx(cfg, out_dir);
  const std::string& s = cfg.scenario;
  if (s == "constants") run_constants(ctx);
  else if (s == "angular") run_angular(ctx);
  else if (s == "hardy") run_hardy(ctx);
  else if (s == "extension_test") run_extension(ctx);
  else if (s == "kernel_test") run_kernel(ctx);
  else if (s == "separable_frequency") run_separable_frequency(ctx);
  else if (s == "halfdisk_pipeline") run_pipeline(ctx);
  else if (s == "blowup") run_blowup(ctx);
  else if (s == "beta") run_beta(ctx);
  else throw std::invalid_argument("unknown scenario " + s);
  return ctx.finish();
}

}  // namespace relfrac::cli
