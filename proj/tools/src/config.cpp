#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "relfrac/angular.hpp"

namespace relfrac::cli {

const std::vector<ScenarioInfo>& scenario_table() {
  static const std::vector<ScenarioInfo> table = {
      {"constants", "kappa_s by closed form, energy integral and Neumann limit; Lambda_{N,s}; kernel constants",
       {{"kappa_integral_gap", 1e-6}, {"kappa_limit_gap", 1e-6}, {"kappa_alt_gap", 1e-12},
        {"kappa_half_exact", 1e-10}, {"kernel_constant_alt_gap", 1e-12}}},
      {"angular", "eigenvalue table of the weighted half-sphere problem",
       {{"oracle_max_error", 1e-4}, {"admissibility_margin", 1e-12}}},
      {"hardy", "Hardy-Herbst margins, near-optimizer ratio and boundary Hardy margins",
       {{"herbst_min_margin", 1e-12}, {"near_optimizer_gap", 0.05}, {"boundary_min_margin", 1e-10}}},
      {"extension_test", "Neumann trace of the extension and the Dirichlet-form identity (N = 1)",
       {{"trace_max_error", 1e-6}, {"trace_energy_gap", 1e-6}, {"dirichlet_form_gap", 1e-3}}},
      {"kernel_test", "Bessel kernel normalization and the principal-value operator",
       {{"kernel_normalization_gap", 1e-6}, {"pv_symbol_gap", 1e-4}}},
      {"separable_frequency", "frequency trace, H' identity and Pohozaev residuals of a separable solution",
       {{"frequency_rigidity", 1e-10}, {"hprime_residual", 1e-12}, {"frequency_at_0.01", 1e-3},
        {"gamma_extract_gap", 1e-3}, {"pohozaev_residual", 1e-8}, {"frequency_lower_margin", 1e-12},
        {"hprime_residual_bessel", 1e-6}, {"pohozaev_residual_bessel", 1e-6}}},
      {"halfdisk_pipeline", "half-disk solve, frequency trace, gamma extraction and blow-up (N = 1)",
       {{"gamma_relative_gap", 0.02}, {"blowup_rate_relative_gap", 0.5}, {"blowup_max_increase", 1e-12},
        {"frequency_lower_margin", 1e-12}, {"pohozaev_residual", 1e-2}, {"hprime_residual", 1e-2}}},
      {"blowup", "rescaled blow-up distances of a separable solution",
       {{"blowup_distance", 1e-10}, {"blowup_rate_relative_gap", 0.05}, {"blowup_max_increase", 1e-12}}},
      {"beta", "beta coefficients of a separable solution against the angular eigenbasis",
       {{"beta_leading_gap", 1e-4}, {"beta_orthogonality", 1e-8}}},
  };
  return table;
}

const ScenarioInfo* find_scenario(const std::string& name) {
  for (const auto& s : scenario_table())
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

struct Collector {
  std::vector<std::string> problems;
  void add(std::string msg) { problems.push_back(std::move(msg)); }
};

bool number_field(const Json& obj, const char* key, const std::string& where, Collector& c, double& out,
                  bool required) {
  if (!obj.contains(key)) {
    if (required) c.add("missing " + where + "." + key);
    return false;
  }
  if (!obj[key].is_number()) {
    c.add(where + "." + key + " must be a number");
    return false;
  }
  out = obj[key].get<double>();
  if (!std::isfinite(out)) {
    c.add(where + "." + key + " must be finite");
    return false;
  }
  return true;
}

void parse_params(const Json& j, Collector& c, Params& p) {
  if (!j.is_object()) {
    c.add("params must be an object");
    return;
  }
  double v = 0.0;
  if (number_field(j, "N", "params", c, v, true)) {
    if (v != std::floor(v) || v < 1.0 || v > 16.0)
      c.add("params.N must be an integer in [1, 16]");
    else
      p.N = static_cast<int>(v);
  }
  number_field(j, "s", "params", c, p.s, true);
  number_field(j, "m", "params", c, p.m, false);

  PotentialSpec& pot = p.potential;
  if (j.contains("a")) {
    const Json& a = j["a"];
    const std::string kind = a.is_object() && a.contains("kind") && a["kind"].is_string()
                                 ? a["kind"].get<std::string>()
                                 : std::string();
    if (kind == "zero") {
      pot.a_kind = PotentialSpec::AKind::zero;
    } else if (kind == "constant") {
      pot.a_kind = PotentialSpec::AKind::constant;
      number_field(a, "a0", "params.a", c, pot.a0, true);
    } else if (kind == "two_point") {
      pot.a_kind = PotentialSpec::AKind::two_point;
      number_field(a, "a_minus", "params.a", c, pot.a_minus, true);
      number_field(a, "a_plus", "params.a", c, pot.a_plus, true);
    } else {
      c.add("params.a.kind must be one of zero, constant, two_point");
    }
  }
  if (j.contains("h")) {
    const Json& h = j["h"];
    const std::string kind = h.is_object() && h.contains("kind") && h["kind"].is_string()
                                 ? h["kind"].get<std::string>()
                                 : std::string();
    if (kind == "zero") {
      pot.h_kind = PotentialSpec::HKind::zero;
    } else if (kind == "power") {
      pot.h_kind = PotentialSpec::HKind::power;
      number_field(h, "c_h", "params.h", c, pot.c_h, true);
      number_field(h, "chi", "params.h", c, pot.chi, true);
    } else {
      c.add("params.h.kind must be one of zero, power");
    }
  }
}

bool positive_list(const Json& num, const char* key, Collector& c, bool decreasing_unit) {
  const Json& v = num[key];
  if (!v.is_array() || v.empty()) {
    c.add(std::string("numerics.") + key + " must be a non-empty array");
    return false;
  }
  double prev = INFINITY;
  for (const auto& e : v) {
    if (!e.is_number() || !(e.get<double>() > 0.0) || !std::isfinite(e.get<double>())) {
      c.add(std::string("numerics.") + key + " entries must be positive numbers");
      return false;
    }
    const double x = e.get<double>();
    if (decreasing_unit && (x > 1.0 || !(x < prev))) {
      c.add(std::string("numerics.") + key + " must be strictly decreasing in (0, 1]");
      return false;
    }
    prev = x;
  }
  return true;
}

void check_numerics(const Json& num, const ScenarioInfo& info, Collector& c) {
  if (!num.is_object()) {
    c.add("numerics must be an object");
    return;
  }
  static const char* known[] = {"grid_n", "quad_nodes", "r_values", "tau_seq", "R", "tolerances", "rho_min",
                                "count", "box_length", "t_values", "amplitude", "seed", "pohozaev_radius"};
  for (auto it = num.begin(); it != num.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) c.add("unknown key numerics." + it.key());
  }
  double v = 0.0;
  for (const char* key : {"grid_n", "quad_nodes", "count", "seed"})
    if (number_field(num, key, "numerics", c, v, false) && (v != std::floor(v) || v < 1.0))
      c.add(std::string("numerics.") + key + " must be a positive integer");
  if (number_field(num, "grid_n", "numerics", c, v, false) && v < 8.0) c.add("numerics.grid_n must be >= 8");
  for (const char* key : {"R", "rho_min", "box_length", "amplitude", "pohozaev_radius"})
    if (number_field(num, key, "numerics", c, v, false) && !(v > 0.0))
      c.add(std::string("numerics.") + key + " must be positive");
  if (num.contains("r_values")) positive_list(num, "r_values", c, false);
  if (num.contains("t_values")) positive_list(num, "t_values", c, false);
  if (num.contains("tau_seq")) positive_list(num, "tau_seq", c, true);
  if (num.contains("tolerances")) {
    const Json& t = num["tolerances"];
    if (!t.is_object()) {
      c.add("numerics.tolerances must be an object");
    } else {
      for (auto it = t.begin(); it != t.end(); ++it) {
        if (!info.tolerances.count(it.key()))
          c.add("unknown tolerance '" + it.key() + "' for scenario " + info.name);
        else if (!it.value().is_number() || !(it.value().get<double>() > 0.0))
          c.add("tolerance '" + it.key() + "' must be a positive number");
      }
    }
  }
}

void check_scenario(const std::string& name, const Params& p, const Json& num, Collector& c) {
  const bool h_power = p.potential.h_kind == PotentialSpec::HKind::power;
  const bool strict_gap = p.N > 2.0 * p.s;
  if (name == "hardy" && !strict_gap) c.add("scenario hardy requires N > 2s");
  if (name == "extension_test" && p.N != 1) c.add("scenario extension_test requires N = 1");
  if (name == "halfdisk_pipeline") {
    if (p.N != 1) c.add("scenario halfdisk_pipeline requires N = 1");
    if (!strict_gap) c.add("scenario halfdisk_pipeline requires N > 2s");
    if (!num.contains("grid_n")) c.add("missing numerics.grid_n");
  }
  if ((name == "separable_frequency" || name == "blowup" || name == "beta") && h_power)
    c.add("scenario " + name + " requires h = 0 (separable solutions)");
  if (name == "blowup" && !num.contains("tau_seq")) c.add("missing numerics.tau_seq");
}

// The extension, kernel and angular machinery is well posed for N < 2s.
bool needs_gap(const std::string& name) {
  return name != "constants" && name != "angular" && name != "extension_test" && name != "kernel_test";
}

bool uses_angular(const std::string& name) {
  return name != "constants" && name != "extension_test" && name != "kernel_test";
}

}  // namespace

std::vector<std::string> validate(const Json& config) {
  Collector c;
  if (!config.is_object()) return {"configuration must be a JSON object"};
  for (auto it = config.begin(); it != config.end(); ++it)
    if (it.key() != "scenario" && it.key() != "params" && it.key() != "numerics" && it.key() != "output_dir")
      c.add("unknown top-level key " + it.key());

  const ScenarioInfo* info = nullptr;
  std::string name;
  if (!config.contains("scenario") || !config["scenario"].is_string()) {
    c.add("missing scenario");
  } else {
    name = config["scenario"].get<std::string>();
    info = find_scenario(name);
    if (!info) c.add("unknown scenario '" + name + "'");
  }
  if (config.contains("output_dir") && !config["output_dir"].is_string()) c.add("output_dir must be a string");

  Params p;
  if (!config.contains("params"))
    c.add("missing params");
  else
    parse_params(config["params"], c, p);
  const std::size_t structural = c.problems.size();
  if (structural == 0) {
    for (auto& msg : p.problems(needs_gap(name))) c.add(msg);
  }

  const Json num = config.contains("numerics") ? config["numerics"] : Json::object();
  if (info) {
    check_numerics(num, *info, c);
    if (num.is_object()) check_scenario(name, p, num, c);
  }

  if (c.problems.empty() && uses_angular(name) && p.potential.a_kind != PotentialSpec::AKind::zero) {
    // a = 0 has mu1 = 0 exactly and is always admissible.
    Params q = p;
    q.potential.h_kind = PotentialSpec::HKind::zero;
    try {
      const double mu = mu1(q, {512, true}).mu1;
      const double gap = p.half_gap();
      if (!(mu > -gap * gap)) {
        std::ostringstream os;
        os.precision(17);
        os << "inadmissible potential: mu1(a) = " << mu << " <= -((N-2s)/2)^2 = " << -gap * gap;
        c.add(os.str());
      }
    } catch (const std::exception& e) {
      c.add(std::string("admissibility check failed: ") + e.what());
    }
  }
  return c.problems;
}

ScenarioConfig parse_config(const Json& config) {
  const auto problems = validate(config);
  if (!problems.empty()) throw std::invalid_argument("invalid configuration: " + problems.front());
  ScenarioConfig out;
  out.scenario = config["scenario"].get<std::string>();
  Collector c;
  parse_params(config["params"], c, out.params);
  out.params_json = config["params"];
  if (config.contains("numerics")) out.numerics = config["numerics"];
  out.tolerances = find_scenario(out.scenario)->tolerances;
  if (out.numerics.contains("tolerances"))
    for (auto it = out.numerics["tolerances"].begin(); it != out.numerics["tolerances"].end(); ++it)
      out.tolerances[it.key()] = it.value().get<double>();
  if (config.contains("output_dir")) out.output_dir = config["output_dir"].get<std::string>();
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("cannot parse " + path + ": " + e.what());
  }
}

}  // namespace relfrac::cli
