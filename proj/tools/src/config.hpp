#pragma once

#include <map>
#include <string>
#include <vector>

#include "relfrac/params.hpp"
#include "report.hpp"

namespace relfrac::cli {

struct ScenarioConfig {
  std::string scenario;
  Params params;
  Json params_json = Json::object();
  Json numerics = Json::object();  // scenario-specific keys, validated
  std::map<std::string, double> tolerances;  // defaults merged with overrides
  std::string output_dir = "out";
};

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::map<std::string, double> tolerances;  // default tolerance per check
};

const std::vector<ScenarioInfo>& scenario_table();
const ScenarioInfo* find_scenario(const std::string& name);

// Every problem that prevents a run, including the admissibility pre-check
// mu1(a) > -((N-2s)/2)^2. Empty iff the configuration is runnable.
std::vector<std::string> validate(const Json& config);

// Throws std::invalid_argument carrying the first problem when validate()
// reports any.
ScenarioConfig parse_config(const Json& config);

Json load_json_file(const std::string& path);

}  // namespace relfrac::cli
