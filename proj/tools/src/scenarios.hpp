#pragma once

#include <string>

#include "config.hpp"
#include "report.hpp"

namespace relfrac::cli {

// Runs the configured scenario, writes its CSV/JSON artifacts into out_dir
// and returns the judged report (results.json is written by the caller).
Report run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

}  // namespace relfrac::cli
