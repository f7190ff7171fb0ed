#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "report.hpp"
#include "scenarios.hpp"

using namespace relfrac::cli;

namespace {

int cmd_list() {
  for (const auto& s : scenario_table()) {
    std::cout << s.name << "\t" << s.description << "\n";
    for (const auto& [name, tol] : s.tolerances) std::cout << "    " << name << " (default tolerance " << tol << ")\n";
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  std::vector<std::string> problems;
  try {
    problems = validate(load_json_file(path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& p : problems) std::cout << "problem: " << p << "\n";
  if (problems.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  return 2;
}

int cmd_run(const std::string& path, const std::string& out_override) {
  ScenarioConfig cfg;
  try {
    const Json j = load_json_file(path);
    const auto problems = validate(j);
    if (!problems.empty()) {
      for (const auto& p : problems) std::cerr << "problem: " << p << "\n";
      std::cerr << "error: configuration " << path << " is not runnable\n";
      return 1;
    }
    cfg = parse_config(j);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const std::string out = out_override.empty() ? cfg.output_dir : out_override;
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  try {
    rep = run_scenario(cfg, out);
    const auto file = std::filesystem::path(out) / "results.json";
    std::ofstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + file.string());
    f << dump_json(rep.to_json());
  } catch (const std::exception& e) {
    std::cerr << "error: scenario " << cfg.scenario << ": " << e.what() << "\n";
    return 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const Check& c : rep.checks) {
    std::printf("%s  %-28s value %.6g  tolerance %.3g (%s)\n", c.passed() ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.tolerance, c.kind == "min" ? ">= -tol" : "<= tol");
  }
  std::fprintf(stderr, "scenario %s finished in %.2f s; results in %s\n", cfg.scenario.c_str(), secs, out.c_str());
  return rep.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relfrac scenario runner"};
  app.require_subcommand(1);
  std::string config, out;
  auto* run = app.add_subcommand("run", "run a scenario and write results.json");
  run->add_option("--config", config, "configuration file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory (overrides output_dir)");
  auto* val = app.add_subcommand("validate", "list the problems of a configuration");
  val->add_option("--config", config, "configuration file (JSON)")->required()->check(CLI::ExistingFile);
  auto* list = app.add_subcommand("list-scenarios", "list scenarios and their checks");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*run) return cmd_run(config, out);
  if (*val) return cmd_validate(config);
  if (*list) return cmd_list();
  return 1;
}
