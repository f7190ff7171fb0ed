#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace relfrac::cli {

using Json = nlohmann::ordered_json;

// A judged quantity. kind "max": passes when value <= tolerance.
// kind "min": passes when value >= -tolerance.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string kind = "max";
  Json data = Json::object();

  bool passed() const;
};

struct Report {
  std::string scenario;
  Json params = Json::object();
  Json numerics = Json::object();
  std::vector<Check> checks;
  std::vector<std::string> artifacts;

  bool passed() const;
  Json to_json() const;
};

// JSON text with every floating-point number printed with 17 significant
// digits; non-finite numbers become null.
std::string dump_json(const Json& j, int indent = 2);

}  // namespace relfrac::cli
