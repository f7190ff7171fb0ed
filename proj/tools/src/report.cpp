#include "report.hpp"

#include <cmath>
#include <cstdio>

namespace relfrac::cli {

bool Check::passed() const {
  if (!std::isfinite(value)) return false;
  return kind == "min" ? value >= -tolerance : value <= tolerance;
}

bool Report::passed() const {
  for (const Check& c : checks)
    if (!c.passed()) return false;
  return true;
}

Json Report::to_json() const {
  Json out;
  out["schema_version"] = 1;
  out["scenario"] = scenario;
  out["params"] = params;
  out["numerics"] = numerics;
  out["passed"] = passed();
  Json cs = Json::array();
  for (const Check& c : checks) {
    Json e;
    e["name"] = c.name;
    e["value"] = c.value;
    e["tolerance"] = c.tolerance;
    e["comparison"] = c.kind == "min" ? "value >= -tolerance" : "value <= tolerance";
    e["passed"] = c.passed();
    e["data"] = c.data;
    cs.push_back(e);
  }
  out["checks"] = cs;
  out["artifacts"] = artifacts;
  return out;
}

namespace {

std::string number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(it.value(), indent, depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], indent, depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(j[i], indent, depth + 1, out);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  out += "\n";
  return out;
}

}  // namespace relfrac::cli
