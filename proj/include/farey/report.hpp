#pragma once

// Text and JSON serialization of results. Numbers are written in shortest
// round-trip form so equal values always print identically.

#include <charconv>
#include <string>
#include <system_error>

#include <nlohmann/json.hpp>

#include "farey/asymptotics.hpp"
#include "farey/numeric_core.hpp"

namespace farey {

inline std::string format_real(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string format_real(long double x) {
  char buf[96];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline nlohmann::ordered_json to_json(const FitPoint& p) {
  return {{"n_or_sigma", p.n_or_sigma}, {"value", p.value}, {"error", p.error}, {"scaled_error", p.scaled_error}};
}

inline nlohmann::ordered_json to_json(const FitReport& r) {
  nlohmann::ordered_json j;
  j["law"] = r.law;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) j["params"][k] = v;
  j["error_definition"] = r.error_definition;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : r.points) j["points"].push_back(to_json(p));
  j["K"] = r.K;
  j["verdict"] = to_string(r.verdict);
  return j;
}

/// One object whose first line holds the config echo and whose remaining
/// members follow one per line: {"config":{...},\n"key":value,...}
inline std::string json_with_config(const nlohmann::ordered_json& config, const nlohmann::ordered_json& body) {
  std::string s = "{\"config\":" + config.dump();
  for (auto it = body.begin(); it != body.end(); ++it) {
    s += ",\n" + nlohmann::ordered_json(it.key()).dump() + ":" + it.value().dump();
  }
  s += "}\n";
  return s;
}

}  // namespace farey
