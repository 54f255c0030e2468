#pragma once

#include <string>

#include <json.hpp>

namespace spectel {

/// One pass/fail line of a verification report.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

inline nlohmann::json to_json(const Check& c) {
  nlohmann::json j{{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

/// value >= threshold
inline Check check_at_least(std::string name, double value, double threshold, std::string detail = {}) {
  return Check{std::move(name), value, threshold, value >= threshold, std::move(detail)};
}

/// value <= threshold
inline Check check_at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return Check{std::move(name), value, threshold, value <= threshold, std::move(detail)};
}

} // namespace spectel
