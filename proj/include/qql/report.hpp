#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "qql/bounds.hpp"
#include "qql/errors.hpp"

namespace qql {

inline constexpr const char* kVersion = "0.1.0";

/// Machine-readable result of one CLI invocation. Exact rationals inside
/// `outputs` are strings ("7/8") so they survive the round trip.
struct RunReport {
  std::string subcommand;
  nlohmann::json input = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  double wall_time_s = 0.0;
  std::string version = kVersion;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j = {{"subcommand", r.subcommand}, {"input", r.input},     {"outputs", r.outputs},
                      {"wall_time_s", r.wall_time_s}, {"version", r.version}, {"seed", nullptr}};
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

inline RunReport report_from_json(const nlohmann::json& j) {
  try {
    RunReport r;
    r.subcommand = j.at("subcommand").get<std::string>();
    r.input = j.at("input");
    r.outputs = j.at("outputs");
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.version = j.at("version").get<std::string>();
    if (j.contains("seed") && !j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed run report: ") + e.what());
  }
}

inline std::string serialize(const RunReport& r) { return to_json(r).dump(2); }

inline RunReport parse_report(const std::string& text) {
  try {
    return report_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("run report is not JSON: ") + e.what());
  }
}

}  // namespace qql
