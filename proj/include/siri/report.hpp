#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "siri/model.hpp"
#include "siri/pmp.hpp"
#include "siri/scenario.hpp"
#include "siri/solver.hpp"
#include "siri/sweep.hpp"

namespace siri {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

Json to_json(const Scenario& s);
/// Inverse of to_json(Scenario); runs Scenario::validate().
Scenario scenario_from_json(const Json& j);

Json to_json(const SolveOptions& o);
SolveOptions options_from_json(const Json& j);

Json to_json(const DiagnosticsReport& d, bool with_trace = false);
Json to_json(const SolveReport& r);
Json to_json(const AssumptionReport& a);
Json to_json(const EquilibriumReport& e);
Json to_json(const BracketErrors& e);

/// Everything needed to rerun a command: tool version, argv, scenario, options and outputs.
struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  Scenario scenario;
  bool has_options = false;
  SolveOptions options;
  Json extra = Json::object();  // command-specific inputs (e.g. constant controls)
  std::vector<std::string> files;
};

Json to_json(const Manifest& m);
Manifest manifest_from_json(const Json& j);

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace siri
