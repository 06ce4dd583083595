#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bohm/integrate.hpp"
#include "bohm/params.hpp"

namespace bohm {

inline constexpr int kScenarioSchemaVersion = 1;

struct OutputSpec {
  std::vector<std::string> formats{"csv", "manifest"};
  std::string dir;
  int stride = 1;  // write every stride-th sample

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// A complete, reproducible run description.
struct ScenarioFile {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  ScenarioParams params;
  EnsembleSpec ensemble;
  IntegratorOptions integrator;
  OutputSpec outputs;

  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// Strict parse: unknown keys, missing required fields and bad values raise
/// ConfigError.
ScenarioFile scenario_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioFile& scenario);

ScenarioFile load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioFile& scenario, const std::filesystem::path& path);

/// Named presets reproducing the figure scenarios ("fig2" ... "fig12").
ScenarioFile preset(std::string_view name);
std::vector<std::string> preset_names();

/// Replaces the pointer count, keeping the pointer mode (single pointer only).
void override_particle_count(ScenarioFile& scenario, std::size_t n);

}  // namespace bohm
