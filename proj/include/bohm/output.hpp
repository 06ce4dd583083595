#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohm/analysis.hpp"
#include "bohm/integrate.hpp"
#include "bohm/scenario.hpp"

namespace bohm {

/// Result of one `simulate` invocation.
struct RunResult {
  ScenarioFile scenario;
  std::vector<Trajectory> trajectories;
  ClassificationSummary summary;
  double wall_seconds = 0.0;
};

/// Runs the scenario's ensemble and classifies every trajectory.
RunResult run_scenario(const ScenarioFile& scenario);

/// One row per kept sample: t_prime, X, Y, then Z_1..Z_N (or Sigma_hat when
/// the pointers were not reconstructed), logOmega, deltaS. 17 significant
/// digits, so values round-trip exactly.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int stride = 1);

/// Everything needed to reproduce and audit the run. The "timing" member is
/// the only field that varies between identical runs.
nlohmann::json build_manifest(const RunResult& run, const std::vector<std::string>& csv_files);

/// Writes traj_NNN.csv files and manifest.json into `dir` (created if
/// missing), honouring outputs.formats and outputs.stride.
void write_run(const RunResult& run, const std::filesystem::path& dir);

/// Manifest with the timing block removed, for reproducibility comparisons.
nlohmann::json strip_timing(nlohmann::json manifest);

}  // namespace bohm
