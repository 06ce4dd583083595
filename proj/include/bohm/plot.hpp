#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bohm/integrate.hpp"

namespace bohm {

struct SvgPanel {
  std::string file;  // e.g. "test_particle.svg"
  std::string svg;
};

/// Deterministic SVG panels for an ensemble: X′ against Y′ for the test
/// particle, and the pointer coordinate (Z′, or Σ̂′ for N > 1) against Y′.
/// Two-pointer scenarios get one panel per pointer. Upper-slit starts are
/// drawn solid, lower-slit starts dashed. Throws ConfigError on an empty run.
std::vector<SvgPanel> render_panels(std::span<const Trajectory> trajectories,
                                    const ScenarioParams& params);

/// Reads a run directory written by `simulate` (manifest.json + CSV files).
std::vector<Trajectory> load_run(const std::filesystem::path& dir, ScenarioParams* params = nullptr);

void write_panels(const std::vector<SvgPanel>& panels, const std::filesystem::path& dir);

}  // namespace bohm
