#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bohm/params.hpp"
#include "bohm/velocity.hpp"

namespace bohm {

/// The velocity field under test; the default is velocity_analytic.
using VelocityField = std::function<VelocityVector(const Configuration&, const ScenarioParams&)>;

// Tolerances of the validation suites.
inline constexpr double kBackendEquivalenceTol = 1e-6;
inline constexpr double kSqrtNTol = 1e-5;
inline constexpr double kYOracleTol = 1e-8;
inline constexpr double kTauSlope = -0.5;
inline constexpr double kTauSlopeTol = 0.05;
inline constexpr double kMirrorToleranceFactor = 10.0;
/// Support samples closer to a node than this normalized density are redrawn.
inline constexpr double kSupportDensityFloor = 1e-6;

struct ValidationOptions {
  VelocityField velocity;          // empty = velocity_analytic
  std::size_t samples = 1000;      // random configurations per preset
  std::uint64_t seed = 20240601;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;     // worst observed deviation (suite-specific)
  double tolerance = 0.0;
  std::string detail;
};

std::vector<std::string> validation_suites();

/// Throws ConfigError for an unknown suite name.
SuiteResult run_suite(std::string_view name, const ValidationOptions& opts = {});

/// Runs the named suites (all when `only` is empty), in canonical order.
std::vector<SuiteResult> run_validation(std::span<const std::string> only,
                                        const ValidationOptions& opts = {});

/// Draws a configuration at a uniform t′ ∈ [0, horizon] from one branch's
/// |packet|² (branch chosen with equal odds), redrawing near nodes.
Configuration sample_support_configuration(const ScenarioParams& params, double horizon,
                                           std::mt19937_64& rng);

/// max_j |a_j − b_j| / max(|a_j|, κ_j), κ_j the velocity scale of coordinate j.
double velocity_deviation(const VelocityVector& a, const VelocityVector& b, const ScenarioParams& params);

/// Exact dY′/dt′ along the free y packet at (t′, Y′).
double y_velocity_closed_form(double t_prime, double y_prime, double xi_y);

}  // namespace bohm
