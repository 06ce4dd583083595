#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "bohm/integrate.hpp"
#include "bohm/scenario.hpp"

namespace bohm {

/// Largest allowed spread (max/min) of the reduced core time across N.
inline constexpr double kReducedTimeRatioLimit = 2.0;
/// Budget for one full-backend ensemble at N = 50.
inline constexpr double kFullEnsembleBudgetSeconds = 60.0;

struct BenchCase {
  Backend backend = Backend::Reduced;
  std::size_t n = 1;
};

struct BenchRow {
  Backend backend = Backend::Reduced;
  std::size_t n = 1;
  std::size_t repetitions = 0;
  double median_core_seconds = 0.0;         // one ensemble integration
  double median_reconstruct_seconds = 0.0;  // reduced: pointer rebuild, per trajectory
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double reduced_time_ratio = 0.0;  // max/min median core time over reduced rows
  bool reduced_flat = true;         // ratio below kReducedTimeRatioLimit
  bool full_monotonic = true;       // full-backend time grows with N
};

/// Default cases: reduced at N ∈ {1, 10⁴, 10⁶}, full-analytic at N ∈ {1, 10, 50}.
std::vector<BenchCase> default_bench_cases();

/// Preset used as the bench base when none is given: a fast pointer, whose
/// reduced dynamics take a similar number of steps for every N.
inline constexpr const char* kDefaultBenchPreset = "fig3";

/// Times the slit-grid ensemble of `base` (single-pointer) for every case.
/// Pointer positions are drawn once per case from a Gaussian with the
/// scenario seed, outside the timed region. Throws ConfigError when
/// repetitions is zero.
BenchReport run_bench(const ScenarioFile& base, std::span<const BenchCase> cases, std::size_t repetitions);

nlohmann::json to_json(const BenchReport& report);

}  // namespace bohm
